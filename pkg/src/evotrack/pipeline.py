"""Pipeline configuration and the file-backed stages the CLI is made of.

Every stage reads its inputs from the output directory and writes its own
artifacts there, so running the stages one by one produces the same bytes as
``run_pipeline``.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import analytics, cpm, ged, ingest, sgci, tracking
from .model import Community, EvolutionEvent, SnapshotGraph, id_k

logger = logging.getLogger(__name__)

THREADS_ENV = "EVOTRACK_THREADS"

SLOTS_FILE = "slots.csv"
SNAPSHOTS_FILE = "snapshots.csv"
COMMUNITIES_FILE = "communities.csv"
TRANSITIONS_FILE = "transitions.csv"
TIMELINES_FILE = "timelines.csv"
SGCI_FILE = "events_sgci.csv"
GED_FILE = "events_ged.csv"
INCLUSIONS_FILE = "inclusions.csv"
CONFIG_FILE = "config.json"
FAILED_FILE = "FAILED"

EVENT_HEADER = ["method", "event_type", "slot_from", "slot_to", "from_ids", "to_ids",
                "mj", "jaccard", "i_forward", "i_backward"]


class StageError(RuntimeError):
    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass
class PipelineConfig:
    slot_days: float = 30
    slot_step_days: float = 15
    origin: int | None = None
    n_slots: int | None = None
    min_edge_weight: int = 2
    aggregated: bool = False
    k: list = field(default_factory=lambda: [3, 4, 5])
    clique_mode: str = cpm.DIRECTED
    min_intensity: float | None = None
    mj_threshold: float = 0.5
    jaccard_min: float = 0.01
    condition: str = tracking.MJ_AND_JACCARD
    stability_min_slots: int = 3
    size_ratio: float = 10.0
    constancy_delta: int = 3
    sgci_priority: list = field(default_factory=lambda: list(sgci.DEFAULT_PRIORITY))
    alpha: float = 0.5
    beta: float = 0.5
    importance: str = "uniform"
    ged_continuity_delta: int = 0
    out: str = "out"
    seed: int = 0

    def validate(self):
        problems = []
        if not 0 < self.slot_step_days <= self.slot_days:
            problems.append("need 0 < slot_step_days <= slot_days")
        if self.min_edge_weight < 1:
            problems.append("min_edge_weight must be >= 1")
        if not self.k or any(k < 3 for k in self.k):
            problems.append("every k must be >= 3")
        if self.clique_mode not in cpm.CLIQUE_MODES:
            problems.append(f"clique_mode must be one of {cpm.CLIQUE_MODES}")
        if not 0 <= self.mj_threshold <= 1:
            problems.append("mj_threshold must lie in [0, 1]")
        if not 0 <= self.jaccard_min <= 1:
            problems.append("jaccard_min must lie in [0, 1]")
        if self.condition not in tracking.CONDITION_MODES:
            problems.append(f"condition must be one of {tracking.CONDITION_MODES}")
        if self.stability_min_slots < 1:
            problems.append("stability_min_slots must be >= 1")
        if self.size_ratio <= 0:
            problems.append("size_ratio must be > 0")
        if sorted(self.sgci_priority) != sorted(sgci.DEFAULT_PRIORITY):
            problems.append(f"sgci_priority must order exactly {sorted(sgci.DEFAULT_PRIORITY)}")
        if self.constancy_delta < 0 or self.ged_continuity_delta < 0:
            problems.append("size deltas must be >= 0")
        if not (0 < self.alpha <= 1 and 0 < self.beta <= 1):
            problems.append("alpha and beta must lie in (0, 1]")
        if self.importance not in ged.IMPORTANCE_METRICS:
            problems.append(f"importance must be one of {ged.IMPORTANCE_METRICS}")
        if self.n_slots is not None and self.n_slots < 1:
            problems.append("n_slots must be >= 1")
        if problems:
            raise StageError("config", "; ".join(problems))
        return self

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise StageError("config", f"unknown keys {sorted(unknown)}")
        cfg = cls(**data)
        if isinstance(cfg.k, int):
            cfg.k = [cfg.k]
        return cfg

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @property
    def out_dir(self):
        return Path(self.out)


def thread_count():
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise StageError("config", f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


# ---------------------------------------------------------------- file helpers

def fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path: Path, header, rows):
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])
    os.replace(tmp, path)


def write_text(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def read_csv(out: Path, name: str, stage: str):
    path = out / name
    if not path.exists():
        raise StageError(stage, f"required file {path} is missing; run the upstream stage first")
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _prepare(cfg: PipelineConfig):
    cfg.validate()
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    write_text(cfg.out_dir / CONFIG_FILE, cfg.to_json())


def load_slot_count(out: Path, stage: str) -> int:
    return len(read_csv(out, SLOTS_FILE, stage))


def load_snapshots(out: Path, stage: str) -> list[SnapshotGraph]:
    n = load_slot_count(out, stage)
    graphs = [SnapshotGraph(i) for i in range(n)]
    for row in read_csv(out, SNAPSHOTS_FILE, stage):
        g = graphs[int(row["slot_index"])]
        g.edges[(row["source"], row["target"])] = int(row["weight"])
        g.nodes.update((row["source"], row["target"]))
    return graphs


def load_communities(out: Path, stage: str) -> dict:
    """k -> slot -> list of Community, in id order."""
    members = defaultdict(set)
    where = {}
    for row in read_csv(out, COMMUNITIES_FILE, stage):
        cid = row["community_id"]
        members[cid].add(row["member"])
        where[cid] = (int(row["slot_index"]), int(row["k"]))
    out_map = defaultdict(lambda: defaultdict(list))
    for cid, (slot, k) in where.items():
        out_map[k][slot].append(Community(cid, slot, k, frozenset(members[cid])))
    for by_slot in out_map.values():
        for comms in by_slot.values():
            comms.sort(key=lambda c: c.sort_key)
    return out_map


def load_transitions(out: Path, stage: str, communities) -> dict:
    """k -> list of TransitionCandidate."""
    by_id = {c.id: c for by_slot in communities.values() for cs in by_slot.values() for c in cs}
    result = defaultdict(list)
    for row in read_csv(out, TRANSITIONS_FILE, stage):
        a, b = by_id[row["from_id"]], by_id[row["to_id"]]
        result[int(row["k"])].append(tracking.TransitionCandidate(
            a, b, float(row["mj"]), float(row["jaccard"]), len(a.members & b.members), row["accepted"] == "1",
        ))
    return result


def load_timelines(out: Path, stage: str, communities) -> dict:
    """k -> list of GroupTimeline."""
    by_id = {c.id: c for by_slot in communities.values() for cs in by_slot.values() for c in cs}
    result = defaultdict(dict)
    for row in read_csv(out, TIMELINES_FILE, stage):
        k = int(row["k"])
        tl = result[k].setdefault(row["timeline_id"], tracking.GroupTimeline(row["timeline_id"], [], row["stable"] == "1"))
        tl.states.append(by_id[row["community_id"]])
    return {k: list(tls.values()) for k, tls in result.items()}


def load_events(out: Path, name: str, stage: str) -> dict:
    """k -> list of EvolutionEvent."""
    result = defaultdict(list)
    for row in read_csv(out, name, stage):
        measures = {m: float(row[m]) for m in ("mj", "jaccard", "i_forward", "i_backward") if row[m]}
        e = EvolutionEvent(
            row["method"], row["event_type"], int(row["slot_from"]), int(row["slot_to"]),
            tuple(x for x in row["from_ids"].split(";") if x),
            tuple(x for x in row["to_ids"].split(";") if x), measures,
        )
        result[id_k((e.from_ids + e.to_ids)[0])].append(e)
    return result


def event_rows(events):
    for e in events:
        m = e.measures
        yield [e.method, e.event_type, e.slot_from, e.slot_to, ";".join(e.from_ids), ";".join(e.to_ids),
               m.get("mj"), m.get("jaccard"), m.get("i_forward"), m.get("i_backward")]


# ---------------------------------------------------------------- stages

def stage_ingest(cfg: PipelineConfig, input_path):
    _prepare(cfg)
    path = Path(input_path)
    if not path.exists():
        raise StageError("ingest", f"input file {path} does not exist")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            if cfg.aggregated:
                by_slot = ingest.parse_aggregated(fh, cfg.min_edge_weight)
                n = cfg.n_slots if cfg.n_slots is not None else max(by_slot, default=-1) + 1
                graphs = [by_slot.get(i, SnapshotGraph(i)) for i in range(n)]
                windows = [(None, None, None)] * n
            else:
                records = ingest.parse_interactions(fh)
                origin = cfg.origin if cfg.origin is not None else (ingest.default_origin(records) if records else 0)
                spec = ingest.SlotSpec.from_days(origin, cfg.slot_days, cfg.slot_step_days)
                assigned = ingest.assign_slots(records, spec, cfg.n_slots)
                n = cfg.n_slots if cfg.n_slots is not None else max(assigned, default=-1) + 1
                graphs = [ingest.build_snapshot(assigned.get(i, ()), i, cfg.min_edge_weight) for i in range(n)]
                windows = [(*spec.window(i), len(assigned.get(i, ()))) for i in range(n)]
    except ingest.IngestError as exc:
        raise StageError("ingest", f"{path}: {exc}") from None
    write_csv(cfg.out_dir / SLOTS_FILE, ["slot_index", "start", "end", "records", "nodes", "edges"],
              ([g.slot_index, *w, len(g.nodes), len(g.edges)] for g, w in zip(graphs, windows)))
    write_csv(cfg.out_dir / SNAPSHOTS_FILE, list(ingest.AGGREGATED_HEADER),
              ([u, v, g.slot_index, w] for g in graphs for (u, v), w in sorted(g.edges.items())))
    logger.info("ingest: %d slots", len(graphs))
    return graphs


def _extract_job(args):
    graph, ks, mode, intensity = args
    return cpm.extract_all(graph, ks, mode, intensity)


def stage_extract(cfg: PipelineConfig):
    _prepare(cfg)
    graphs = load_snapshots(cfg.out_dir, "extract")
    jobs = [(g, list(cfg.k), cfg.clique_mode, cfg.min_intensity) for g in graphs]
    workers = min(thread_count(), len(jobs)) if jobs else 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_slot = list(pool.map(_extract_job, jobs, chunksize=1))
    else:
        per_slot = [_extract_job(j) for j in jobs]
    # rows ordered by k, then slot, then rank
    results = [by_k[k] for k in cfg.k for by_k in per_slot]
    rows = [[c.slot_index, c.k, c.id, m] for comms in results for c in comms for m in sorted(c.members)]
    write_csv(cfg.out_dir / COMMUNITIES_FILE, ["slot_index", "k", "community_id", "member"], rows)
    logger.info("extract: %d communities", sum(len(r) for r in results))
    return results


def stage_track(cfg: PipelineConfig):
    _prepare(cfg)
    n = load_slot_count(cfg.out_dir, "track")
    communities = load_communities(cfg.out_dir, "track")
    t_rows, tl_rows = [], []
    for k in cfg.k:
        by_slot = communities.get(k, {})
        transitions = tracking.track(by_slot, n, mj_threshold=cfg.mj_threshold,
                                     jaccard_min=cfg.jaccard_min, condition_mode=cfg.condition)
        all_comms = [c for slot in sorted(by_slot) for c in by_slot[slot]]
        timelines = tracking.assemble_timelines(transitions, all_comms, cfg.stability_min_slots)
        t_rows += [[t.slot, k, t.source.id, t.target.id, t.mj, t.jaccard, t.accepted] for t in transitions]
        tl_rows += [[k, tl.id, tl.stable, i, c.slot_index, c.id]
                    for tl in timelines for i, c in enumerate(tl.states)]
    write_csv(cfg.out_dir / TRANSITIONS_FILE, ["slot", "k", "from_id", "to_id", "mj", "jaccard", "accepted"], t_rows)
    write_csv(cfg.out_dir / TIMELINES_FILE, ["k", "timeline_id", "stable", "position", "slot_index", "community_id"],
              tl_rows)


def stage_sgci(cfg: PipelineConfig):
    _prepare(cfg)
    n = load_slot_count(cfg.out_dir, "events-sgci")
    communities = load_communities(cfg.out_dir, "events-sgci")
    transitions = load_transitions(cfg.out_dir, "events-sgci", communities)
    timelines = load_timelines(cfg.out_dir, "events-sgci", communities)
    events = []
    for k in cfg.k:
        stable = tracking.stable_ids(timelines.get(k, []))
        by_slot = defaultdict(list)
        for t in transitions.get(k, []):
            if t.accepted:
                by_slot[t.slot].append(t)
        for t in range(n - 1):
            events += sgci.classify_sgci(by_slot[t], stable, communities.get(k, {}).get(t, []),
                                         size_ratio=cfg.size_ratio, constancy_delta=cfg.constancy_delta,
                                         priority=tuple(cfg.sgci_priority))
    write_csv(cfg.out_dir / SGCI_FILE, EVENT_HEADER, event_rows(events))
    return events


def stage_ged(cfg: PipelineConfig):
    _prepare(cfg)
    n = load_slot_count(cfg.out_dir, "events-ged")
    communities = load_communities(cfg.out_dir, "events-ged")
    graphs = load_snapshots(cfg.out_dir, "events-ged") if cfg.importance != "uniform" else None
    events, inc_rows = [], []
    for k in cfg.k:
        by_slot = communities.get(k, {})
        importance = {}
        for slot, comms in by_slot.items():
            for c in comms:
                importance[c.id] = ged.node_importance(graphs[slot] if graphs else None, c, cfg.importance)
        for t in range(n - 1):
            prev, nxt = by_slot.get(t, []), by_slot.get(t + 1, [])
            events += ged.classify_ged(prev, nxt, alpha=cfg.alpha, beta=cfg.beta,
                                       continuity_delta=cfg.ged_continuity_delta, importance=importance)
            inc_rows += [[t, k, a, b, f, bw] for (a, b), (f, bw) in ged.pair_inclusions(prev, nxt, importance).items()]
    write_csv(cfg.out_dir / GED_FILE, EVENT_HEADER, event_rows(events))
    write_csv(cfg.out_dir / INCLUSIONS_FILE, ["slot", "k", "from_id", "to_id", "i_forward", "i_backward"], inc_rows)
    return events


def _context(cfg, communities, stage):
    transitions = load_transitions(cfg.out_dir, stage, communities)
    timelines = load_timelines(cfg.out_dir, stage, communities)
    inclusions = defaultdict(dict)
    for row in read_csv(cfg.out_dir, INCLUSIONS_FILE, stage):
        inclusions[int(row["k"])][(row["from_id"], row["to_id"])] = (float(row["i_forward"]), float(row["i_backward"]))
    return {
        k: analytics.TrackingContext(
            tracking.stable_ids(timelines.get(k, [])),
            {(t.source.id, t.target.id) for t in transitions.get(k, []) if t.accepted},
            inclusions.get(k, {}),
        )
        for k in cfg.k
    }


def compare_reports(cfg, sgci_events, ged_events, contexts) -> dict:
    return {k: analytics.compare_methods(sgci_events.get(k, []), ged_events.get(k, []), contexts.get(k))
            for k in cfg.k}


def stage_compare(cfg: PipelineConfig):
    _prepare(cfg)
    out = cfg.out_dir
    sgci_events = load_events(out, SGCI_FILE, "compare")
    ged_events = load_events(out, GED_FILE, "compare")
    communities = load_communities(out, "compare")
    reports = compare_reports(cfg, sgci_events, ged_events, _context(cfg, communities, "compare"))
    summary = {}
    for k, rep in reports.items():
        write_csv(out / f"report_event_counts_{k}.csv", ["method", "event_type", "count"],
                  [["SGCI", t, c] for t, c in rep.sgci_counts.items()]
                  + [["GED", t, c] for t, c in rep.ged_counts.items()])
        write_csv(out / f"report_correspondence_{k}.csv", ["events_sgci_ged", "sgci", "ged"], rep.correspondence)
        write_csv(out / f"report_miss_reasons_{k}.csv", ["reason", "count"], rep.reason_counts().items())
        write_csv(out / f"report_totals_{k}.csv", ["quantity", "value"], rep.totals.items())
        write_csv(out / f"report_ged_misses_{k}.csv", EVENT_HEADER + ["reason"],
                  (row + [reason] for (e, reason), row in
                   zip(rep.ged_misses, event_rows(e for e, _ in rep.ged_misses))))
        write_csv(out / f"report_sgci_misses_{k}.csv", EVENT_HEADER[:8] + ["recorded_i_forward", "recorded_i_backward"],
                  (row[:8] + [f, b] for (e, f, b), row in
                   zip(rep.sgci_misses, event_rows(e for e, *_ in rep.sgci_misses))))
        summary[str(k)] = {
            "sgci_counts": rep.sgci_counts,
            "ged_counts": rep.ged_counts,
            "correspondence": [{"events": label, "SGCI": s, "GED": g} for label, s, g in rep.correspondence],
            "miss_reasons": rep.reason_counts(),
            "totals": rep.totals,
        }
    write_text(out / "comparison.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return reports


def _hist_rows(h: analytics.HistogramSpec):
    for lo, hi, c, avg in zip(h.bin_edges, h.bin_edges[1:], h.counts, h.averages()):
        yield [lo, hi, c, avg]


def stage_stats(cfg: PipelineConfig):
    _prepare(cfg)
    out = cfg.out_dir
    n = load_slot_count(out, "stats")
    communities = load_communities(out, "stats")
    transitions = load_transitions(out, "stats", communities)
    timelines = load_timelines(out, "stats", communities)
    summary = {}
    header = ["bin_low", "bin_high", "count", "per_slot"]
    for k in cfg.k:
        by_slot = communities.get(k, {})
        stable = tracking.stable_ids(timelines.get(k, []))
        stable_by_slot = {s: [c for c in cs if c.id in stable] for s, cs in by_slot.items()}
        sizes = analytics.group_size_distribution(by_slot, n)
        overlap = analytics.transition_overlap_distribution(transitions.get(k, []))
        within = analytics.within_slot_overlap(by_slot)
        members = analytics.membership_counts(stable_by_slot, n)
        write_csv(out / f"report_group_sizes_{k}.csv", header, _hist_rows(sizes))
        write_csv(out / f"report_transition_overlap_{k}.csv", header, _hist_rows(overlap))
        write_csv(out / f"report_within_slot_overlap_{k}.csv", header, _hist_rows(within))
        write_csv(out / f"report_membership_{k}.csv", ["slot_index", "in_1", "in_2", "in_3"],
                  ([i, *row] for i, row in enumerate(members["per_slot"])))
        write_csv(out / f"report_membership_summary_{k}.csv",
                  ["groups", "first_mean", "first_std", "second_mean", "second_std"],
                  ([m, s["first_mean"], s["first_std"], s["second_mean"], s["second_std"]]
                   for m, s in members["summary"].items()))
        summary[str(k)] = {
            "group_sizes": sizes.counts,
            "transition_overlap": overlap.counts,
            "within_slot_overlap": within.counts,
            "membership_summary": {str(m): s for m, s in members["summary"].items()},
            "stable_timelines": sum(1 for tl in timelines.get(k, []) if tl.stable),
            "timelines": len(timelines.get(k, [])),
        }
    write_text(out / "stats.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


STAGES = ("ingest", "extract", "track", "events-sgci", "events-ged", "compare", "stats")


def run_pipeline(cfg: PipelineConfig, input_path):
    """Run every stage in order; on failure leave a FAILED marker naming the stage."""
    stage = "config"
    try:
        cfg.validate()
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        failed = cfg.out_dir / FAILED_FILE
        if failed.exists():
            failed.unlink()
        stage = "ingest"
        stage_ingest(cfg, input_path)
        stage = "extract"
        stage_extract(cfg)
        stage = "track"
        stage_track(cfg)
        stage = "events-sgci"
        stage_sgci(cfg)
        stage = "events-ged"
        stage_ged(cfg)
        stage = "compare"
        stage_compare(cfg)
        stage = "stats"
        stage_stats(cfg)
    except StageError:
        _mark_failed(cfg, stage)
        raise
    except Exception as exc:
        _mark_failed(cfg, stage)
        raise StageError(stage, f"{type(exc).__name__}: {exc}") from exc


def _mark_failed(cfg, stage):
    try:
        if cfg.out_dir.is_dir():
            write_text(cfg.out_dir / FAILED_FILE, f"stage={stage}\n")
    except OSError:
        pass
