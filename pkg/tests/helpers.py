"""Shared glue for running scenario scripts through the file-based pipeline."""

from pathlib import Path

from evotrack import synth
from evotrack.model import GED, SGCI
from evotrack.pipeline import GED_FILE, SGCI_FILE, PipelineConfig, load_events, run_pipeline


def script_config(script, out, **overrides) -> PipelineConfig:
    cfg = dict(
        slot_days=script.slot_days,
        slot_step_days=script.slot_step_days,
        origin=script.origin,
        n_slots=script.slots,
        min_edge_weight=script.min_edge_weight,
        k=[script.k],
        out=str(out),
    )
    cfg.update(overrides)
    return PipelineConfig(**cfg).validate()


def run_script(script, out, **overrides):
    """Render, run every stage, and return ({SGCI: events, GED: events}, config)."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    log = out / "interactions.csv"
    with open(log, "w", encoding="utf-8", newline="") as fh:
        synth.write_interactions(synth.render_scenario(script), fh)
    cfg = script_config(script, out, **overrides)
    run_pipeline(cfg, log)
    events = {
        SGCI: load_events(out, SGCI_FILE, "test").get(script.k, []),
        GED: load_events(out, GED_FILE, "test").get(script.k, []),
    }
    return events, cfg


def keyed(events):
    """Order-free, measure-free view of an event list."""
    return sorted((e.method, e.event_type, e.slot_from, e.slot_to, e.from_ids, e.to_ids) for e in events)


# pipeline parameter names -> oracle parameter names
ORACLE_ARGS = {
    "mj_threshold": "mj_threshold",
    "jaccard_min": "jaccard_min",
    "condition": "condition_mode",
    "stability_min_slots": "stability_min_slots",
    "size_ratio": "size_ratio",
    "constancy_delta": "constancy_delta",
    "alpha": "alpha",
    "beta": "beta",
    "ged_continuity_delta": "continuity_delta",
}


def oracle(script, **overrides):
    return synth.expected_events(script, **{ORACLE_ARGS[k]: v for k, v in overrides.items()})
