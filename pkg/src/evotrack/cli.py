"""Command line entry point: ``evotrack <stage> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import synth
from .pipeline import STAGES, PipelineConfig, StageError, run_pipeline
from . import pipeline

# flag -> (config key, type)
FLAGS = {
    "--slot-days": ("slot_days", float),
    "--slot-step-days": ("slot_step_days", float),
    "--origin": ("origin", int),
    "--slots": ("n_slots", int),
    "--min-edge-weight": ("min_edge_weight", int),
    "--k": ("k", int),
    "--clique-mode": ("clique_mode", str),
    "--min-intensity": ("min_intensity", float),
    "--mj-threshold": ("mj_threshold", float),
    "--jaccard-min": ("jaccard_min", float),
    "--condition": ("condition", str),
    "--stability-min-slots": ("stability_min_slots", int),
    "--size-ratio": ("size_ratio", float),
    "--constancy-delta": ("constancy_delta", int),
    "--sgci-priority": ("sgci_priority", str),
    "--alpha": ("alpha", float),
    "--beta": ("beta", float),
    "--importance": ("importance", str),
    "--ged-continuity-delta": ("ged_continuity_delta", int),
    "--out": ("out", str),
    "--seed": ("seed", int),
}


def _add_config_flags(p):
    p.add_argument("--config", help="JSON file with flat keys; flags override it")
    for flag, (key, typ) in FLAGS.items():
        if key in ("k", "sgci_priority"):
            p.add_argument(flag, dest=key, type=typ, nargs="+", default=None)
        else:
            p.add_argument(flag, dest=key, type=typ, default=None)
    p.add_argument("--aggregated", dest="aggregated", action="store_const", const=True, default=None,
                   help="input is pre-aggregated source,target,slot_index,weight")


def build_parser():
    parser = argparse.ArgumentParser(prog="evotrack", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the whole pipeline")
    p.add_argument("input")
    _add_config_flags(p)

    p = sub.add_parser("ingest", help="build thresholded snapshots")
    p.add_argument("input")
    _add_config_flags(p)

    for name in STAGES[1:]:
        _add_config_flags(sub.add_parser(name))

    p = sub.add_parser("synth", help="render a synthetic interaction log")
    p.add_argument("--scenario", help="scenario script JSON; a random script is generated otherwise")
    p.add_argument("--users", type=int, default=5000)
    p.add_argument("--n-slots", dest="synth_slots", type=int, default=20)
    p.add_argument("--groups-per-slot", type=int, default=180)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")
    return parser


def resolve_config(args) -> PipelineConfig:
    data = {}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise StageError("config", f"config file {path} does not exist")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise StageError("config", f"{path}: {exc}") from None
    for key, _ in FLAGS.values():
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if getattr(args, "aggregated", None):
        data["aggregated"] = True
    try:
        return PipelineConfig.from_dict(data).validate()
    except TypeError as exc:
        raise StageError("config", str(exc)) from None


def cmd_synth(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.scenario:
        path = Path(args.scenario)
        if not path.exists():
            raise StageError("synth", f"scenario file {path} does not exist")
        script = synth.ScenarioScript.from_json(path.read_text())
        if args.seed:
            script.seed = args.seed
    else:
        script = synth.random_script(seed=args.seed, users=args.users, slots=args.synth_slots,
                                     groups_per_slot=args.groups_per_slot, noise=args.noise)
    try:
        records = synth.render_scenario(script)
    except synth.ScenarioError as exc:
        raise StageError("synth", str(exc)) from None
    with open(out / "interactions.csv", "w", encoding="utf-8", newline="") as fh:
        synth.write_interactions(records, fh)
    (out / "scenario.json").write_text(script.to_json() + "\n")
    print(f"wrote {len(records)} records to {out / 'interactions.csv'}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            cmd_synth(args)
            return 0
        cfg = resolve_config(args)
        if args.command == "run":
            run_pipeline(cfg, args.input)
        elif args.command == "ingest":
            pipeline.stage_ingest(cfg, args.input)
        else:
            {
                "extract": pipeline.stage_extract,
                "track": pipeline.stage_track,
                "events-sgci": pipeline.stage_sgci,
                "events-ged": pipeline.stage_ged,
                "compare": pipeline.stage_compare,
                "stats": pipeline.stage_stats,
            }[args.command](cfg)
    except StageError as exc:
        print(f"evotrack: error {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
