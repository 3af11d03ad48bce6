"""Command-line interface: serve, ground, eval, mark."""

from __future__ import annotations

import argparse
import json
import sys

from .engine import GroundingEngine
from .environments import environment_for_app, environment_from_snapshot
from .evaluation import evaluate, load_dataset
from .marking import load_spec
from .specfile import data_path


def _load_any_spec(name_or_path: str):
    if name_or_path.endswith((".yaml", ".yml")):
        return load_spec(name_or_path)
    return load_spec(data_path(f"{name_or_path}.yaml"))


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(specs_dir=args.specs, sidecar_dir=args.sidecars)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_ground(args) -> int:
    spec = _load_any_spec(args.spec)
    engine = GroundingEngine(spec, backend=args.backend)
    if args.world:
        with open(args.world, "r", encoding="utf-8") as fh:
            env = environment_from_snapshot(json.load(fh))
    else:
        env = environment_for_app(spec.app_name)
    result = engine.ground(args.command, env)
    if args.execute and not result.empty:
        call = result.action_call
        env.execute_action(call["api"], call["arguments"])
    payload = result.to_dict()
    if args.execute:
        payload["state"] = env.snapshot()
    json.dump(payload, sys.stdout, indent=2)
    print()
    return 0 if not result.empty else 1


def cmd_eval(args) -> int:
    spec = _load_any_spec(args.spec)
    dataset = load_dataset(args.dataset)
    script = None
    if args.learner_script:
        with open(args.learner_script, "r", encoding="utf-8") as fh:
            script = [json.loads(line) for line in fh if line.strip()]
    report = evaluate(dataset, spec, variant=args.variant, learner_replay=script)
    print(report.summary_table())
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
        print(f"report written to {args.report}")
    return 0


def cmd_mark(args) -> int:
    spec = _load_any_spec(args.spec)
    for asc in spec.action_ascs:
        stars = ", ".join(s.name for s in asc.starred_slots()) or "-"
        args_desc = ", ".join(
            f"{s.name}:{s.type}{'(*)' if s.starred else ''}"
            for s in sorted(asc.inputs, key=lambda s: s.name)
        )
        print(f"AID {asc.aid:>3}  {asc.api_name:<18} starred: {stars:<10} args: {args_desc}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="seedcmd",
        description="Ground natural-language commands to API calls via seed commands.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--specs", help="directory of extra spec YAML files")
    p.add_argument("--sidecars", help="directory for learned-template sidecar files")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("ground", help="ground one command")
    p.add_argument("--spec", required=True, help="bundled app name or spec YAML path")
    p.add_argument("--world", help="JSON world snapshot; defaults to an empty world")
    p.add_argument("--command", required=True)
    p.add_argument("--backend", default="vsm", choices=["jaccard", "vsm", "emb"])
    p.add_argument("--execute", action="store_true")
    p.set_defaults(func=cmd_ground)

    p = sub.add_parser("eval", help="score a dataset")
    p.add_argument("--spec", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--variant", default="vsm",
                   help="backend plus optional ablation, e.g. vsm, vsm-R, jaccard-U")
    p.add_argument("--learner-script", help="JSONL of scripted correction sessions")
    p.add_argument("--report", help="write the full report as JSON here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("mark", help="print utility-constraint marking for a spec")
    p.add_argument("--spec", required=True)
    p.set_defaults(func=cmd_mark)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
