"""Command-line interface: batch simulation, figure reproduction, live serving.

Exit codes: 0 ok, 2 configuration error, 3 numerical divergence.
Set PHASTA_LOG=debug|info|warning|error to control log verbosity.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .config import apply_overrides, config_from_dict, parse_config
from .errors import ConfigError, NumericalDivergenceError, PhastaError
from .presets import PRESETS
from .scenario import CuePolicy, handover_config_dict
from .trace import TraceWriter, record_from_tick

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3

log = logging.getLogger("phasta.cli")


def _setup_logging():
    level = os.environ.get("PHASTA_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")


def _load_config(args, default_dict=None):
    if args.config:
        raw = parse_config(args.config)
        if args.override:
            with open(args.config) as fh:
                raw_dict = json.load(fh)
            raw = config_from_dict(apply_overrides(raw_dict, args.override))
        return raw
    raw_dict = default_dict or handover_config_dict()
    return config_from_dict(apply_overrides(raw_dict, args.override or []))


def _policy_for(runcfg):
    if runcfg.scenario.get("type") == "handover":
        return CuePolicy.default(runcfg.state_names)
    return None


def cmd_simulate(args):
    runcfg = _load_config(args)
    session = runcfg.make_session(seed=args.seed, policy=_policy_for(runcfg))
    schedule = [(float(t), {"type": "cue", "value": v})
                for t, v in runcfg.scenario.get("script", [])]
    schedule.sort(key=lambda e: e[0])
    out = Path(args.out or runcfg.trace_path or "trace.ndjson")
    out.parent.mkdir(parents=True, exist_ok=True)
    steps = int(round(args.duration / runcfg.dt))
    k = 0
    try:
        with open(out, "w") as fh:
            writer = TraceWriter(fh, every=runcfg.decimation)
            for _ in range(steps):
                while k < len(schedule) and session.state.t >= schedule[k][0] - 1e-12:
                    session.submit(schedule[k][1])
                    k += 1
                writer.feed(session.step_once())
    except NumericalDivergenceError as exc:
        last = exc.last_state
        print(f"numerical divergence; last good time t={last.t:.6f}", file=sys.stderr)
        return EXIT_DIVERGED
    print(f"wrote {writer.count} records to {out}")
    return EXIT_OK


def cmd_reproduce(args):
    from . import figures  # deferred: pulls in matplotlib
    failures = 0
    out_root = Path(args.out or "out")
    for name in args.preset:
        run = PRESETS[name]()
        out_dir = out_root / name
        out_dir.mkdir(parents=True, exist_ok=True)
        for label, ticks in run.variants.items():
            with open(out_dir / f"{label}.ndjson", "w") as fh:
                writer = TraceWriter(fh, every=run.decimation)
                for tick in ticks:
                    writer.feed(tick)
            figures.render_run(ticks, run.state_names, out_dir / f"{label}.png",
                               events=run.events.get(label, ()),
                               title=f"{name}: {label}")
        if name == "fig1":
            figures.render_trajectory3d(run.variants["cycle"], run.state_names,
                                        out_dir / "attractor3d.png", title="fig1")
        try:
            run.check()
            status = "ok"
        except AssertionError as exc:
            status = f"FAILED: {exc}"
            failures += 1
        extra = f" {run.measurements}" if run.measurements else ""
        print(f"{name}: {status} -> {out_dir}{extra}")
    return EXIT_OK if failures == 0 else 1


def cmd_serve(args):
    from .server import serve_forever  # deferred: pulls in websockets
    runcfg = _load_config(args)
    host, _, port = (args.bind or "127.0.0.1:8765").rpartition(":")
    serve_forever(runcfg, host=host or "127.0.0.1", port=int(port))
    return EXIT_OK


def main(argv=None):
    _setup_logging()
    parser = argparse.ArgumentParser(
        prog="phasta",
        description="Phase-state machine: simulate, reproduce experiments, serve live sessions")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="run configuration file (JSON)")
    common.add_argument("--override", metavar="KEY=VAL", action="append",
                        help="override a config entry (dotted path, JSON value)")
    common.add_argument("--out", metavar="PATH", help="output file or directory")
    common.add_argument("--seed", type=int, default=None, help="noise seed override")

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="headless run writing an NDJSON trace")
    p_sim.add_argument("--duration", type=float, default=10.0, help="simulated seconds")
    p_sim.set_defaults(func=cmd_simulate)

    p_rep = sub.add_parser("reproduce", parents=[common],
                           help="re-run built-in experiments, write traces and figures")
    p_rep.add_argument("preset", nargs="+", choices=sorted(PRESETS),
                       help="which experiments to reproduce")
    p_rep.set_defaults(func=cmd_reproduce)

    p_srv = sub.add_parser("serve", parents=[common],
                           help="live WebSocket session server")
    p_srv.add_argument("--bind", metavar="HOST:PORT", default="127.0.0.1:8765")
    p_srv.set_defaults(func=cmd_serve)

    p_hand = sub.add_parser("handover", parents=[common],
                            help="run the scripted handover scenario")
    p_hand.set_defaults(func=cmd_reproduce, preset=["handover"])

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalDivergenceError as exc:
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except PhastaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
