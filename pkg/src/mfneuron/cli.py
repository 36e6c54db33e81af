"""Command-line entry point: scenario subcommands plus the local service.

Every run is deterministic; --seedless is accepted purely to document
that no randomness exists anywhere in the pipeline.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .model import ParameterError
from .presets import PRESETS

SUBCOMMAND_KINDS = {
    "simulate": "simulate",
    "curves": "curves",
    "classify": "classify",
    "sweep": "neuromod-sweep",
    "staircase": "staircase",
    "tempsweep": "temperature-sweep",
    "compare-inactivation": "inactivation-compare",
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="scenario file (JSON)")
    p.add_argument("--preset", choices=sorted(PRESETS), help="run a shipped preset")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--dt", type=float, help="solver step (s)")
    p.add_argument("--t-end", type=float, help="simulated time (s)")
    p.add_argument(
        "--seedless",
        action="store_true",
        help="document that runs are deterministic (no RNG anywhere); no effect",
    )


def _default_scenario(kind: str, preset: str) -> harness.Scenario:
    from .analysis import confirmation_input
    from .model import InputSignal
    from .presets import get_preset

    bias = get_preset(preset)
    s = harness.Scenario(kind=kind, bias=bias, preset=preset)
    if kind in ("simulate", "inactivation-compare"):
        s.input = InputSignal.constant(confirmation_input(bias))
    elif kind == "staircase":
        onset = confirmation_input(bias)
        s.amplitudes = [onset * f for f in (0.95, 1.0, 1.05, 1.1, 1.15, 1.5)]
        s.level_duration = 12.5 * bias.tau_u
    elif kind == "neuromod-sweep":
        s.start = bias.sig_s.i_gain0 * 0.5
        s.stop = bias.sig_s.i_gain0 * 2.0
    elif kind == "temperature-sweep":
        s.temperatures = [278.15, 298.15, 318.15]
    return s


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mfneuron",
        description="Behavioral workbench for a current-mode mixed-feedback neuron",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMAND_KINDS:
        p = sub.add_parser(name, help=f"run a {SUBCOMMAND_KINDS[name]} scenario")
        _add_common(p)
    serve = sub.add_parser("serve", help="start the local workbench service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8750)

    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
        return 0

    kind = SUBCOMMAND_KINDS[args.command]
    try:
        if args.config:
            scenario = harness.load_config(args.config)
            if scenario.kind != kind:
                print(
                    f"error: scenario kind {scenario.kind!r} does not match "
                    f"subcommand {args.command!r}",
                    file=sys.stderr,
                )
                return 2
        elif args.preset:
            scenario = _default_scenario(kind, args.preset)
        else:
            print("error: provide --config or --preset", file=sys.stderr)
            return 2
        if args.dt is not None:
            scenario.dt = args.dt
        if args.t_end is not None:
            scenario.t_end = args.t_end
        summary = harness.run_scenario(scenario, args.out)
    except (harness.ConfigError, ParameterError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    json.dump(summary, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
