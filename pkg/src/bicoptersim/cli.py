"""Command-line interface.

Subcommands:

    run <scenario.json | preset> [--out CSV] [--report JSON]
    tune --axis AXIS (--zeta Z --wn W | --char C1 C0) [--step-csv CSV]
    presets
    serve [--port N] [--fast] [--decimation N] <scenario.json | preset>

Exit codes: 0 success, 2 configuration/usage error, 3 divergence.
"""
from __future__ import annotations

import argparse
import asyncio
import json
import sys

from .config import load_scenario
from .dynamics import BicopterParams
from .scenario import Scenario, ScenarioError, presets, run_scenario, write_csv
from .tuning import (
    DesiredCharacteristic,
    cltf_step_response,
    gains_from_characteristic,
    plant_from_params,
    poles,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bicoptersim",
        description="Bicopter software-in-the-loop simulator and tuning toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario to completion")
    p_run.add_argument("scenario", help="scenario JSON file or preset name")
    p_run.add_argument("--out", help="write telemetry CSV here")
    p_run.add_argument("--report", help="write the RMSE report JSON here")

    p_tune = sub.add_parser("tune", help="pole-placement PD gain synthesis")
    p_tune.add_argument("--axis", required=True, choices=("roll", "pitch", "yaw"))
    p_tune.add_argument("--zeta", type=float, help="damping ratio target")
    p_tune.add_argument("--wn", type=float, help="natural frequency target, rad/s")
    p_tune.add_argument(
        "--char", nargs=2, type=float, metavar=("C1", "C0"),
        help="target characteristic s^2 + C1 s + C0",
    )
    p_tune.add_argument("--step-csv", help="write the closed-loop step response here")
    p_tune.add_argument("--duration", type=float, default=1.0)
    p_tune.add_argument("--dt", type=float, default=0.0028)

    sub.add_parser("presets", help="list built-in scenarios")

    p_serve = sub.add_parser("serve", help="serve a live session over websocket")
    p_serve.add_argument("scenario", help="scenario JSON file or preset name")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--fast", action="store_true", help="run unpaced")
    p_serve.add_argument("--decimation", type=int, default=10,
                         help="telemetry frame every N ticks")
    return parser


def _resolve_scenario(ref: str) -> Scenario:
    table = presets()
    if ref in table:
        return table[ref]
    return load_scenario(ref)


def cmd_run(args: argparse.Namespace) -> int:
    scenario = _resolve_scenario(args.scenario)
    result = run_scenario(scenario)
    if args.out:
        write_csv(result.records, args.out)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(result.report.as_dict(), fh, indent=2)
            fh.write("\n")
    r = result.report.rmse_deg
    print(
        f"{scenario.name}: {len(result.records)} ticks, "
        f"rmse roll={r['roll']:.4f} pitch={r['pitch']:.4f} yaw={r['yaw']:.4f} deg"
    )
    if result.diverged:
        print(f"DIVERGED: {result.diagnostic}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_tune(args: argparse.Namespace) -> int:
    if args.char is not None:
        if args.zeta is not None or args.wn is not None:
            raise ScenarioError("give either --char or --zeta/--wn, not both")
        want = DesiredCharacteristic(args.char[0], args.char[1])
    elif args.zeta is not None and args.wn is not None:
        want = DesiredCharacteristic.from_damping(args.zeta, args.wn)
    else:
        raise ScenarioError("tune needs --char C1 C0 or both --zeta and --wn")
    if not want.is_hurwitz():
        raise ScenarioError("target characteristic must be Hurwitz")
    params = BicopterParams()
    plant = plant_from_params(params, args.axis)
    kp, kd = gains_from_characteristic(plant, want)
    p1, p2 = poles(want.c1, want.c0)
    print(f"axis={args.axis} b={plant.b:.4f}")
    print(f"K_p={kp:.4f} K_d={kd:.4f}")
    print(f"poles: {_fmt_pole(p1)}, {_fmt_pole(p2)}")
    if args.step_csv:
        times, values = cltf_step_response(plant, kp, kd, args.duration, args.dt)
        with open(args.step_csv, "w") as fh:
            fh.write("t,y\n")
            for t, y in zip(times, values):
                fh.write(f"{t:.6f},{y:.6f}\n")
    return EXIT_OK


def cmd_presets() -> int:
    for name, sc in presets().items():
        wind = sc.wind.speed_knots
        print(
            f"{name}: mode={sc.mode} duration={sc.duration:g}s "
            f"gains={sc.gains} wind={wind:g}kn estimator={sc.estimator}"
        )
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .serve import run_server

    scenario = _resolve_scenario(args.scenario)
    print(
        f"serving {scenario.name} on ws://{args.host}:{args.port} "
        f"({'fast' if args.fast else 'real-time'}, 1 frame / {args.decimation} ticks)"
    )
    try:
        asyncio.run(
            run_server(
                scenario,
                port=args.port,
                host=args.host,
                decimation=args.decimation,
                realtime=not args.fast,
            )
        )
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def _fmt_pole(p: complex) -> str:
    if p.imag == 0.0:
        return f"{p.real:.4f}"
    return f"{p.real:.4f}{p.imag:+.4f}j"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "tune":
            return cmd_tune(args)
        if args.command == "presets":
            return cmd_presets()
        if args.command == "serve":
            return cmd_serve(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
