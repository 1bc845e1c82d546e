"""Command-line entry point: ``symdispatch {solve,compare,trace,policy-map}``.

Exit status is 0 on success, 2 for argument errors and 1 for runtime errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from . import __version__, harness
from .model import ConfigError
from .policies import PolicyParseError, parse_policy, split_policy_list
from .rng import MASK64
from .solver import MODES


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= MASK64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer: {text!r}")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


def _policy_list(text: str) -> list[str]:
    try:
        specs = split_policy_list(text)
        # Syntax check only; tables are loaded when the command runs.
        for spec in specs:
            if not spec.startswith("optimal"):
                parse_policy(spec)
    except (PolicyParseError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return specs


def _preset_list(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",")]
    for name in names:
        if name not in harness.PRESETS:
            raise argparse.ArgumentTypeError(
                f"unknown preset {name!r}; choose from {','.join(harness.PRESETS)}"
            )
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symdispatch",
        description="Optimal symmetric dispatch via a common-information dynamic program.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the DP and write the value table")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--interp", choices=MODES, default=harness.DEFAULT_MODE)

    p = sub.add_parser("compare", help="Monte Carlo comparison across policies and load presets")
    p.add_argument("--policies", required=True, type=_policy_list)
    p.add_argument("--presets", default="light,moderate,heavy", type=_preset_list)
    p.add_argument("--episodes", type=_positive, default=harness.DEFAULT_EPISODES)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--horizon", type=_positive, default=10)
    p.add_argument("--agents", type=int, default=2)
    p.add_argument("--workers", type=_positive, default=1)

    p = sub.add_parser("trace", help="simulate one episode and write its belief trace")
    p.add_argument("--config", required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--seed", type=_u64, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--episode", type=int, default=0)
    p.add_argument("--keys", action="store_true", help="append the table lookup keys")

    p = sub.add_parser("policy-map", help="dispatch probability by urgency and belief")
    p.add_argument("--table", required=True)
    p.add_argument("--stage", type=int, required=True)
    p.add_argument("--out", required=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "solve":
            table, v1 = harness.cmd_solve(args.config, args.out, args.interp)
            print(f"V_1 = {v1:.6f}")
        elif args.command == "compare":
            rows, errors = harness.cmd_compare(
                args.policies,
                args.presets,
                episodes=args.episodes,
                seed=args.seed,
                out=args.out,
                horizon=args.horizon,
                num_agents=args.agents,
                workers=args.workers,
            )
            for r in rows:
                print(
                    f"{r.preset:9s} {r.policy:32s} {r.mean_total_cost:8.4f} "
                    f"+/- {r.standard_error:.4f}"
                )
            if errors:
                for msg in errors:
                    print(f"error: {msg}", file=sys.stderr)
                return 1
        elif args.command == "trace":
            trace = harness.cmd_trace(
                args.config, args.policy, args.seed, args.out, args.episode, args.keys
            )
            print(f"total_cost = {trace.total_cost}")
        elif args.command == "policy-map":
            harness.cmd_policy_map(args.table, args.stage, args.out)
    except (PolicyParseError, ConfigError) as exc:
        print(f"symdispatch {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, IndexError, ArithmeticError) as exc:
        print(f"symdispatch {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
