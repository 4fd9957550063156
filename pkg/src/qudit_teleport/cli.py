"""Command-line driver.

    qudit-teleport run    --d 2 --m 1 --n 1 --state random --seed 1
    qudit-teleport verify --d 3 --m 1 --n 2 --state random
    qudit-teleport decoy  --d 2 --count 100000 --eve intercept-resend --seed 7

Exit codes: 0 success, 2 invalid configuration, 3 amplitude or branch cap
exceeded, 4 reconstruction check failed.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .decoy import EveModel, run_decoy_check
from .errors import CapExceeded
from .measurement import DEFAULT_BRANCH_CAP
from .protocol import ProtocolConfig, run_sampled, verify_all_branches
from .register import (
    DEFAULT_AMP_CAP,
    StateVector,
    basis_state,
    from_amplitudes,
    load_state,
    random_state,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_FIDELITY = 4


class ConfigError(Exception):
    pass


def resolve_state(spec: str, config: ProtocolConfig, seed: int) -> StateVector:
    """Turn a ``--state`` argument into the message state on ``x1..xm``."""
    d, m = config.d, config.m
    labels = config.message_labels()
    if spec == "random":
        rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
        return random_state(d, labels, rng)
    if spec == "ghz-like":
        amps = np.zeros(d**m, dtype=complex)
        amps[np.arange(d) * ((d**m - 1) // (d - 1))] = 1 / np.sqrt(d)
        return from_amplitudes(d, labels, amps, amp_cap=config.amp_cap)
    if spec.startswith("basis:"):
        body = spec[len("basis:"):]
        parts = body.split(",") if "," in body else list(body)
        try:
            digits = [int(x) for x in parts]
        except ValueError:
            raise ConfigError(f"bad basis digits in {spec!r}") from None
        if len(digits) != m:
            raise ConfigError(f"{spec!r} gives {len(digits)} digits, m={m}")
        return basis_state(d, labels, digits)
    state = load_state(spec, amp_cap=config.amp_cap)
    if state.d != d or list(state.labels) != labels:
        raise ConfigError(
            f"state file must hold d={d} amplitudes on {[str(x) for x in labels]}"
        )
    return state


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _config(args) -> ProtocolConfig:
    for name in ("d", "m", "n"):
        if getattr(args, name) is None:
            raise ConfigError(f"--{name} is required")
    if args.d < 2:
        raise ConfigError("d must be ≥ 2")
    if args.m < 1:
        raise ConfigError("m must be ≥ 1")
    if args.n < 0:
        raise ConfigError("n must be ≥ 0")
    return ProtocolConfig(args.d, args.m, args.n, amp_cap=args.amp_cap, branch_cap=args.branch_cap)


def cmd_run(args) -> int:
    config = _config(args)
    state = resolve_state(args.state, config, args.seed)
    report = run_sampled(config, state, args.seed, decoy_count=args.count or 0,
                         corrupt=args.corrupt_correction)
    _write(report.to_json(), args.out)
    return EXIT_OK if report.ok else EXIT_FIDELITY


def cmd_verify(args) -> int:
    config = _config(args)
    state = resolve_state(args.state, config, args.seed)
    report = verify_all_branches(config, state, decoy_count=args.count or 0,
                                 corrupt=args.corrupt_correction)
    report.seed = args.seed
    _write(report.to_json(), args.out)
    return EXIT_OK if report.ok else EXIT_FIDELITY


def cmd_decoy(args) -> int:
    if args.d is None or args.d < 2:
        raise ConfigError("d must be ≥ 2")
    if args.count is None or args.count < 1:
        raise ConfigError("count must be ≥ 1")
    report = run_decoy_check(args.d, args.count, EveModel(args.eve), args.seed)
    _write(report.to_json(), args.out)
    return EXIT_OK


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qudit-teleport",
        description="Simulate controlled teleportation of qudit states over GHZ channels.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, help="qudit dimension")
    common.add_argument("--seed", type=_u64, default=0)
    common.add_argument("--out", help="report path (default: stdout)")
    common.add_argument("--count", type=int, help="decoy count")

    proto = argparse.ArgumentParser(add_help=False)
    proto.add_argument("--m", type=int, default=1, help="message qudits")
    proto.add_argument("--n", type=int, default=1, help="controllers")
    proto.add_argument("--state", default="random",
                       help="JSON state file, 'random', 'ghz-like' or 'basis:<digits>'")
    proto.add_argument("--amp-cap", type=int, default=DEFAULT_AMP_CAP)
    proto.add_argument("--branch-cap", type=int, default=DEFAULT_BRANCH_CAP)
    proto.add_argument("--corrupt-correction", action="store_true", help=argparse.SUPPRESS)

    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common, proto], help="one seeded protocol run")
    run.set_defaults(func=cmd_run)
    verify = sub.add_parser("verify", parents=[common, proto], help="check every measurement branch")
    verify.set_defaults(func=cmd_verify)
    decoy = sub.add_parser("decoy", parents=[common], help="decoy eavesdropping check")
    decoy.add_argument("--eve", choices=[e.value for e in EveModel], default="none")
    decoy.set_defaults(func=cmd_decoy, d=2)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"error: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
