"""Command line entry point: ``brownspec <subcommand> [--seed S] [--config FILE] [--out PATH]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from brownspec import harness
from brownspec.harness import EXIT_USAGE, BrownianConfig, ConfigError, PerturbConfig


def _common(p: argparse.ArgumentParser, default_out: str) -> None:
    p.add_argument("--seed", type=int, default=None, help="root seed for all random streams")
    p.add_argument("--config", type=Path, default=None, help="JSON config file")
    p.add_argument("--out", type=Path, default=Path(default_out), help="CSV report path (summary goes next to it)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brownspec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bm-converge", help="dyadic refinement deviations vs the Markov tail certificate")
    _common(p, "bm_converge.csv")

    p = sub.add_parser("perturb-suite", help="eigenvalue inequality suite on random operator pairs")
    _common(p, "perturb_suite.csv")

    p = sub.add_parser("spectrum", help="signed spectrum of one operator, compared with the oracle")
    p.add_argument("operator", nargs="?", type=Path)
    _common(p, "spectrum.csv")

    p = sub.add_parser("weyl-check", help="comparison inequalities for A = A1 + A2 at given p, q")
    p.add_argument("a1", nargs="?", type=Path)
    p.add_argument("a2", nargs="?", type=Path)
    p.add_argument("-p", type=int, default=None)
    p.add_argument("-q", type=int, default=None)
    _common(p, "weyl_check.csv")

    p = sub.add_parser("hausdorff", help="Hausdorff distance between the spectra of A1 + A2 and A1")
    p.add_argument("a1", nargs="?", type=Path)
    p.add_argument("a2", nargs="?", type=Path)
    _common(p, "hausdorff.csv")
    return parser


def _read_config(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def _pop_fields(data: dict, allowed: set) -> dict:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    return data


def dispatch(args) -> int:
    data = _read_config(args.config)
    if args.seed is not None:
        data["seed"] = args.seed
    out = args.out
    if args.command == "bm-converge":
        return harness.run_brownian_experiment(harness.config_from_dict(BrownianConfig, data), out)
    if args.command == "perturb-suite":
        return harness.run_perturbation_suite(harness.config_from_dict(PerturbConfig, data), out)
    if args.command == "spectrum":
        data = _pop_fields(data, {"seed", "operator"})
        return harness.run_spectrum(args.operator or data.get("operator"), out)
    if args.command == "weyl-check":
        data = _pop_fields(data, {"seed", "a1", "a2", "p", "q", "tol"})
        p = args.p if args.p is not None else data.get("p", 1)
        q = args.q if args.q is not None else data.get("q", 1)
        return harness.run_weyl_check(args.a1 or data.get("a1"), args.a2 or data.get("a2"), int(p), int(q), out,
                                      data.get("tol"))
    data = _pop_fields(data, {"seed", "a1", "a2", "tol"})
    return harness.run_hausdorff(args.a1 or data.get("a1"), args.a2 or data.get("a2"), out, data.get("tol"))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        return dispatch(args)
    except ConfigError as exc:
        print(f"brownspec {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
