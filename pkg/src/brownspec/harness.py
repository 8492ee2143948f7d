"""Experiment configs and report writers behind the command line.

Every ``run_*`` function writes a CSV plus a JSON summary and returns the
process exit code: 0 success, 1 a verified failure (an inequality or
certificate violated), 2 a usage or configuration error.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from brownspec.brownian import build_path, deviation_experiment, support_check
from brownspec.gaussian import GaussianMeasure, NormSpec, empirical_q_moment
from brownspec.jacobi import oracle_spectrum
from brownspec.perturbation import PROFILES, Check, OperatorPair, PerturbationReport, random_operator_pair
from brownspec.spectral import load_operator, operator_norm, signed_spectrum
from brownspec.streams import stream

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    """Locale-free decimal with 17 significant digits."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "pass" if x else "fail"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])


def write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def summary_path(out: Path) -> Path:
    return out.with_name(out.stem + "_summary.json")


def config_from_dict(cls, data: dict):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown config fields for {cls.__name__}: {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _require_seed(seed):
    if seed is None:
        raise ConfigError("a seed is required (--seed or \"seed\" in the config)")
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an integer in [0, 2^64), got {seed!r}")


# ---------------------------------------------------------------------------
# bm-converge

_DELTA_RE = re.compile(r"^\s*2\^\(?\s*-\s*N\s*/\s*([0-9.]+)\s*\)?\s*$")


def delta_for(rule, N: int) -> float:
    """``"2^(-N/k)"`` gives 2^(-N/k); a number gives a constant delta."""
    if isinstance(rule, (int, float)) and not isinstance(rule, bool):
        if rule <= 0:
            raise ConfigError("constant delta must be positive")
        return float(rule)
    m = _DELTA_RE.match(str(rule))
    if not m:
        raise ConfigError(f"unrecognised delta_rule {rule!r}; use e.g. \"2^(-N/8)\" or a positive number")
    return 2.0 ** (-N / float(m.group(1)))


@dataclass
class BrownianConfig:
    seed: int | None = None
    dim: int = 1
    covariance: list | None = None
    preset: str | None = None
    norm: dict = field(default_factory=lambda: {"kind": "l2"})
    b: int = 1
    N_min: int = 4
    N_max: int = 12
    r: float = 4.0
    delta_rule: object = "2^(-N/8)"
    trials: int = 10_000
    moment_samples: int = 100_000
    support_check: bool = False
    support_paths: int = 100

    def __post_init__(self):
        if (self.covariance is None) == (self.preset is None):
            if self.covariance is None:
                self.preset = "identity"
            else:
                raise ConfigError("give either covariance or preset, not both")
        if self.preset is not None and self.preset not in ("identity", "zero"):
            raise ConfigError(f"unknown preset {self.preset!r}; expected identity or zero")
        if self.dim < 1 or self.b < 1:
            raise ConfigError("dim and b must be >= 1")
        if not 1 <= self.N_min <= self.N_max:
            raise ConfigError("need 1 <= N_min <= N_max")
        if self.r <= 0 or self.trials < 1 or self.moment_samples < 1:
            raise ConfigError("r, trials and moment_samples must be positive")
        for N in (self.N_min, self.N_max):
            delta_for(self.delta_rule, N)

    def measure(self) -> GaussianMeasure:
        try:
            norm = NormSpec.from_dict(self.norm)
            if self.preset == "identity":
                return GaussianMeasure(np.eye(self.dim), norm)
            if self.preset == "zero":
                return GaussianMeasure(np.zeros((self.dim, self.dim)), norm)
            return GaussianMeasure.from_dict({"dim": self.dim, "covariance": self.covariance, "norm": self.norm})
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def run_brownian_experiment(cfg: BrownianConfig, out: Path) -> int:
    """One deviation_experiment row per level N in [N_min, N_max]."""
    _require_seed(cfg.seed)
    gamma = cfg.measure()
    if cfg.support_check and gamma.rank >= gamma.dim:
        raise ConfigError("support_check needs a rank-deficient covariance")
    moment = empirical_q_moment(gamma, cfg.r, cfg.moment_samples, stream(cfg.seed, "moment"))
    m_used = moment.conservative()
    header = ["N", "delta", "certificate", "empirical_freq", "stderr", "verdict"]
    if cfg.support_check:
        header.append("support_residual")
    rows, all_pass = [], True
    for N in range(cfg.N_min, cfg.N_max + 1):
        delta = delta_for(cfg.delta_rule, N)
        res = deviation_experiment(gamma, cfg.b, N, delta, cfg.trials, cfg.seed, r=cfg.r, m_r=m_used)
        ok = bool(res.verdict)
        row = [N, delta, res.certificate, res.empirical_freq, res.stderr]
        if cfg.support_check:
            # same sub-streams as the deviation trials, so these are the first paths of that run
            paths = [build_path(gamma, cfg.b, N, stream(cfg.seed, "bm-path", N, i))
                     for i in range(min(cfg.support_paths, cfg.trials))]
            resid = support_check(gamma, paths)
            scale = max(float(np.max(np.linalg.norm(p.values, axis=1))) for p in paths)
            ok = ok and resid <= 1e-10 * max(scale, 1e-300)
            row += [ok, resid]
        else:
            row.append(ok)
        all_pass = all_pass and ok
        rows.append(row)
    write_csv(out, header, rows)
    write_json(summary_path(out), {
        "command": "bm-converge",
        "seed": cfg.seed,
        "rows": len(rows),
        "all_pass": all_pass,
        "m_r_estimate": moment.estimate,
        "m_r_stderr": moment.stderr,
        "m_r_used": m_used,
        "r": cfg.r,
        "b": cfg.b,
    })
    return EXIT_OK if all_pass else EXIT_FAIL


# ---------------------------------------------------------------------------
# perturb-suite

@dataclass
class PerturbConfig:
    seed: int | None = None
    dims: list = field(default_factory=lambda: [2, 5, 10, 25, 50])
    profiles: list = field(default_factory=lambda: list(PROFILES))
    pairs_per_cell: int = 40
    tol: float | None = None

    def __post_init__(self):
        if any(int(d) < 2 for d in self.dims):
            raise ConfigError("all dims must be >= 2")
        bad = [p for p in self.profiles if p not in PROFILES]
        if bad:
            raise ConfigError(f"unknown profiles {bad}; expected a subset of {list(PROFILES)}")
        if self.pairs_per_cell < 0:
            raise ConfigError("pairs_per_cell must be >= 0")
        if self.tol is not None and self.tol < 0:
            raise ConfigError("tol must be non-negative")


CHECK_HEADER = ["dim", "profile", "pair", "check", "lhs", "rhs", "slack", "verdict", "skipped_reason"]


def _check_row(prefix, c: Check):
    if c.skipped:
        return list(prefix) + [c.name, None, None, None, "skipped", c.skipped_reason]
    return list(prefix) + [c.name, c.lhs, c.rhs, c.slack, c.verdict, None]


def run_perturbation_suite(cfg: PerturbConfig, out: Path, extra_checks=()) -> int:
    """Generate pairs per (dim, profile) cell and record every inequality instance.

    ``extra_checks`` are appended verbatim (used to exercise the failure path).
    """
    _require_seed(cfg.seed)
    report = PerturbationReport()
    rows = []
    for d in sorted(int(x) for x in cfg.dims):
        for profile in sorted(cfg.profiles):
            for i in range(cfg.pairs_per_cell):
                rng = stream(cfg.seed, "perturb", d, profile, i)
                a1, a2 = random_operator_pair(rng, d, profile)
                rep = OperatorPair(a1, a2, cfg.tol).report()
                report.extend(rep.checks)
                rows.extend(_check_row((d, profile, i), c) for c in rep.checks)
    for c in extra_checks:
        report.checks.append(c)
        rows.append(_check_row(("", "injected", ""), c))
    write_csv(out, CHECK_HEADER, rows)
    summary = report.summary()
    write_json(summary_path(out), {"command": "perturb-suite", "seed": cfg.seed, **summary})
    return EXIT_OK if summary["failed"] == 0 else EXIT_FAIL


# ---------------------------------------------------------------------------
# spectrum / weyl-check / hausdorff

def _load(path):
    if path is None:
        raise ConfigError("an operator file is required")
    try:
        return load_operator(path)
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def run_spectrum(operator_file, out: Path) -> int:
    """Signed spectrum by deflation, compared entry by entry with the oracle."""
    op = _load(operator_file)
    spec = signed_spectrum(op)
    mine = spec.values()
    oracle = oracle_spectrum(op.entries)[0]
    diff = np.abs(mine - oracle)
    max_diff = float(diff.max())
    norm = operator_norm(op)
    ok = max_diff <= 1e-8 * max(norm, 1e-300) or max_diff == 0.0
    write_csv(out, ["index", "deflation", "oracle", "abs_diff"],
              [[k + 1, float(m), float(o), float(e)] for k, (m, o, e) in enumerate(zip(mine, oracle, diff))])
    write_json(summary_path(out), {
        "command": "spectrum",
        **spec.to_dict(),
        "operator_norm": norm,
        "oracle_max_diff": max_diff,
        "agrees": ok,
    })
    return EXIT_OK if ok else EXIT_FAIL


def _checks_summary(command, checks, extra=None):
    rep = PerturbationReport(list(checks))
    return {"command": command, **rep.summary(), **(extra or {})}


def run_weyl_check(a1_file, a2_file, p: int, q: int, out: Path, tol: float | None = None) -> int:
    if p < 1 or q < 1:
        raise ConfigError("p and q must be >= 1")
    a1, a2 = _load(a1_file), _load(a2_file)
    if a1.dim != a2.dim:
        raise ConfigError(f"dimension mismatch: {a1.dim} vs {a2.dim}")
    pair = OperatorPair(a1, a2, tol)
    checks = [pair.weyl_plus(p, q), pair.weyl_minus(p, q), *pair.norm_shift(p), *pair.two_sided(p),
              *pair.sandwich(p)]
    write_csv(out, CHECK_HEADER[3:], [_check_row((), c) for c in checks])
    summary = _checks_summary("weyl-check", checks, {"p": p, "q": q, "norm_A2": pair.norm2})
    write_json(summary_path(out), summary)
    return EXIT_OK if summary["failed"] == 0 else EXIT_FAIL


def run_hausdorff(a1_file, a2_file, out: Path, tol: float | None = None) -> int:
    a1, a2 = _load(a1_file), _load(a2_file)
    if a1.dim != a2.dim:
        raise ConfigError(f"dimension mismatch: {a1.dim} vs {a2.dim}")
    pair = OperatorPair(a1, a2, tol)
    h = pair.hausdorff()
    checks = [h, *pair.inclusions()]
    write_csv(out, CHECK_HEADER[3:], [_check_row((), c) for c in checks])
    summary = _checks_summary("hausdorff", checks, {"hausdorff_distance": h.lhs, "norm_A2": pair.norm2})
    write_json(summary_path(out), summary)
    return EXIT_OK if summary["failed"] == 0 else EXIT_FAIL
