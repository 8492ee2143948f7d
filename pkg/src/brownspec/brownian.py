"""Dyadic piecewise-linear approximations of gamma-Brownian motion.

A level-N path on [0, b] stores the scaled random walk S_k / sqrt(2^N) at the
grid points k / 2^N and is linear in between.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from brownspec.gaussian import GaussianMeasure, NormSpec, empirical_q_moment, sample
from brownspec.streams import stream

__all__ = [
    "DyadicPath",
    "build_path",
    "refine",
    "coarsen",
    "sup_deviation",
    "increment_bound",
    "tail_certificate",
    "DeviationResult",
    "deviation_experiment",
    "IncrementStats",
    "increment_statistics",
    "support_check",
    "write_path_csv",
]


@dataclass(frozen=True, eq=False)
class DyadicPath:
    level: int
    horizon: int
    values: np.ndarray
    norm: NormSpec = field(default_factory=NormSpec)

    def __post_init__(self):
        if self.level < 0 or self.horizon < 1:
            raise ValueError("need level >= 0 and horizon >= 1")
        vals = np.array(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        n = self.horizon * 2**self.level + 1
        if vals.shape[0] != n:
            raise ValueError(f"level {self.level}, horizon {self.horizon} needs {n} grid values, got {vals.shape[0]}")
        if np.any(vals[0] != 0):
            raise ValueError("path must start at 0")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.shape[0]) / 2.0**self.level

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=0)

    def __call__(self, t):
        """Evaluate the path at time(s) t in [0, horizon]."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.horizon):
            raise ValueError(f"t outside [0, {self.horizon}]")
        u = t * 2.0**self.level
        last = self.values.shape[0] - 1
        k = np.minimum(np.floor(u).astype(int), last - 1)
        w = (u - k)[..., None]
        # at grid points w is 0 or 1 and the stored value comes back exactly
        return (1 - w) * self.values[k] + w * self.values[k + 1]


def build_path(gamma: GaussianMeasure, b: int, N: int, rng: np.random.Generator) -> DyadicPath:
    """X_N on [0, b]: values[k] = (G_1 + ... + G_k) / sqrt(2^N), G_j iid gamma."""
    if b < 1 or N < 0:
        raise ValueError("need b >= 1 and N >= 0")
    g = sample(gamma, rng, b * 2**N)
    vals = np.zeros((b * 2**N + 1, gamma.dim))
    np.cumsum(g, axis=0, out=vals[1:])
    vals[1:] /= math.sqrt(2.0**N)
    return DyadicPath(N, b, vals, gamma.norm)


def refine(path: DyadicPath) -> DyadicPath:
    """Same piecewise-linear function written on the next finer grid."""
    v = path.values
    fine = np.empty((2 * v.shape[0] - 1, v.shape[1]))
    fine[::2] = v
    fine[1::2] = 0.5 * (v[:-1] + v[1:])
    return DyadicPath(path.level + 1, path.horizon, fine, path.norm)


def coarsen(path: DyadicPath) -> DyadicPath:
    """Interpolate the path on the next coarser dyadic grid (keeps even-index values)."""
    if path.level < 1:
        raise ValueError("cannot coarsen a level-0 path")
    return DyadicPath(path.level - 1, path.horizon, path.values[::2], path.norm)


def _midpoint_gaps(path: DyadicPath) -> np.ndarray:
    v = path.values
    return v[1::2] - 0.5 * (v[:-1:2] + v[2::2])


def sup_deviation(path: DyadicPath) -> float:
    """sup over [0, b] of q(X_N(t) - coarsen(X_N)(t)).

    The difference is piecewise linear on the fine grid and vanishes on the
    coarse grid, so the supremum is attained at an odd fine-grid index.
    """
    if path.level < 1:
        raise ValueError("sup deviation needs level >= 1")
    return float(np.max(path.norm(_midpoint_gaps(path))))


def increment_bound(path: DyadicPath) -> float:
    """2 * max_k q(X(k/2^N) - X((k-1)/2^N)), which dominates sup_deviation."""
    return 2.0 * float(np.max(path.norm(path.increments)))


def tail_certificate(b: float, N: int, delta: float, r: float, m_r: float) -> float:
    """Markov bound b 2^{N(1 - r/2)} (2/delta)^r m_r on Q(sup deviation >= delta)."""
    if not delta > 0 or not r > 0:
        raise ValueError("need delta > 0 and r > 0")
    if m_r < 0:
        raise ValueError("moment must be non-negative")
    if m_r == 0:
        return 0.0
    return b * 2.0 ** (N * (1 - r / 2)) * (2.0 / delta) ** r * m_r


@dataclass(frozen=True)
class DeviationResult:
    N: int
    delta: float
    certificate: float
    empirical_freq: float
    stderr: float
    verdict: bool
    m_r: float
    trials: int


def deviation_experiment(gamma: GaussianMeasure, b: int, N: int, delta: float, trials: int, seed: int,
                         *, r: float = 4.0, m_r: float | None = None, moment_samples: int = 100_000,
                         ) -> DeviationResult:
    """Compare the empirical frequency of {sup_deviation >= delta} with the tail certificate.

    Trial i draws its path from the sub-stream (seed, "bm-path", N, i). When
    ``m_r`` is not given it is estimated and padded by 3 standard errors.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if N < 1:
        raise ValueError("deviation needs N >= 1")
    if m_r is None:
        m_r = empirical_q_moment(gamma, r, moment_samples, stream(seed, "moment", int(round(1e6 * r)))).conservative()
    cert = tail_certificate(b, N, delta, r, m_r)
    hits = 0
    for i in range(trials):
        path = build_path(gamma, b, N, stream(seed, "bm-path", N, i))
        hits += sup_deviation(path) >= delta
    p = hits / trials
    se = math.sqrt(p * (1 - p) / trials)
    return DeviationResult(N, delta, cert, p, se, p <= cert + 3 * se, m_r, trials)


@dataclass(frozen=True)
class IncrementStats:
    intervals: list
    mean: list
    cov: list
    cov_se: list
    expected_cov: list
    cross_cov: dict
    cross_se: dict
    trials: int

    def cov_z(self, i: int) -> float:
        """Largest |empirical - expected| / se over the entries of interval i's covariance."""
        return _max_z(self.cov[i] - self.expected_cov[i], self.cov_se[i])

    def cross_z(self, i: int, j: int) -> float:
        return _max_z(self.cross_cov[(i, j)], self.cross_se[(i, j)])


def _max_z(diff, se):
    diff = np.abs(np.asarray(diff))
    se = np.asarray(se)
    z = np.where(se > 0, diff / np.where(se > 0, se, 1), np.where(diff > 0, np.inf, 0.0))
    return float(z.max())


def _check_intervals(intervals, b, N):
    out = []
    for s, t in intervals:
        s, t = float(s), float(t)
        if not s < t:
            raise ValueError(f"interval [{s}, {t}] is empty")
        if s < 0 or t > b:
            raise ValueError(f"interval [{s}, {t}] not inside [0, {b}]")
        for x in (s, t):
            if not (x * 2.0**N).is_integer():
                raise ValueError(f"endpoint {x} is not dyadic at level {N}")
        out.append((s, t))
    srt = sorted(out)
    for (s0, t0), (s1, t1) in zip(srt, srt[1:]):
        if s1 < t0:
            raise ValueError(f"intervals [{s0}, {t0}] and [{s1}, {t1}] overlap")
    return out


def increment_statistics(gamma: GaussianMeasure, b: int, N: int, intervals, trials: int, seed: int,
                         ) -> IncrementStats:
    """Empirical law of the increments X(t) - X(s) over disjoint dyadic intervals.

    Standard errors come from the sample spread of the centred products, so
    ``cov_z``/``cross_z`` are CLT z-scores.
    """
    ivs = _check_intervals(intervals, b, N)
    if trials < 2:
        raise ValueError("need at least two trials")
    scale = 2**N
    idx = [(int(round(s * scale)), int(round(t * scale))) for s, t in ivs]
    inc = np.empty((len(ivs), trials, gamma.dim))
    for i in range(trials):
        v = build_path(gamma, b, N, stream(seed, "bm-incr", N, i)).values
        for j, (a, c) in enumerate(idx):
            inc[j, i] = v[c] - v[a]
    centred = inc - inc.mean(axis=1, keepdims=True)

    def cov_and_se(x, y):
        prod = x[:, :, None] * y[:, None, :]
        return prod.sum(axis=0) / (trials - 1), prod.std(axis=0, ddof=1) / math.sqrt(trials)

    covs, ses, cross, cross_se = [], [], {}, {}
    for j in range(len(ivs)):
        c, se = cov_and_se(centred[j], centred[j])
        covs.append(c)
        ses.append(se)
    for j in range(len(ivs)):
        for k in range(j + 1, len(ivs)):
            cross[(j, k)], cross_se[(j, k)] = cov_and_se(centred[j], centred[k])
    return IncrementStats(
        intervals=ivs,
        mean=[inc[j].mean(axis=0) for j in range(len(ivs))],
        cov=covs,
        cov_se=ses,
        expected_cov=[(t - s) * gamma.covariance for s, t in ivs],
        cross_cov=cross,
        cross_se=cross_se,
        trials=trials,
    )


def _range_projector(gamma: GaussianMeasure) -> np.ndarray:
    w, v = np.linalg.eigh(gamma.covariance)
    keep = w > 1e-12 * max(float(np.max(np.abs(w))), 1e-300)
    basis = v[:, keep]
    return basis @ basis.T


def support_check(gamma: GaussianMeasure, paths) -> float:
    """Max Euclidean distance from any grid value of ``paths`` to range(Sigma)."""
    if gamma.rank >= gamma.dim:
        raise ValueError("covariance has full rank; the support check is vacuous")
    proj = _range_projector(gamma)
    worst = 0.0
    for p in paths:
        v = p.values
        resid = v - v @ proj
        worst = max(worst, float(np.max(np.linalg.norm(resid, axis=1))))
    return worst


def write_path_csv(path: DyadicPath, fh) -> None:
    """Write columns t, x_1..x_d with 17 significant digits."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t"] + [f"x_{i + 1}" for i in range(path.dim)])
    for t, row in zip(path.times, path.values):
        w.writerow([format(t, ".17g")] + [format(x, ".17g") for x in row])
