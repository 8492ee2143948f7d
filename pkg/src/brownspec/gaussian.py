"""Centered Gaussian measures on a finite-dimensional normed space."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "NormSpec",
    "GaussianMeasure",
    "MomentEstimate",
    "pivoted_cholesky",
    "sample",
    "scale_measure",
    "empirical_q_moment",
    "load_measure",
]

NORM_KINDS = ("l1", "l2", "linf", "weighted-sup")


@dataclass(frozen=True)
class NormSpec:
    """A norm q on R^d.

    ``weights`` is only used (and required) for ``weighted-sup``, where
    q(x) = max_i w_i |x_i|.
    """

    kind: str = "l2"
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in NORM_KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}; expected one of {NORM_KINDS}")
        if self.kind == "weighted-sup":
            if not self.weights:
                raise ValueError("weighted-sup norm needs weights")
            w = tuple(float(v) for v in self.weights)
            if any(not (v > 0 and math.isfinite(v)) for v in w):
                raise ValueError("weighted-sup weights must be positive and finite")
            object.__setattr__(self, "weights", w)
        elif self.weights is not None:
            raise ValueError(f"weights are not used by the {self.kind} norm")

    def __call__(self, x) -> np.ndarray | float:
        """Evaluate q along the last axis of ``x``."""
        x = np.asarray(x, dtype=float)
        if self.kind == "l2":
            # rescale so tiny or huge entries neither underflow nor overflow when squared
            m = np.abs(x).max(axis=-1, keepdims=True) if x.shape[-1] else np.ones(x.shape[:-1] + (1,))
            m = np.where(m > 0, m, 1.0)
            out = m[..., 0] * np.linalg.norm(x / m, axis=-1)
        elif self.kind == "l1":
            out = np.abs(x).sum(axis=-1)
        elif self.kind == "linf":
            out = np.abs(x).max(axis=-1) if x.shape[-1] else np.zeros(x.shape[:-1])
        else:
            w = np.asarray(self.weights)
            if x.shape[-1] != w.size:
                raise ValueError(f"weighted-sup norm has {w.size} weights, vector has {x.shape[-1]} entries")
            out = (w * np.abs(x)).max(axis=-1)
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.weights is not None:
            d["weights"] = list(self.weights)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "NormSpec":
        unknown = set(d) - {"kind", "weights"}
        if unknown:
            raise ValueError(f"unknown norm fields: {sorted(unknown)}")
        w = d.get("weights")
        return cls(kind=d.get("kind", "l2"), weights=tuple(w) if w is not None else None)


def pivoted_cholesky(cov: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    """Return L (d x r) with L @ L.T == cov, r the numerical rank.

    Outer-product Cholesky with diagonal pivoting; stops once the largest
    remaining pivot drops below ``rel_tol * max(diag(cov))``. Raises if the
    residual has a clearly negative diagonal (cov not PSD).
    """
    cov = np.asarray(cov, dtype=float)
    d = cov.shape[0]
    scale = float(np.max(np.abs(np.diag(cov)))) if d else 0.0
    if scale == 0.0:
        if np.any(cov != 0):
            raise ValueError("covariance has zero diagonal but nonzero off-diagonal entries")
        return np.zeros((d, 0))
    resid = cov.copy()
    cols = []
    for _ in range(d):
        diag = np.diag(resid)
        if diag.min() < -1e-10 * scale:
            raise ValueError("covariance is not positive semidefinite")
        i = int(np.argmax(diag))
        piv = diag[i]
        if piv <= rel_tol * scale:
            break
        col = resid[:, i] / math.sqrt(piv)
        cols.append(col)
        resid = resid - np.outer(col, col)
    if np.max(np.abs(resid)) > 1e-8 * scale:
        raise ValueError("covariance is not positive semidefinite")
    return np.column_stack(cols) if cols else np.zeros((d, 0))


@dataclass(frozen=True, eq=False)
class GaussianMeasure:
    """Centered Gaussian law with covariance ``covariance`` and norm ``norm``.

    Degenerate covariances are allowed; ``factor`` then has fewer columns than
    ``dim`` and samples live in its range.
    """

    covariance: np.ndarray
    norm: NormSpec = field(default_factory=NormSpec)
    factor: np.ndarray | None = None

    def __post_init__(self):
        cov = np.array(self.covariance, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] < 1:
            raise ValueError(f"covariance must be a non-empty square matrix, got shape {cov.shape}")
        if not np.all(np.isfinite(cov)):
            raise ValueError("covariance has non-finite entries")
        amax = float(np.max(np.abs(cov)))
        asym = float(np.max(np.abs(cov - cov.T)))
        if asym > 1e-12 * amax:
            i, j = np.unravel_index(np.argmax(np.abs(cov - cov.T)), cov.shape)
            raise ValueError(f"covariance not symmetric: |S[{i},{j}] - S[{j},{i}]| = {asym:.3e}")
        cov = 0.5 * (cov + cov.T)
        if self.norm.kind == "weighted-sup" and len(self.norm.weights) != cov.shape[0]:
            raise ValueError("norm weights do not match the dimension")
        if self.factor is None:
            fac = pivoted_cholesky(cov)
        else:
            fac = np.array(self.factor, dtype=float).reshape(cov.shape[0], -1)
        recon = fac @ fac.T
        if amax > 0 and np.max(np.abs(recon - cov)) > 1e-10 * amax:
            raise ValueError("factor does not reproduce the covariance")
        cov.setflags(write=False)
        fac.setflags(write=False)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "factor", fac)

    @property
    def dim(self) -> int:
        return self.covariance.shape[0]

    @property
    def rank(self) -> int:
        """Dimension of the support."""
        return self.factor.shape[1]

    @classmethod
    def identity(cls, dim: int, norm: NormSpec | None = None) -> "GaussianMeasure":
        return cls(np.eye(dim), norm or NormSpec())

    @classmethod
    def point_mass(cls, dim: int, norm: NormSpec | None = None) -> "GaussianMeasure":
        return cls(np.zeros((dim, dim)), norm or NormSpec())

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianMeasure":
        unknown = set(d) - {"dim", "covariance", "norm"}
        if unknown:
            raise ValueError(f"unknown measure fields: {sorted(unknown)}")
        dim = int(d["dim"])
        cov = np.asarray(d["covariance"], dtype=float)
        if cov.size != dim * dim:
            raise ValueError(f"covariance has {cov.size} entries, expected {dim * dim}")
        norm = NormSpec.from_dict(d.get("norm", {"kind": "l2"}))
        return cls(cov.reshape(dim, dim), norm)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "covariance": self.covariance.ravel().tolist(),
            "norm": self.norm.to_dict(),
        }


def load_measure(path) -> GaussianMeasure:
    return GaussianMeasure.from_dict(json.loads(Path(path).read_text()))


def sample(gamma: GaussianMeasure, rng: np.random.Generator, size: int | tuple | None = None) -> np.ndarray:
    """Draw L @ z with z standard normal in R^rank.

    With ``size`` given the result has shape ``(*size, dim)``.
    """
    shape = () if size is None else ((size,) if isinstance(size, int) else tuple(size))
    z = rng.standard_normal(shape + (gamma.rank,))
    return z @ gamma.factor.T


def scale_measure(gamma: GaussianMeasure, s: float) -> GaussianMeasure:
    """The law of sqrt(s) G, i.e. covariance s * Sigma; s = 0 gives the point mass at 0."""
    if not s >= 0:
        raise ValueError(f"scale must be non-negative, got {s}")
    if s == 0:
        return GaussianMeasure(np.zeros_like(gamma.covariance), gamma.norm, np.zeros((gamma.dim, 0)))
    return GaussianMeasure(s * gamma.covariance, gamma.norm, math.sqrt(s) * gamma.factor)


@dataclass(frozen=True)
class MomentEstimate:
    estimate: float
    stderr: float
    n: int

    def conservative(self, n_se: float = 3.0) -> float:
        """Upper moment value used by certificates: estimate + n_se standard errors."""
        return self.estimate + n_se * self.stderr


def empirical_q_moment(gamma: GaussianMeasure, r: float, n: int, rng: np.random.Generator,
                       chunk: int = 65536) -> MomentEstimate:
    """Monte Carlo estimate of E q(G)^r with its standard error."""
    if n < 1:
        raise ValueError("need at least one sample")
    if r <= 0:
        raise ValueError("moment order must be positive")
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        v = np.asarray(gamma.norm(sample(gamma, rng, m))) ** r
        total += float(v.sum())
        total_sq += float((v * v).sum())
        done += m
    mean = total / n
    if n > 1:
        var = max(total_sq - n * mean * mean, 0.0) / (n - 1)
        se = math.sqrt(var / n)
    else:
        se = 0.0
    return MomentEstimate(mean, se, n)
