"""Extremal eigenvalues of symmetric operators by constrained Rayleigh-quotient maximization.

Positive eigenvalues are found largest first as the sup of (Ax, x) over unit
x orthogonal to the eigenvectors already found; negative ones symmetrically
with inf. The search stops once the extremum is no longer strictly of the
requested sign.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "SymmetricOperator",
    "SignedSpectrum",
    "load_operator",
    "quadratic_form",
    "operator_norm",
    "default_tol_zero",
    "deflated_extremal",
    "signed_spectrum",
    "minmax_value",
    "orthonormalize",
    "decomposition_residual",
]

MAX_POWER_STEPS = 100_000
MAX_SQUARINGS = 64


@dataclass(frozen=True, eq=False)
class SymmetricOperator:
    """A real symmetric d x d matrix standing in for a compact self-adjoint operator."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"operator must be a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("operator has non-finite entries")
        diff = np.abs(a - a.T)
        worst = float(diff.max())
        if worst > 1e-12 * float(np.abs(a).max()):
            i, j = np.unravel_index(np.argmax(diff), a.shape)
            i, j = sorted((int(i), int(j)))
            raise ValueError(
                f"operator is not symmetric: entries[{i}][{j}] = {a[i, j]!r} "
                f"but entries[{j}][{i}] = {a[j, i]!r} (difference {worst:.3e})"
            )
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __add__(self, other):
        return SymmetricOperator(self.entries + _matrix(other))

    def __neg__(self):
        return SymmetricOperator(-self.entries)

    @classmethod
    def from_dict(cls, d: dict) -> "SymmetricOperator":
        unknown = set(d) - {"dim", "entries"}
        if unknown:
            raise ValueError(f"unknown operator fields: {sorted(unknown)}")
        dim = int(d["dim"])
        e = np.asarray(d["entries"], dtype=float)
        if e.size != dim * dim:
            raise ValueError(f"entries has {e.size} values, expected {dim * dim}")
        return cls(e.reshape(dim, dim))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "entries": self.entries.ravel().tolist()}


def load_operator(path) -> SymmetricOperator:
    """Read an operator from JSON ({dim, entries}) or from a headerless CSV matrix."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open(newline="") as fh:
            rows = [[float(x) for x in row] for row in csv.reader(fh) if row]
        return SymmetricOperator(np.array(rows))
    return SymmetricOperator.from_dict(json.loads(path.read_text()))


def _matrix(A) -> np.ndarray:
    if isinstance(A, SymmetricOperator):
        return A.entries
    a = np.asarray(A, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class SignedSpectrum:
    """Strictly positive eigenvalues (non-increasing) and strictly negative ones
    (non-decreasing), each repeated by multiplicity, plus the count of zeros."""

    pos: np.ndarray
    pos_vectors: np.ndarray
    neg: np.ndarray
    neg_vectors: np.ndarray
    zero_mult: int

    @property
    def dim(self) -> int:
        return self.pos.size + self.neg.size + self.zero_mult

    def values(self) -> np.ndarray:
        """All eigenvalues, zeros included, in descending order."""
        return np.concatenate([self.pos, np.zeros(self.zero_mult), self.neg[::-1]])

    def to_dict(self) -> dict:
        return {"pos": self.pos.tolist(), "neg": self.neg.tolist(), "zero_mult": int(self.zero_mult)}


def quadratic_form(A, x) -> float:
    a = _matrix(A)
    x = np.asarray(x, dtype=float)
    if x.shape != (a.shape[0],):
        raise ValueError(f"vector of shape {x.shape} does not match operator of dimension {a.shape[0]}")
    return float(x @ a @ x)


def operator_norm(A) -> float:
    """Spectral norm; for symmetric A this is sup over unit x of |(Ax, x)|."""
    a = _matrix(A)
    return float(np.linalg.norm(a, 2)) if a.size else 0.0


def default_tol_zero(A) -> float:
    return 1e-12 * (1.0 + operator_norm(A))


def _complement_basis(constraints: np.ndarray, d: int) -> np.ndarray:
    k = constraints.shape[1]
    if k == 0:
        return np.eye(d)
    q, _ = np.linalg.qr(constraints, mode="complete")
    return q[:, k:]


def _dominant_vector(M: np.ndarray, scale: float) -> np.ndarray:
    """Unit eigenvector for the largest eigenvalue of the PSD matrix M.

    Power iteration, except that the first 2^k steps are taken at once by
    squaring M k times; this separates eigenvalues that agree to many digits,
    which plain power iteration cannot do in any reasonable number of steps.
    The result is polished by ordinary power steps until successive Rayleigh
    quotients agree to 1e-13 * (1 + scale).
    """
    m = M.shape[0]
    norm = float(np.linalg.norm(M))
    if norm == 0.0:
        return np.eye(m)[:, 0]
    P = M / norm
    for _ in range(MAX_SQUARINGS):
        P2 = P @ P
        n2 = float(np.linalg.norm(P2))
        if n2 == 0.0:
            break
        P2 = P2 / n2
        P2 = 0.5 * (P2 + P2.T)
        done = float(np.linalg.norm(P2 - P)) <= 1e-14
        P = P2
        if done:
            break
    x = P[:, int(np.argmax(np.linalg.norm(P, axis=0)))]
    x = x / np.linalg.norm(x)
    rq = float(x @ M @ x)
    for _ in range(MAX_POWER_STEPS):
        y = M @ x
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            return x
        x = y / ny
        new = float(x @ M @ x)
        if abs(new - rq) <= 1e-13 * (1.0 + scale):
            return x
        rq = new
    raise RuntimeError("power iteration did not converge")


def _parse_sign(sign) -> int:
    if sign in ("+", 1, +1.0):
        return 1
    if sign in ("-", -1, -1.0):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def deflated_extremal(A, sign="+", constraints=(), tol_zero: float | None = None):
    """Extremize (Ax, x) over unit x orthogonal to ``constraints``.

    ``sign='+'`` maximizes, ``sign='-'`` minimizes. Returns ``(mu, phi)`` with
    phi a unit eigenvector of A for mu, or ``None`` when the extremum is not
    strictly positive (resp. negative) beyond ``tol_zero``: no further
    eigenvalue of that sign exists.
    """
    a = _matrix(A)
    d = a.shape[0]
    sgn = _parse_sign(sign)
    c = np.asarray(constraints, dtype=float).reshape(-1, d).T if len(constraints) else np.zeros((d, 0))
    if c.shape[1] >= d:
        raise ValueError(f"{c.shape[1]} constraints leave no room in dimension {d}")
    if c.shape[1] and np.max(np.abs(c.T @ c - np.eye(c.shape[1]))) > 1e-8:
        raise ValueError("constraints must be orthonormal")
    scale = operator_norm(a)
    if tol_zero is None:
        tol_zero = 1e-12 * (1.0 + scale)
    if scale == 0.0:
        return None
    basis = _complement_basis(c, d)
    b = basis.T @ a @ basis
    b = 0.5 * (b + b.T)
    # shift so the wanted end of the spectrum is the dominant (largest) eigenvalue
    shifted = sgn * b + scale * np.eye(b.shape[0])
    y = _dominant_vector(shifted, scale)
    phi = basis @ y
    phi /= np.linalg.norm(phi)
    mu = float(phi @ a @ phi)
    if sgn * mu <= tol_zero:
        return None
    return mu, phi


def signed_spectrum(A, tol_zero: float | None = None) -> SignedSpectrum:
    """Positive and negative eigenpairs by repeated deflated extremization."""
    a = _matrix(A)
    d = a.shape[0]
    if tol_zero is None:
        tol_zero = default_tol_zero(a)
    if tol_zero < 0:
        raise ValueError("tol_zero must be non-negative")
    found = {}
    done = []
    for sgn in (1, -1):
        vals, vecs = [], []
        # negative eigenvectors are also kept orthogonal to the positive ones;
        # the minimizer lies in the negative eigenspace, so the value is unchanged
        while len(done) + len(vecs) < d:
            res = deflated_extremal(a, sgn, done + vecs, tol_zero)
            if res is None:
                break
            vals.append(res[0])
            vecs.append(res[1])
        found[sgn] = (np.array(vals), np.array(vecs).T.reshape(d, len(vecs)))
        done = done + vecs
    pos, pos_v = found[1]
    neg, neg_v = found[-1]
    zero_mult = d - pos.size - neg.size
    if zero_mult < 0:
        raise RuntimeError("positive and negative eigenvalue counts exceed the dimension")
    return SignedSpectrum(pos, pos_v, neg, neg_v, zero_mult)


def orthonormalize(vectors, d: int, reject_tol: float = 1e-10) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Returns a d x k matrix with orthonormal columns; raises if a vector is
    (nearly) in the span of its predecessors.
    """
    q = []
    for i, v in enumerate(vectors):
        v = np.array(v, dtype=float)
        if v.shape != (d,):
            raise ValueError(f"vector {i} has shape {v.shape}, expected ({d},)")
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            raise ValueError(f"vector {i} is zero")
        w = v / nv
        for _ in range(2):
            for u in q:
                w = w - (u @ w) * u
        nw = float(np.linalg.norm(w))
        if nw < reject_tol:
            raise ValueError(f"vector {i} is linearly dependent on the previous ones")
        q.append(w / nw)
    return np.array(q).T.reshape(d, len(q))


def minmax_value(A, h_list=()) -> float:
    """sup of (Ax, x) over unit x orthogonal to every h in ``h_list``."""
    a = _matrix(A)
    d = a.shape[0]
    h = orthonormalize(list(h_list), d)
    if h.shape[1] >= d:
        raise ValueError("constraints span the whole space")
    basis = _complement_basis(h, d)
    b = basis.T @ a @ basis
    return float(np.linalg.eigvalsh(0.5 * (b + b.T))[-1])


def decomposition_residual(A, x, spectrum: SignedSpectrum | None = None) -> float:
    """|| Ax - sum_k mu_k (x, phi_k) phi_k || over the nonzero eigenpairs."""
    a = _matrix(A)
    x = np.asarray(x, dtype=float)
    if spectrum is None:
        spectrum = signed_spectrum(a)
    approx = np.zeros_like(x)
    for mu, vecs in ((spectrum.pos, spectrum.pos_vectors), (spectrum.neg, spectrum.neg_vectors)):
        if mu.size:
            approx += vecs @ (mu * (vecs.T @ x))
    return float(np.linalg.norm(a @ x - approx))
