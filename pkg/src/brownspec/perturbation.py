"""Eigenvalue comparison inequalities for A = A1 + A2.

All eigenvalues used here come from the Jacobi oracle, never from the
deflation solver, so a bug in one cannot hide a bug in the other.

Every check is stored in the form ``lhs <= rhs``; inequalities of the
opposite direction are rewritten by swapping sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from brownspec.jacobi import oracle_spectrum
from brownspec.spectral import SymmetricOperator, _matrix

__all__ = [
    "Check",
    "PerturbationReport",
    "SignedValues",
    "signed_values",
    "SpectrumSet",
    "directed_distance",
    "spectrum_inclusion",
    "hausdorff",
    "OperatorPair",
    "weyl_plus",
    "weyl_minus",
    "norm_shift_bounds",
    "two_sided_bounds",
    "sandwich_bounds",
    "signed_inclusion_suite",
    "hausdorff_check",
    "pair_report",
    "PROFILES",
    "random_operator_pair",
]

PROFILES = ("generic", "sign-definite", "rank-deficient", "near-degenerate", "tiny-perturbation")


@dataclass(frozen=True)
class Check:
    name: str
    lhs: float
    rhs: float
    verdict: str
    skipped_reason: str | None = None

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def skipped(self) -> bool:
        return self.verdict == "skipped"


def _compare(name, lhs, rhs, tol, strict=False) -> Check:
    ok = lhs < rhs + tol if strict else lhs <= rhs + tol
    return Check(name, float(lhs), float(rhs), "pass" if ok else "fail")


def _skip(name, reason) -> Check:
    return Check(name, math.nan, math.nan, "skipped", reason)


@dataclass
class PerturbationReport:
    checks: list = field(default_factory=list)

    def extend(self, checks) -> None:
        self.checks.extend(checks)

    def summary(self) -> dict:
        done = [c for c in self.checks if not c.skipped]
        return {
            "total": len(self.checks),
            "passed": sum(c.verdict == "pass" for c in done),
            "skipped": len(self.checks) - len(done),
            "failed": sum(c.verdict == "fail" for c in done),
            "worst_slack": min((c.slack for c in done), default=None),
        }

    @property
    def failed(self) -> list:
        return [c for c in self.checks if c.verdict == "fail"]


@dataclass(frozen=True)
class SignedValues:
    """Oracle eigenvalues split by sign; ``pos`` descending, ``neg`` ascending."""

    values: np.ndarray
    pos: np.ndarray
    neg: np.ndarray
    norm: float

    def plus(self, k: int):
        """k-th strictly positive eigenvalue (1-based) or None."""
        return float(self.pos[k - 1]) if 1 <= k <= self.pos.size else None

    def minus(self, k: int):
        return float(self.neg[k - 1]) if 1 <= k <= self.neg.size else None

    def __neg__(self) -> "SignedValues":
        return SignedValues(-self.values[::-1], -self.neg, -self.pos, self.norm)


def signed_values(A, tol_zero: float | None = None) -> SignedValues:
    w = oracle_spectrum(_matrix(A))[0]
    norm = float(np.max(np.abs(w))) if w.size else 0.0
    if tol_zero is None:
        tol_zero = 1e-12 * (1.0 + norm)
    return SignedValues(w, w[w > tol_zero], w[w < -tol_zero][::-1], norm)


@dataclass(frozen=True)
class SpectrumSet:
    points: tuple
    augmented: bool = False

    def __post_init__(self):
        pts = tuple(float(x) for x in np.asarray(self.points, dtype=float).ravel())
        if self.augmented and 0.0 not in pts:
            pts = pts + (0.0,)
        object.__setattr__(self, "points", pts)

    @classmethod
    def with_zero(cls, points) -> "SpectrumSet":
        return cls(tuple(np.asarray(points, dtype=float).ravel()), augmented=True)

    def __len__(self):
        return len(self.points)


def _points(S) -> np.ndarray:
    return np.asarray(S.points if isinstance(S, SpectrumSet) else S, dtype=float).ravel()


def directed_distance(S, T) -> float:
    """sup over s in S of the distance from s to T (0 for empty S)."""
    s, t = _points(S), np.sort(_points(T))
    if s.size == 0:
        return 0.0
    if t.size == 0:
        return math.inf
    i = np.searchsorted(t, s)
    left = np.abs(s - t[np.clip(i - 1, 0, t.size - 1)])
    right = np.abs(s - t[np.clip(i, 0, t.size - 1)])
    return float(np.max(np.minimum(left, right)))


def spectrum_inclusion(S, T, delta: float) -> bool:
    """True iff every point of S lies within strict distance delta of T."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    return directed_distance(S, T) < delta


def hausdorff(S, T) -> float:
    if len(_points(S)) == 0 or len(_points(T)) == 0:
        raise ValueError("Hausdorff distance needs two non-empty sets")
    return max(directed_distance(S, T), directed_distance(T, S))


class OperatorPair:
    """Spectra of A1, A2 and A = A1 + A2, computed once and shared by all checks."""

    def __init__(self, A1, A2, tol: float | None = None):
        self.a1 = _matrix(A1)
        self.a2 = _matrix(A2)
        if self.a1.shape != self.a2.shape:
            raise ValueError(f"dimension mismatch: {self.a1.shape} vs {self.a2.shape}")
        self.a = self.a1 + self.a2
        self._tol = tol

    @cached_property
    def s1(self) -> SignedValues:
        return signed_values(self.a1)

    @cached_property
    def s2(self) -> SignedValues:
        return signed_values(self.a2)

    @cached_property
    def s(self) -> SignedValues:
        return signed_values(self.a)

    @property
    def norm2(self) -> float:
        return self.s2.norm

    @property
    def scale(self) -> float:
        return max(self.s1.norm, self.s2.norm, 1.0)

    @property
    def tol(self) -> float:
        return 1e-9 * self.scale if self._tol is None else self._tol

    def negated(self) -> "OperatorPair":
        """The pair (-A1, -A2), reusing the spectra already computed."""
        out = OperatorPair(-self.a1, -self.a2, self._tol)
        for name in ("s1", "s2", "s"):
            if name in self.__dict__:
                out.__dict__[name] = -self.__dict__[name]
        return out

    def weyl_plus(self, p: int, q: int) -> Check:
        name = f"weyl_plus p={p} q={q}"
        lhs = self.s.plus(p + q - 1)
        a, b = self.s1.plus(p), self.s2.plus(q)
        if lhs is None or a is None or b is None:
            return _skip(name, "a required strictly positive eigenvalue does not exist")
        return _compare(name, lhs, a + b, self.tol)

    def weyl_minus(self, p: int, q: int) -> Check:
        name = f"weyl_minus p={p} q={q}"
        rhs = self.s.minus(p + q - 1)
        a, b = self.s1.minus(p), self.s2.minus(q)
        if rhs is None or a is None or b is None:
            return _skip(name, "a required strictly negative eigenvalue does not exist")
        return _compare(name, a + b, rhs, self.tol)

    def norm_shift(self, p: int) -> list:
        out = []
        mu, mu1 = self.s.plus(p), self.s1.plus(p)
        name = f"norm_shift_plus p={p}"
        if mu is None or mu1 is None:
            out.append(_skip(name, "p-th strictly positive eigenvalue missing for A or A1"))
        else:
            out.append(_compare(name, mu, mu1 + self.norm2, self.tol))
        mu, mu1 = self.s.minus(p), self.s1.minus(p)
        name = f"norm_shift_minus p={p}"
        if mu is None or mu1 is None:
            out.append(_skip(name, "p-th strictly negative eigenvalue missing for A or A1"))
        else:
            out.append(_compare(name, mu1 - self.norm2, mu, self.tol))
        return out

    def two_sided(self, p: int) -> list:
        out = []
        mu, mu1 = self.s.plus(p), self.s1.plus(p)
        name = f"two_sided_plus p={p}"
        if mu is None or mu1 is None:
            out.append(_skip(name, "p-th strictly positive eigenvalue missing for A or A1"))
        else:
            out.append(_compare(name, abs(mu - mu1), self.norm2, self.tol))
        mu, mu1 = self.s.minus(p), self.s1.minus(p)
        name = f"two_sided_minus p={p}"
        if mu is None or mu1 is None:
            out.append(_skip(name, "p-th strictly negative eigenvalue missing for A or A1"))
        else:
            # max of the top eigenvalues of A2 and -A2; a missing one contributes nothing
            top = max([v for v in (self.s2.plus(1), -self.s2.minus(1) if self.s2.minus(1) is not None else None)
                       if v is not None], default=0.0)
            out.append(_compare(name, abs(mu - mu1), top, self.tol))
            out.append(_compare(f"two_sided_minus_norm p={p}", top, self.norm2, self.tol))
        return out

    def sandwich(self, p: int) -> list:
        """mu_1^-(A2) <= mu_p^{+-}(A) - mu_p^{+-}(A1) <= mu_1^+(A2), by sign and side."""
        out = []
        top, bottom = self.s2.plus(1), self.s2.minus(1)
        for label, mu, mu1 in (("plus", self.s.plus(p), self.s1.plus(p)),
                               ("minus", self.s.minus(p), self.s1.minus(p))):
            for side, bound in (("upper", top), ("lower", bottom)):
                name = f"sandwich_{label}_{side} p={p}"
                if mu is None or mu1 is None or bound is None:
                    out.append(_skip(name, "a required signed eigenvalue does not exist"))
                elif side == "upper":
                    out.append(_compare(name, mu - mu1, bound, self.tol))
                else:
                    out.append(_compare(name, bound, mu - mu1, self.tol))
        return out

    def inclusions(self, tol: float | None = None) -> list:
        """The four signed spectral inclusions with delta = ||A2|| + tol.

        lhs is the directed distance, rhs is ||A2||; pass means the inclusion
        holds for the open delta-neighbourhood.
        """
        tol = self.tol if tol is None else tol
        delta = self.norm2 + tol
        cases = (
            ("inclusion_pos A in A1", self.s.pos, self.s1.pos),
            ("inclusion_pos A1 in A", self.s1.pos, self.s.pos),
            ("inclusion_neg A in A1", self.s.neg, self.s1.neg),
            ("inclusion_neg A1 in A", self.s1.neg, self.s.neg),
        )
        out = []
        for name, src, dst in cases:
            target = SpectrumSet.with_zero(dst)
            dist = directed_distance(src, target)
            ok = spectrum_inclusion(src, target, delta)
            out.append(Check(name, dist, self.norm2, "pass" if ok else "fail"))
        return out

    def hausdorff(self, tol: float | None = None) -> Check:
        tol = self.tol if tol is None else tol
        dh = hausdorff(SpectrumSet.with_zero(self.s.values), SpectrumSet.with_zero(self.s1.values))
        return _compare("hausdorff", dh, self.norm2, tol)

    def report(self) -> PerturbationReport:
        rep = PerturbationReport()
        for p in range(1, self.s1.pos.size + 1):
            for q in range(1, self.s2.pos.size + 1):
                rep.checks.append(self.weyl_plus(p, q))
        for p in range(1, self.s1.neg.size + 1):
            for q in range(1, self.s2.neg.size + 1):
                rep.checks.append(self.weyl_minus(p, q))
        n = max(self.s.pos.size, self.s1.pos.size, self.s.neg.size, self.s1.neg.size)
        for p in range(1, n + 1):
            rep.extend(self.norm_shift(p))
            rep.extend(self.two_sided(p))
            rep.extend(self.sandwich(p))
        rep.extend(self.inclusions())
        rep.checks.append(self.hausdorff())
        return rep


def _check_index(k: int, name: str):
    if k < 1:
        raise ValueError(f"{name} must be >= 1, got {k}")


def weyl_plus(A1, A2, p: int, q: int, tol: float | None = None) -> Check:
    _check_index(p, "p")
    _check_index(q, "q")
    return OperatorPair(A1, A2, tol).weyl_plus(p, q)


def weyl_minus(A1, A2, p: int, q: int, tol: float | None = None) -> Check:
    _check_index(p, "p")
    _check_index(q, "q")
    return OperatorPair(A1, A2, tol).weyl_minus(p, q)


def norm_shift_bounds(A1, A2, p: int, tol: float | None = None) -> list:
    _check_index(p, "p")
    return OperatorPair(A1, A2, tol).norm_shift(p)


def two_sided_bounds(A1, A2, p: int, tol: float | None = None) -> list:
    _check_index(p, "p")
    return OperatorPair(A1, A2, tol).two_sided(p)


def sandwich_bounds(A1, A2, p: int, tol: float | None = None) -> list:
    _check_index(p, "p")
    return OperatorPair(A1, A2, tol).sandwich(p)


def signed_inclusion_suite(A1, A2, tol: float | None = None) -> list:
    return OperatorPair(A1, A2, tol).inclusions()


def hausdorff_check(A1, A2, tol: float | None = None) -> Check:
    return OperatorPair(A1, A2, tol).hausdorff()


def pair_report(A1, A2, tol: float | None = None) -> PerturbationReport:
    return OperatorPair(A1, A2, tol).report()


def _orthogonal(rng, d):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def _from_eigs(rng, eigs):
    q = _orthogonal(rng, len(eigs))
    m = (q * eigs) @ q.T
    return 0.5 * (m + m.T)


def _goe(rng, d):
    g = rng.standard_normal((d, d))
    return (g + g.T) / math.sqrt(2 * d)


def random_operator_pair(rng: np.random.Generator, d: int, profile: str = "generic"):
    """A random symmetric pair (A1, A2) with the structure named by ``profile``.

    generic            both GOE-like, ||A2|| a random fraction of ~||A1||
    sign-definite      A1 positive definite
    rank-deficient     A1 has at least one zero eigenvalue; A2 often low rank
    near-degenerate    A1 eigenvalues in clusters of width < 1e-6
    tiny-perturbation  ||A2|| <= 1e-3 ||A1||
    """
    if d < 2:
        raise ValueError("need d >= 2")
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; expected one of {PROFILES}")
    perturb = _goe(rng, d) * rng.uniform(0.05, 1.0)
    if profile == "generic":
        a1 = _goe(rng, d)
    elif profile == "sign-definite":
        a1 = _from_eigs(rng, rng.uniform(0.1, 2.0, d))
    elif profile == "rank-deficient":
        k = int(rng.integers(1, d))
        eigs = np.concatenate([rng.uniform(-2.0, 2.0, d - k), np.zeros(k)])
        a1 = _from_eigs(rng, rng.permutation(eigs))
        if rng.random() < 0.5:
            r = int(rng.integers(1, d + 1))
            perturb = _from_eigs(rng, np.concatenate([rng.uniform(-1.0, 1.0, r), np.zeros(d - r)]))
    elif profile == "near-degenerate":
        eigs = []
        while len(eigs) < d:
            size = min(int(rng.integers(2, 5)), d - len(eigs))
            center = rng.uniform(-2.0, 2.0)
            eigs.extend(center + rng.uniform(0.0, 1e-6, size))
        a1 = _from_eigs(rng, np.array(eigs))
    else:
        a1 = _goe(rng, d)
        n1 = float(np.linalg.norm(a1, 2))
        n2 = float(np.linalg.norm(perturb, 2))
        perturb = perturb * (rng.uniform(1e-6, 1e-3) * n1 / n2)
    return SymmetricOperator(a1), SymmetricOperator(perturb)
