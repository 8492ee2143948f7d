"""Cyclic Jacobi eigensolver used as the independent spectral oracle.

Rotations are applied in round-robin (tournament) order: every round pairs
off all indices into disjoint (p, q) pairs, so the n/2 rotations of a round
commute and are applied together as one orthogonal matrix.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["oracle_spectrum", "oracle_eigenvalues"]

EPS = np.finfo(float).eps


@lru_cache(maxsize=None)
def _rounds(n: int) -> tuple:
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        p = np.array([a for a, _ in pairs], dtype=int)
        q = np.array([b for _, b in pairs], dtype=int)
        rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def oracle_spectrum(A, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors (columns) of symmetric A."""
    a = np.array(A, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    a = 0.5 * (a + a.T)
    # work on a / max|a| so squared entries cannot underflow or overflow
    amax = float(np.max(np.abs(a))) if a.size else 0.0
    if amax > 0:
        a = a / amax
    v = np.eye(n)
    fro = float(np.linalg.norm(a))
    if n > 1 and fro > 0:
        target = n * EPS * fro
        rounds = _rounds(n)
        off = _off(a)
        for _ in range(max_sweeps):
            if off <= target:
                break
            for p, q in rounds:
                apq = a[p, q]
                app = a[p, p]
                aqq = a[q, q]
                nz = apq != 0
                safe = np.where(nz, apq, 1.0)
                theta = (aqq - app) / (2.0 * safe)
                t = np.where(nz, np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
                t = np.where(nz & (theta == 0), 1.0, t)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                j = np.eye(n)
                j[p, p] = c
                j[q, q] = c
                j[p, q] = s
                j[q, p] = -s
                a = j.T @ a @ j
                a[p, q] = 0.0
                a[q, p] = 0.0
                v = v @ j
            new_off = _off(a)
            if new_off >= off:
                off = new_off
                break
            off = new_off
    w = np.diag(a) * amax if amax > 0 else np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def oracle_eigenvalues(A) -> np.ndarray:
    return oracle_spectrum(A)[0]
