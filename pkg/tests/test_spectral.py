import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brownspec.jacobi import oracle_spectrum
from brownspec.spectral import (
    SymmetricOperator,
    decomposition_residual,
    deflated_extremal,
    load_operator,
    minmax_value,
    operator_norm,
    orthonormalize,
    quadratic_form,
    signed_spectrum,
)

from conftest import random_orthogonal, random_symmetric, with_spectrum

D = np.diag([3.0, 1.0, -2.0])


def assert_spectrum_valid(a, spec):
    norm = max(operator_norm(a), 1e-300)
    d = a.shape[0]
    assert spec.pos.size + spec.neg.size + spec.zero_mult == d
    assert np.all(np.diff(spec.pos) <= 1e-12 * norm)
    assert np.all(np.diff(spec.neg) >= -1e-12 * norm)
    vecs = np.hstack([spec.pos_vectors, spec.neg_vectors])
    assert np.max(np.abs(vecs.T @ vecs - np.eye(vecs.shape[1])), initial=0) <= 1e-9
    for mu, phi in zip(np.concatenate([spec.pos, spec.neg]), vecs.T):
        assert np.linalg.norm(a @ phi - mu * phi) <= 1e-8 * norm
    oracle = oracle_spectrum(a)[0]
    assert np.max(np.abs(spec.values() - oracle)) <= 1e-8 * norm


def test_operator_validation_names_worst_entry():
    m = np.array([[1.0, 2.0, 0.0], [2.0, 1.0, 0.5], [0.0, 0.4, 1.0]])
    with pytest.raises(ValueError, match=r"entries\[1\]\[2\]"):
        SymmetricOperator(m)
    assert SymmetricOperator(np.eye(2)).dim == 2


def test_operator_files(tmp_path):
    p = tmp_path / "a.json"
    p.write_text(json.dumps({"dim": 2, "entries": [1, 2, 2, -1]}))
    assert load_operator(p).entries.tolist() == [[1, 2], [2, -1]]
    c = tmp_path / "a.csv"
    c.write_text("1,2\n2,-1\n")
    assert load_operator(c).entries.tolist() == [[1, 2], [2, -1]]
    p.write_text(json.dumps({"dim": 2, "entries": [1, 2, 2, -1], "name": "x"}))
    with pytest.raises(ValueError):
        load_operator(p)


def test_quadratic_form_examples(rng):
    x = rng.standard_normal(4)
    assert quadratic_form(np.eye(4), x / np.linalg.norm(x)) == pytest.approx(1.0)
    assert quadratic_form(np.diag([3.0, -2.0]), [0.0, 1.0]) == -2.0
    b = rng.standard_normal((4, 4))
    sym = 0.5 * (b + b.T)
    assert quadratic_form(sym, x) == pytest.approx(x @ b @ x, rel=1e-12)
    with pytest.raises(ValueError):
        quadratic_form(np.eye(3), x)


def test_operator_norm_examples(rng):
    assert operator_norm(np.zeros((3, 3))) == 0.0
    assert operator_norm(np.diag([3.0, 1.0, -2.0])) == pytest.approx(3.0)
    assert operator_norm(np.diag([1.0, -4.0])) == pytest.approx(4.0)
    for n in (2, 7, 20):
        a = random_symmetric(rng, n)
        assert operator_norm(a) == pytest.approx(np.abs(oracle_spectrum(a)[0]).max(), rel=1e-12)


def test_deflated_extremal_examples():
    mu, phi = deflated_extremal(D, "+")
    assert mu == pytest.approx(3.0)
    assert np.allclose(np.abs(phi), [1, 0, 0])
    assert deflated_extremal(D, "+", [[1, 0, 0], [0, 1, 0]]) is None
    mu, _ = deflated_extremal(D, "-")
    assert mu == pytest.approx(-2.0)
    assert deflated_extremal(np.zeros((2, 2)), "+") is None
    with pytest.raises(ValueError):
        deflated_extremal(D, "+", np.eye(3))
    with pytest.raises(ValueError):
        deflated_extremal(D, "+", [[1, 1, 0]])
    with pytest.raises(ValueError):
        deflated_extremal(D, "x")


def test_deflated_extremal_random_against_oracle(rng):
    for _ in range(20):
        a = random_symmetric(rng, 6)
        w = oracle_spectrum(a)[0]
        norm = operator_norm(a)
        if w[0] > 0:
            assert deflated_extremal(a, "+")[0] == pytest.approx(w[0], abs=1e-8 * norm)
        if w[-1] < 0:
            assert deflated_extremal(a, "-")[0] == pytest.approx(w[-1], abs=1e-8 * norm)


def test_signed_spectrum_examples():
    s = signed_spectrum(D)
    assert np.allclose(s.pos, [3, 1]) and np.allclose(s.neg, [-2]) and s.zero_mult == 0
    assert s.to_dict() == {"pos": [3.0, 1.0], "neg": [-2.0], "zero_mult": 0}
    s = signed_spectrum(np.diag([2.0, 2.0, 0.0, 0.0]))
    assert np.allclose(s.pos, [2, 2]) and s.neg.size == 0 and s.zero_mult == 2
    s = signed_spectrum(np.zeros((3, 3)))
    assert s.pos.size == s.neg.size == 0 and s.zero_mult == 3
    assert_spectrum_valid(D, signed_spectrum(D))


@pytest.mark.parametrize("n", [1, 2, 10, 31])
def test_signed_spectrum_random(rng, n):
    a = random_symmetric(rng, n)
    assert_spectrum_valid(a, signed_spectrum(a))


def test_signed_spectrum_clusters_and_multiplicity(rng):
    eigs = np.concatenate([1.0 + np.array([0, 2e-7, 9e-7]), -0.5 + np.array([0, 1e-7]), [0.0, 0.0], [0.3] * 3])
    a = with_spectrum(rng, eigs)
    s = signed_spectrum(a)
    assert s.zero_mult == 2
    assert_spectrum_valid(a, s)


@given(st.integers(2, 9), st.integers(0, 2**32 - 1))
def test_signed_spectrum_properties(n, seed):
    r = np.random.default_rng(seed)
    eigs = r.choice([-2.0, -1.0, 0.0, 0.5, 1.0, 3.0], size=n) + r.uniform(-1, 1, n) * r.choice([0, 1e-7, 0.3], n)
    a = with_spectrum(r, eigs)
    s = signed_spectrum(a)
    assert_spectrum_valid(a, s)
    x = r.standard_normal(n)
    expansion = np.sum(s.pos * (s.pos_vectors.T @ x) ** 2) + np.sum(s.neg * (s.neg_vectors.T @ x) ** 2)
    assert quadratic_form(a, x) == pytest.approx(expansion, abs=1e-8 * operator_norm(a) * (x @ x))
    top = [v for v in (s.pos[:1].tolist() + (-s.neg[:1]).tolist())]
    assert operator_norm(a) == pytest.approx(max(top, default=0.0), abs=1e-12 * (1 + operator_norm(a)))


def test_top_eigenvalue_dominates_random_rayleigh_quotients(rng):
    a = random_symmetric(rng, 8)
    mu1 = signed_spectrum(a).pos[0]
    x = rng.standard_normal((1000, 8))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    rq = np.einsum("ij,jk,ik->i", x, a, x)
    assert np.all(rq <= mu1 + 1e-12)
    assert deflated_extremal(a, "+")[0] == pytest.approx(mu1, abs=1e-12)


def test_null_space_sup_is_zero(rng):
    # exactly n-1 = 2 positive eigenvalues plus a 3-dimensional null space
    eigs = [2.0, 1.0, 0.0, 0.0, 0.0, -1.0, -3.0]
    a = with_spectrum(rng, eigs)
    s = signed_spectrum(a)
    assert s.pos.size == 2 and s.zero_mult == 3
    for k in range(3):
        # theta: orthonormal, orthogonal to the positive eigenvectors, |theta| < zero_mult
        raw = rng.standard_normal((7, k))
        raw -= s.pos_vectors @ (s.pos_vectors.T @ raw)
        h = list(s.pos_vectors.T) + list(raw.T)
        assert abs(minmax_value(a, h)) <= 1e-10 * operator_norm(a)


def test_no_null_space_sup_is_nonpositive(rng):
    a = with_spectrum(rng, [2.0, 1.0, -1.0, -3.0])
    s = signed_spectrum(a)
    assert minmax_value(a, list(s.pos_vectors.T)) <= 1e-10 * operator_norm(a)


def test_minmax_examples(rng):
    a = random_symmetric(rng, 9)
    s = signed_spectrum(a)
    norm = operator_norm(a)
    assert minmax_value(a) == pytest.approx(s.pos[0], abs=1e-9 * norm)
    neg_def = with_spectrum(rng, [-1.0, -2.0, -0.5])
    assert minmax_value(neg_def) == pytest.approx(-0.5, abs=1e-12)
    for n in range(1, s.pos.size + 1):
        h = list(s.pos_vectors[:, : n - 1].T)
        assert minmax_value(a, h) == pytest.approx(s.pos[n - 1], abs=1e-9 * norm)


def test_minmax_random_constraints_and_sampling_oracle(rng):
    a = random_symmetric(rng, 7)
    s = signed_spectrum(a)
    norm = operator_norm(a)
    for n in range(1, s.pos.size + 1):
        for _ in range(100):
            h = rng.standard_normal((n - 1, 7))
            nu = minmax_value(a, h)
            assert nu >= s.pos[n - 1] - 1e-9 * norm
            # independent check: feasible random points never beat the sup
            q = orthonormalize(list(h), 7)
            x = rng.standard_normal((50, 7))
            x -= (x @ q) @ q.T
            x /= np.linalg.norm(x, axis=1, keepdims=True)
            assert np.all(np.einsum("ij,jk,ik->i", x, a, x) <= nu + 1e-12 * norm)


def test_minmax_rejects_degenerate_lists():
    with pytest.raises(ValueError, match="dependent"):
        minmax_value(D, [[1, 0, 0], [2, 0, 0]])
    with pytest.raises(ValueError, match="whole space"):
        minmax_value(D, np.eye(3))


def test_orthonormalize(rng):
    v = rng.standard_normal((5, 8))
    q = orthonormalize(list(v), 8)
    assert np.allclose(q.T @ q, np.eye(5), atol=1e-14)
    assert np.linalg.matrix_rank(np.hstack([q, v.T])) == 5


def test_decomposition_residual(rng):
    a = with_spectrum(rng, [2.0, 1.0, 0.0, 0.0, -1.5, 0.7, -0.2, 3.0])
    s = signed_spectrum(a)
    norm = operator_norm(a)
    assert decomposition_residual(a, s.pos_vectors[:, 0], s) <= 1e-10 * norm
    w, v = oracle_spectrum(a)
    null = v[:, np.abs(w) < 1e-12][:, 0]
    assert np.linalg.norm(a @ null) <= 1e-12
    assert decomposition_residual(a, null, s) <= 1e-12
    for _ in range(100):
        x = rng.standard_normal(8)
        assert decomposition_residual(a, x, s) <= 1e-8 * norm * np.linalg.norm(x)


def test_negation_swaps_signed_spectrum(rng):
    a = random_symmetric(rng, 11)
    s, t = signed_spectrum(a), signed_spectrum(-a)
    assert np.allclose(s.pos, -t.neg, atol=1e-12) and np.allclose(s.neg, -t.pos, atol=1e-12)


def test_accepts_operator_objects():
    op = SymmetricOperator(D)
    assert signed_spectrum(op).to_dict() == signed_spectrum(D).to_dict()
    assert operator_norm(op + op) == pytest.approx(6.0)
    assert operator_norm(-op) == pytest.approx(3.0)
