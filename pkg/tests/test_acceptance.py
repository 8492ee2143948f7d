"""Acceptance criteria, run at full size.

Each test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary under "acceptance criteria".
"""

import json
import time

import numpy as np
import pytest

from brownspec.brownian import build_path, increment_statistics, support_check
from brownspec.cli import main
from brownspec.gaussian import GaussianMeasure, NormSpec
from brownspec.harness import BrownianConfig, run_brownian_experiment
from brownspec.jacobi import oracle_spectrum
from brownspec.perturbation import PROFILES, OperatorPair, PerturbationReport, random_operator_pair
from brownspec.spectral import decomposition_residual, minmax_value, operator_norm, signed_spectrum
from brownspec.streams import stream

SEED = 20240611
SUITE_DIMS = (2, 5, 10, 25, 50)


def _suite_pairs():
    """The 1000 pairs shared by criteria 3 and 4: 5 dims x 5 profiles x 40."""
    pairs = []
    for d in SUITE_DIMS:
        for profile in PROFILES:
            for i in range(40):
                a1, a2 = random_operator_pair(stream(SEED, "acceptance-pairs", d, profile, i), d, profile)
                pairs.append((d, profile, OperatorPair(a1, a2)))
    return pairs


@pytest.fixture(scope="module")
def suite_pairs():
    return _suite_pairs()


def test_oracle_equivalence(acceptance_line):
    start = time.perf_counter()
    worst_eig = worst_resid = 0.0
    ok = True
    for k in range(200):
        profile = PROFILES[k % len(PROFILES)]
        rng = stream(SEED, "acceptance-oracle", k)
        d = int(rng.integers(2, 51))
        a1, a2 = random_operator_pair(rng, d, profile)
        a = np.asarray(a1) if k % 2 == 0 else np.asarray(a1 + a2)
        norm = operator_norm(a)
        spec = signed_spectrum(a)
        diff = float(np.max(np.abs(spec.values() - oracle_spectrum(a)[0])))
        xs = rng.standard_normal((100, d))
        resid = max(decomposition_residual(a, x, spec) / np.linalg.norm(x) for x in xs)
        worst_eig = max(worst_eig, diff / norm)
        worst_resid = max(worst_resid, resid / norm)
        ok = ok and diff <= 1e-8 * norm and resid <= 1e-8 * norm
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 60
    acceptance_line("1 oracle equivalence", ok,
                    f"200 operators, max eig diff {worst_eig:.2e}||A||, max residual {worst_resid:.2e}||A||||x||, "
                    f"{elapsed:.1f} s")
    assert ok


def test_minmax_characterisation(acceptance_line):
    start = time.perf_counter()
    worst_gap = worst_exact = 0.0
    tuples = 0
    ok = True
    for k in range(50):
        profile = PROFILES[k % len(PROFILES)]
        rng = stream(SEED, "acceptance-minmax", k)
        d = int(rng.integers(2, 17))
        a = np.asarray(random_operator_pair(rng, d, profile)[0])
        norm = operator_norm(a)
        mu = oracle_spectrum(a)[0]
        mu_pos = mu[mu > 1e-12 * (1 + norm)]
        vecs = signed_spectrum(a).pos_vectors
        for n in range(1, mu_pos.size + 1):
            for t in range(500):
                if t % 2:
                    # eigenvectors bent by a random amount, so some tuples sit close to optimal
                    h = vecs[:, : n - 1] + 10.0 ** rng.uniform(-8, 0) * rng.standard_normal((d, n - 1))
                else:
                    h = rng.standard_normal((d, n - 1))
                nu = minmax_value(a, list(h.T))
                worst_gap = min(worst_gap, (nu - mu_pos[n - 1]) / norm)
                ok = ok and nu >= mu_pos[n - 1] - 1e-9 * norm
                tuples += 1
            exact = abs(minmax_value(a, list(vecs[:, : n - 1].T)) - mu_pos[n - 1])
            worst_exact = max(worst_exact, exact / norm)
            ok = ok and exact <= 1e-9 * norm
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 120
    acceptance_line("2 min-max characterisation", ok,
                    f"{tuples} constraint tuples, worst (nu - mu)/||A|| {worst_gap:.2e}, "
                    f"eigenvector tuples within {worst_exact:.2e}||A||, {elapsed:.1f} s")
    assert ok


def test_comparison_inequalities(acceptance_line, suite_pairs):
    start = time.perf_counter()
    rep = PerturbationReport()
    for _, _, pair in suite_pairs:
        for c in pair.report().checks:
            if not c.name.startswith(("inclusion", "hausdorff")):
                rep.checks.append(c)
    elapsed = time.perf_counter() - start
    s = rep.summary()
    ok = s["failed"] == 0 and elapsed < 120
    acceptance_line("3 eigenvalue comparison inequalities", ok,
                    f"{len(suite_pairs)} pairs, {s['total']} checks, {s['skipped']} skipped, {s['failed']} failed, "
                    f"worst slack {s['worst_slack']:.2e}, {elapsed:.1f} s")
    assert ok


def test_inclusions_and_hausdorff(acceptance_line, suite_pairs):
    start = time.perf_counter()
    rep = PerturbationReport()
    for _, _, pair in suite_pairs:
        rep.extend(pair.inclusions(tol=1e-9))
        rep.checks.append(pair.hausdorff(tol=1e-9))
    elapsed = time.perf_counter() - start
    s = rep.summary()
    profiles = {p for _, p, _ in suite_pairs}
    ok = s["failed"] == 0 and s["skipped"] == 0 and elapsed < 60 and profiles == set(PROFILES)
    acceptance_line("4 spectral inclusions and Hausdorff bound", ok,
                    f"{len(suite_pairs)} pairs, {s['total']} checks, {s['failed']} failed, "
                    f"worst slack {s['worst_slack']:.2e}, {elapsed:.1f} s")
    assert ok


def test_brownian_tail_certificate(acceptance_line, tmp_path):
    start = time.perf_counter()
    ok = True
    details = []
    for dim in (1, 3):
        out = tmp_path / f"bm_d{dim}.csv"
        cfg = BrownianConfig(seed=SEED, dim=dim, b=1, N_min=4, N_max=12, r=4.0, delta_rule="2^(-N/8)",
                             trials=10_000)
        code = run_brownian_experiment(cfg, out)
        m = json.loads(out.with_name(out.stem + "_summary.json").read_text())["m_r_used"]
        worst_rel = 0.0
        for line in out.read_text().splitlines()[1:]:
            N, delta, cert, freq, se, verdict = line.split(",")
            N = int(N)
            closed = 16 * 1 * m * 2.0 ** (-N / 2)
            rel = abs(float(cert) - closed) / closed
            worst_rel = max(worst_rel, rel)
            ok = ok and float(delta) == 2.0 ** (-N / 8) and rel <= 1e-12
            ok = ok and float(freq) <= float(cert) + 3 * float(se) and verdict == "pass"
        ok = ok and code == 0
        details.append(f"d={dim} m4={m:.4g} certificate rel err {worst_rel:.1e}")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 600
    acceptance_line("5 Brownian tail certificate", ok, f"N=4..12, 1e4 paths, {'; '.join(details)}, {elapsed:.1f} s")
    assert ok


def test_increment_laws(acceptance_line):
    start = time.perf_counter()
    gamma = GaussianMeasure.identity(3)
    halves = increment_statistics(gamma, 1, 10, [(0.0, 0.5), (0.5, 1.0)], 10_000, SEED)
    point = increment_statistics(gamma, 1, 10, [(0.0, 0.375)], 10_000, SEED + 1)
    z = [halves.cov_z(0), halves.cov_z(1), halves.cross_z(0, 1), point.cov_z(0)]
    elapsed = time.perf_counter() - start
    ok = max(z) <= 5 and elapsed < 300
    acceptance_line("6 increment laws", ok,
                    f"z-scores cov[0,1/2] {z[0]:.2f}, cov[1/2,1] {z[1]:.2f}, cross {z[2]:.2f}, "
                    f"Cov X(3/8) {z[3]:.2f}, {elapsed:.1f} s")
    assert ok


def test_support_in_range(acceptance_line):
    rng = stream(SEED, "acceptance-support")
    f = rng.standard_normal((4, 2))
    gamma = GaussianMeasure(f @ f.T, NormSpec("l2"))
    paths = [build_path(gamma, 1, 6, stream(SEED, "acceptance-support", i)) for i in range(100)]
    resid = support_check(gamma, paths)
    scale = max(float(np.max(np.linalg.norm(p.values, axis=1))) for p in paths)
    ok = gamma.rank == 2 and resid <= 1e-10 * scale
    acceptance_line("7 support in range(Sigma)", ok,
                    f"rank {gamma.rank} in d=4, 100 paths at N=6, residual {resid:.2e} vs max norm {scale:.3g}")
    assert ok


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_cli_reproducibility(acceptance_line, tmp_path):
    rng = np.random.default_rng(7)
    g1, g2 = rng.standard_normal((2, 8, 8))
    a1 = _write(tmp_path / "a1.json", {"dim": 8, "entries": (g1 + g1.T).ravel().tolist()})
    a2 = _write(tmp_path / "a2.json", {"dim": 8, "entries": (0.1 * (g2 + g2.T)).ravel().tolist()})
    commands = {
        "bm-converge": ["--config", _write(tmp_path / "bm.json", {"dim": 2, "N_min": 3, "N_max": 6, "trials": 500,
                                                                  "moment_samples": 5000})],
        "perturb-suite": ["--config", _write(tmp_path / "ps.json", {"dims": [2, 10], "pairs_per_cell": 4})],
        "spectrum": [a1],
        "weyl-check": [a1, a2, "-p", "2", "-q", "3"],
        "hausdorff": [a1, a2],
    }
    identical = []
    for name, args in commands.items():
        runs = []
        for k in range(2):
            out = tmp_path / name / f"run{k}" / "report.csv"
            code = main([name, *args, "--seed", "99", "--out", str(out)])
            runs.append((code, out.read_bytes(), out.with_name("report_summary.json").read_bytes()))
        identical.append(runs[0] == runs[1] and runs[0][0] == 0)
    ok = all(identical)
    acceptance_line("8 reproducibility", ok,
                    f"{sum(identical)}/{len(identical)} commands byte-identical on rerun")
    assert ok
