"""
Acceptance criteria.

Each test records one PASS/FAIL line through the ``criterion`` fixture; the
lines are repeated in the terminal summary. Thresholds are not relaxed
here; where a check is statistical, the tolerance is the stated multiple
of the Monte Carlo standard error.
"""

import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from gfnash.cli import main
from gfnash.game import ActionSet, QuadraticGame, hvac_game, lipschitz_bounds, solve_quadratic_ne
from gfnash.graph import (DiGraph, SpectralCertificate, balance_weights, decay_ratios, spectral_radius,
                          tilde_matrix, validate_deltas)
from gfnash.harness import (ExperimentSpec, GameConfig, GraphConfig, compare, decade_means, plateau,
                            run_experiment, sweep)
from gfnash.oracle import RandomSource, estimate_smoothed_grad, second_moment_estimate, smoothed_cost_estimate
from gfnash.seeker import RunConfig, StepSchedule, admissible_alpha

from reference import (admissible_mask, best_response_ne, dense_spectral_radius, random_quadratic,
                       random_strong_digraph)

pytestmark = pytest.mark.slow

SEEDS = tuple(range(20))
MUS = (1.0, 0.1, 0.01)


def random_point_case(t):
    """Random quadratic game on a random box, an interior point, a player and a radius."""
    rng = np.random.default_rng(500 + t)
    n = int(rng.integers(2, 7))
    a, b, c, xr = random_quadratic(rng, n)
    lo = rng.uniform(-20, 0, n)
    hi = lo + rng.uniform(10, 60, n)
    q = QuadraticGame(a, b, c, xr)
    sets = [ActionSet(l, h) for l, h in zip(lo, hi)]
    x = rng.uniform(lo, hi)
    return q, sets, x, int(rng.integers(n)), MUS[t % 3]


# ---- 1 -------------------------------------------------------------------

def test_c01_equilibrium_oracle(criterion):
    t0 = time.perf_counter()
    x = solve_quadratic_ne(hvac_game(), ActionSet(0, 50))
    sum_err = abs(x.sum() - 150 / 2.6)
    worst = 0.0
    elapsed = time.perf_counter() - t0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 9))
        a, b, c, xr = random_quadratic(rng, n)
        t1 = time.perf_counter()
        got = solve_quadratic_ne(QuadraticGame(a, b, c, xr), ActionSet(-1e3, 1e3))
        elapsed += time.perf_counter() - t1
        worst = max(worst, np.abs(got - best_response_ne(a, b, c, xr, -1e3, 1e3)).max())
    ok = sum_err <= 1e-9 and worst <= 1e-8 and elapsed < 1.0
    criterion(1, ok, f"|sum - 150/2.6| = {sum_err:.1e}, max gap to best response = {worst:.1e}, "
                     f"oracle time {elapsed:.3f} s")
    assert ok


# ---- 2 -------------------------------------------------------------------

def test_c02_oracle_unbiased(criterion):
    t0 = time.perf_counter()
    zs = []
    for t in range(20):
        q, sets, x, i, mu = random_point_case(t)
        est = estimate_smoothed_grad(q.spec(sets), i, x, mu, 100_000, RandomSource(t, 0))
        zs.append(abs(est.mean - q.partial(i, x)) / est.stderr)
    elapsed = time.perf_counter() - t0
    ok = max(zs) <= 3.0 and elapsed < 30
    criterion(2, ok, f"max |mean - partial| / stderr = {max(zs):.2f} over 20 cases, {elapsed:.1f} s")
    assert ok


# ---- 3 -------------------------------------------------------------------

def test_c03_second_moment_bound(criterion):
    cases = [random_point_case(100 + t) for t in range(20)]
    hv = hvac_game()
    box = [ActionSet(0, 50)] * 5
    pts = np.random.default_rng(3).uniform(0, 50, (5, 5))
    cases += [(hv, box, p, k, 0.01) for k, p in enumerate(pts)]
    slack = []
    for t, (q, sets, x, i, mu) in enumerate(cases):
        d1, _ = lipschitz_bounds(q, sets)
        est = second_moment_estimate(q.spec(sets), i, x, mu, 100_000, RandomSource(t, 1))
        slack.append((5 * d1 ** 2 + 3 * est.stderr) - est.mean)
    ok = min(slack) >= 0
    criterion(3, ok, f"{len(cases)} points, smallest margin below 5 d1^2 + 3 se = {min(slack):.4g}")
    assert ok


# ---- 4 -------------------------------------------------------------------

def test_c04_sandwich(criterion):
    worst = np.inf
    for t in range(20):
        q, sets, x, i, mu = random_point_case(200 + t)
        d1, _ = lipschitz_bounds(q, sets)
        f = q.cost(i, x)
        est = smoothed_cost_estimate(q.spec(sets), i, x, mu, 100_000, RandomSource(t, 2))
        lo, hi = f - 3 * est.stderr, f + mu * d1 + 3 * est.stderr
        worst = min(worst, est.mean - lo, hi - est.mean)
    ok = worst >= 0
    criterion(4, ok, f"20 points, smallest distance inside the band = {worst:.4g}")
    assert ok


# ---- 5 -------------------------------------------------------------------

def test_c05_damped_mixing_spectrum(criterion):
    rng = np.random.default_rng(2024)
    max_rho, worst_dense, decay_ok, checked = 0.0, 0.0, True, 0
    for _ in range(100):
        n = int(rng.integers(3, 21))
        g = DiGraph.from_edges(n, random_strong_digraph(rng, n, int(rng.integers(0, 2 * n))))
        w = balance_weights(g)
        limit = 2 * np.diag(w) / w.max(axis=1)
        deltas = rng.uniform(0.05, 0.99) * limit * rng.uniform(0.1, 1.0, n)
        assert validate_deltas(w, deltas) is None
        for i in range(n):
            t = tilde_matrix(w, i, deltas)
            assert (deltas * w[:, i] > 0).any()
            rho = spectral_radius(t)
            max_rho = max(max_rho, rho)
            if n <= 10:
                worst_dense = max(worst_dense, abs(rho - dense_spectral_radius(t)))
            r = decay_ratios(t, SpectralCertificate(i, rho).gamma, 200)
            decay_ok &= bool(np.isfinite(r).all() and r[100:].max() <= r[:100].max())
            checked += 1
    ok = max_rho < 1 - 1e-6 and decay_ok and worst_dense <= 1e-8
    criterion(5, ok, f"{checked} damped matrices, max rho = {max_rho:.6f}, "
                     f"dense-solver gap {worst_dense:.1e}, geometric decay {'holds' if decay_ok else 'fails'}")
    assert ok


# ---- 6, 7 ----------------------------------------------------------------

@pytest.fixture(scope="module")
def theory_run():
    spec = ExperimentSpec(run=RunConfig(iters=20_000, schedule=StepSchedule(alpha0=0.1, exponent=0.6)),
                          seeds=SEEDS)
    t0 = time.perf_counter()
    res = run_experiment(spec)
    return res, time.perf_counter() - t0


def test_c06_consensus(criterion, theory_run):
    res, elapsed = theory_run
    k = res.k
    at = {kk: np.flatnonzero(k == kk)[0] for kk in (1000, 20_000)}
    mean = res.consensus_mean
    per_seed = (res.consensus[:, at[20_000]] < res.consensus[:, at[1000]]).all()
    ok = mean[at[20_000]] < 0.05 and mean[at[20_000]] < mean[at[1000]] and per_seed and elapsed < 60
    criterion(6, ok, f"mean consensus error {mean[at[1000]]:.2e} at k=1e3, {mean[at[20_000]]:.2e} at k=2e4; "
                     f"every seed decreases: {per_seed}; {elapsed:.1f} s")
    assert ok


def test_c07_convergence(criterion, theory_run):
    res, _ = theory_run
    final = res.rel_err_mean[-1]
    dm = decade_means(res.k, res.rel_err_mean)
    trend = all(b < a for a, b in zip(dm, dm[1:]))
    k1000 = np.flatnonzero(res.k == 1000)[0]
    per_seed = (res.rel_err[:, -1] < res.rel_err[:, k1000]).all()
    ok = final < 0.05 and trend and per_seed
    criterion(7, ok, f"mean relative error at k=2e4 = {final:.2e}; decade means "
                     + ", ".join(f"{v:.2e}" for v in dm))
    assert ok


# ---- 8 -------------------------------------------------------------------

def test_c08_constant_step_plateau(criterion):
    base = ExperimentSpec(run=RunConfig(iters=20_000, schedule=StepSchedule("constant", 0.1), record_stride=10),
                          seeds=SEEDS)
    (_, big), (_, small) = sweep(base, "alpha0", [0.1, 0.05])
    ne = plateau(small.k, small.rel_err_mean) / plateau(big.k, big.rel_err_mean)
    cons = plateau(small.k, small.consensus_mean) / plateau(big.k, big.consensus_mean)
    ok = 0.3 <= ne <= 0.8 and 0.3 <= cons <= 0.8
    criterion(8, ok, f"plateau ratio alpha 0.05 / 0.1: equilibrium error {ne:.3f}, consensus error {cons:.3f}")
    assert ok


# ---- 9 -------------------------------------------------------------------

def test_c09_orderings(criterion):
    # iteration 100: before the smoothing-noise floor hides the transient
    short = RunConfig(iters=100, record_stride=100)
    topo = sweep(ExperimentSpec(run=short, seeds=SEEDS), "topology",
                 ["ring", "two-successor-cycle", "three-successor-cycle"])
    t_err = [r.rel_err_mean[-1] for _, r in topo]
    scale_base = ExperimentSpec(game=GameConfig(lo=-100, hi=100), graph=GraphConfig("two-successor-cycle"),
                                run=short, seeds=SEEDS)
    scale = sweep(scale_base, "N", [10, 20, 30, 40])
    n_err = [r.rel_err_mean[-1] for _, r in scale]
    ok = all(b <= a for a, b in zip(t_err, t_err[1:])) and all(b >= a for a, b in zip(n_err, n_err[1:]))
    criterion(9, ok, "topology " + " >= ".join(f"{v:.3f}" for v in t_err)
                     + "; N=10..40 " + " <= ".join(f"{v:.3f}" for v in n_err))
    assert ok


# ---- 10 ------------------------------------------------------------------

def test_c10_baseline_comparison(criterion):
    base = ExperimentSpec(run=RunConfig(iters=1000), seeds=SEEDS)
    out, ok = [], True
    for label, sched in (("diminishing", StepSchedule()), ("constant", StepSchedule("constant", 0.1))):
        hits = compare(replace(base, run=replace(base.run, schedule=sched))).hits
        free, based = hits["gradient-free"], hits["gradient-based"]
        ok &= free is not None and based is not None and based <= free
        out.append(f"{label}: gradient-based k={based}, gradient-free k={free}")
    criterion(10, ok, "; ".join(out))
    assert ok


# ---- 11 ------------------------------------------------------------------

def test_c11_determinism(criterion, tmp_path):
    cfg = str(Path(__file__).parents[1] / "configs" / "hvac5.yaml")
    codes = [main(["run", "--config", cfg, "--set", "algo.iters=2000", "--set", "experiment.seeds=4",
                   "--out", str(tmp_path / d)]) for d in ("a", "b")]
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes() for f in names)
    ok = codes == [0, 0] and same and len(names) == 5
    criterion(11, ok, f"{len(names)} artifacts compared byte for byte")
    assert ok


# ---- 12 ------------------------------------------------------------------

def test_c12_step_size_diagnostic(criterion):
    rng = np.random.default_rng(12)
    bad, split = 0, 0
    for _ in range(20):
        chi = rng.uniform(0.1, 5)
        rho, n, C, B = rng.uniform(0, 0.99), int(rng.integers(2, 11)), rng.uniform(0.5, 2), rng.uniform(0.1, 10)
        cert = SpectralCertificate(0, rho)
        g = cert.gamma
        coef = g * n * C * B / (1 - g) + B
        q = chi ** 2 * 10 ** rng.uniform(-1, 1)  # both sides of the double-root case
        lhat = q / coef
        intervals = admissible_alpha(chi, lhat, B, cert, n, C=C)
        split += len(intervals) == 2
        top = 1.1 * 2 * chi / q
        grid = np.linspace(top / 1e4, top, 10_000)
        h = grid[1] - grid[0]
        pred = np.zeros(grid.size, dtype=bool)
        for lo, hi in intervals:
            pred |= (grid > lo) & (grid < hi)
        ends = np.array([e for iv in intervals for e in iv])
        miss = np.flatnonzero(pred != admissible_mask(grid, chi, q))
        bad += sum(np.abs(ends - grid[m]).min() > h for m in miss)
    ok = bad == 0
    criterion(12, ok, f"20 random tuples ({split} with a gap) on 10^4-point grids, "
                      f"{bad} disagreements beyond one grid step")
    assert ok
