"""Exit criteria; each test records one PASS/FAIL line in the terminal summary."""
import math
import time

import numpy as np

from groverlab import analytic, bounds, core, discrimination, parallel
from groverlab._numerics import haar_unitary
from groverlab.core import OracleSpec


def test_ac01_exact_n4_search(criterion):
    start = time.perf_counter()
    worst = 0.0
    for y in range(4):
        final = core.grover_final(core.init_uniform(4), OracleSpec(4, y), 1)
        worst = max(worst, abs(core.success_probability(final, OracleSpec(4, y)) - 1.0))
    closed = math.sin(1 * math.pi / 3 + math.pi / 6) ** 2
    worst = max(worst, abs(analytic.success_after(4, 1) - closed))
    elapsed = time.perf_counter() - start
    criterion(f"|p - 1| = {worst:.1e} (tol 1e-12), {elapsed * 1e3:.1f} ms", worst <= 1e-12)


def test_ac02_formula_agreement(criterion):
    worst = 0.0
    n = 4
    while n <= 4096:
        o = OracleSpec(n, n - 1)
        t_max = math.ceil(2 * math.sqrt(n))
        full = core.grover_iterate(core.init_uniform(n), o, t_max)
        red = core.reduced_trace(n, t_max)
        for t, (s, r) in enumerate(zip(full, red)):
            p_full = core.success_probability(s, o)
            p_red = r.b_marked**2
            p_formula = analytic.success_after(n, t)
            worst = max(worst, abs(p_full - p_red), abs(p_full - p_formula), abs(p_red - p_formula))
        n *= 2
    criterion(f"max pairwise difference {worst:.1e} (tol 1e-10)", worst <= 1e-10)


def _grid():
    for n in (16, 64, 256):
        t_frac = analytic.optimal_iterations(n).t_star_fractional
        for t in range(0, math.floor(t_frac) + 1):
            yield n, t


def test_ac03_improved_bound_saturation(criterion):
    worst = 0.0
    for n, t in _grid():
        empty = core.empty_oracle_run(n, t)
        runs = [core.grover_iterate(core.init_uniform(n), OracleSpec(n, y), t) for y in range(n)]
        lhs = bounds.divergence_sum(empty, runs)
        rhs = n * bounds.improvement_f(4 * t * t / n, t)
        rel = 0.0 if rhs == 0 else abs(rhs - lhs) / rhs
        if t == 0:
            rel = abs(lhs)
        worst = max(worst, rel)
    criterion(f"max relative gap {worst:.1e} (tol 1e-6)", worst <= 1e-6)


def test_ac04_ceiling_matches_achiever(criterion):
    lo, hi = math.inf, -math.inf
    for n, t in _grid():
        diff = bounds.success_ceiling(n, t, 1) - analytic.success_after(n, t)
        lo, hi = min(lo, diff), max(hi, diff)
    criterion(f"ceiling - p_grover in [{lo:.1e}, {hi:.1e}] (need within [0, 1e-6])", lo >= 0 and hi <= 1e-6)


def test_ac05_crude_bound_asymptote(criterion):
    n = 2**20
    ratio = analytic.lower_bound_T(n, 1.0, 1, improved=False) / math.sqrt(n / 2)
    criterion(f"T / sqrt(N/2) = {ratio:.5f} (tol 2%)", abs(ratio - 1) <= 0.02)


def test_ac06_restart_saving(criterion):
    _, asym = analytic.restart_continuum()
    discrete = analytic.restart_optimum(2**20).savings_vs_full
    ok = abs(asym - 0.1214) <= 0.0005 and abs(discrete - asym) <= 0.003
    criterion(f"continuum {asym * 100:.4f}% (12.14 +/- 0.05), N=2^20 {discrete * 100:.4f}% (within 0.3 points)", ok)


def test_ac07_parallel_bound_soundness(criterion):
    n, s = 8, 2
    violations = 0
    checked = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        for t in range(0, 5):
            steps = [haar_unitary(n**s, rng) for _ in range(t)]
            empty = parallel.run_parallel(n, s, None, t, steps)[-1].amplitudes
            lhs = sum(
                float(np.linalg.norm(parallel.run_parallel(n, s, y, t, steps)[-1].amplitudes - empty) ** 2)
                for y in range(n)
            )
            rhs = bounds.crude_bound(t, s)
            improved = bounds.improved_bound(n, t, s)
            if improved is not None:
                rhs = min(rhs, improved)
            checked += 1
            if lhs > rhs + 1e-9:
                violations += 1
    criterion(f"{violations} violations in {checked} reports (100 algorithms, T=0..4)", violations == 0)


def test_ac08_sqrt_s_partition_speedup(criterion):
    n = 2**16
    t1 = parallel.partition_baseline(n, 1, 0.99).t_per_engine
    parts = []
    ok = True
    for s in (4, 16):
        speedup = t1 / parallel.partition_baseline(n, s, 0.99).t_per_engine
        parts.append(f"S={s}: {speedup:.3f} vs {math.sqrt(s):.0f}")
        ok &= abs(speedup / math.sqrt(s) - 1) <= 0.05
    criterion(", ".join(parts) + " (tol 5%)", ok)


def test_ac09_discrimination_bound(criterion):
    gap = 0.0
    for n in (4, 16, 64):
        for p in np.linspace(1 / n, 1, 11):
            fam = discrimination.grover_final_family(n, float(p))
            gap = max(gap, abs(discrimination.distance_sum(fam) - discrimination.bound_value(n, float(p))))
    rng = np.random.default_rng(9)
    sound = discrimination.soundness_trials(8, 1000, rng)
    lag = discrimination.lagrange_optimum_check(4, 0.7, 10000, rng)
    ok = gap <= 1e-10 and sound.violations == 0 and lag.undercuts == 0
    criterion(
        f"saturation gap {gap:.1e} (tol 1e-10), soundness violations {sound.violations}/1000, "
        f"Lagrange undercuts {lag.undercuts}/10000",
        ok,
    )


def test_ac10_over_rotation(criterion):
    n = 256
    opt = analytic.optimal_iterations(n)
    o = OracleSpec(n, 17)
    trace = core.grover_iterate(core.init_uniform(n), o, opt.t_best + 5)
    ps = [core.success_probability(s, o) for s in trace[opt.t_best:]]
    falling = all(b < a for a, b in zip(ps, ps[1:]))
    criterion(f"t_best={opt.t_best}, p over next 5 steps: " + ", ".join(f"{p:.4f}" for p in ps[1:]), falling)
