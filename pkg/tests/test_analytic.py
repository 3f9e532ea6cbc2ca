import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from groverlab import analytic, core
from groverlab.core import OracleSpec

# frozen from 40-digit mpmath evaluation of the explicit 2x2 rotation
PHI_100 = 0.20033484232311959
P_100_7 = 0.99534440035759902
T_STAR = 1.1655611852072113


def test_rotation_angle_examples():
    assert analytic.rotation_angle(4).phi == pytest.approx(math.pi / 3, abs=1e-15)
    assert analytic.rotation_angle(2).phi == pytest.approx(math.pi / 2, abs=1e-15)
    assert analytic.rotation_angle(100).phi == pytest.approx(PHI_100, abs=1e-15)
    assert analytic.rotation_angle(100).phi == pytest.approx(math.asin(2 * math.sqrt(99) / 100), abs=1e-14)


@given(st.integers(2, 10**9))
def test_rotation_angle_invariants(n):
    phi = analytic.rotation_angle(n).phi
    assert 0 < phi <= math.pi / 2
    assert math.cos(phi) == pytest.approx(1 - 2 / n, abs=1e-12)
    assert math.sin(phi) == pytest.approx(2 * math.sqrt(n - 1) / n, abs=1e-12)


def test_rotation_angle_rejects_small():
    with pytest.raises(ValueError):
        analytic.rotation_angle(1)


def test_success_after_examples():
    assert analytic.success_after(4, 1) == pytest.approx(1.0, abs=1e-15)
    assert analytic.success_after(100, 7) == pytest.approx(P_100_7, abs=1e-13)
    for n in (2, 3, 17, 1000, 2**20):
        assert abs(analytic.success_after(n, 0) - 1 / n) < 1e-14


def test_success_after_matches_simulation():
    for n in (5, 32, 100, 777):
        o = OracleSpec(n, 0)
        trace = core.grover_iterate(core.init_uniform(n), o, 2 * math.isqrt(n) + 3)
        sim = [core.success_probability(s, o) for s in trace]
        assert np.allclose(sim, analytic.success_after(n, np.arange(len(trace))), atol=1e-10, rtol=0)


def test_optimal_iterations_examples():
    o4 = analytic.optimal_iterations(4)
    assert (o4.t_best, o4.p_best) == (1, pytest.approx(1.0, abs=1e-15))
    o2 = analytic.optimal_iterations(2)
    assert o2.t_star_fractional == pytest.approx(0.5, abs=1e-15)
    assert o2.t_best == 0 and o2.p_best == pytest.approx(0.5, abs=1e-15)
    big = analytic.optimal_iterations(10**6)
    assert big.t_best == 785
    assert abs(big.t_best / (math.pi / 4 * 1000) - 1) < 2e-3


@pytest.mark.parametrize("n", [3, 7, 16, 100, 1024, 5000])
def test_optimal_iterations_against_scan(n):
    ts = np.arange(0, 3 * math.isqrt(n) + 3)
    ps = analytic.success_after(n, ts)
    # first maximum of the first hump
    first_peak = int(ts[np.argmax(ps[: int(math.pi / analytic.rotation_angle(n).phi) + 1])])
    assert analytic.optimal_iterations(n).t_best == first_peak


@pytest.mark.parametrize("n", [64, 256, 1024, 4096])
def test_probability_falls_after_optimum(n):
    opt = analytic.optimal_iterations(n)
    phi = analytic.rotation_angle(n).phi
    for k in range(1, 6):
        if opt.t_best + k < math.pi / phi:
            assert analytic.success_after(n, opt.t_best + k) < analytic.success_after(n, opt.t_best + k - 1)
    ps = analytic.success_after(n, np.arange(opt.t_best + 1))
    assert np.all(np.diff(ps) > 0)


def test_restart_continuum_against_minimizer():
    # independent oracle: direct minimization of t / sin^2 t
    res = minimize_scalar(lambda t: t / math.sin(t) ** 2, bounds=(0.5, 1.5), method="bounded", options={"xatol": 1e-10})
    t_star, savings = analytic.restart_continuum()
    assert t_star == pytest.approx(T_STAR, abs=1e-11)
    assert t_star == pytest.approx(res.x, abs=1e-6)
    assert savings == pytest.approx(1 - 2 * T_STAR / (math.pi * math.sin(T_STAR) ** 2), abs=1e-12)
    assert abs(savings - 0.1214) < 5e-4


def test_restart_small_and_large():
    plan = analytic.restart_optimum(4)
    assert (plan.stop_at, plan.expected_queries, plan.savings_vs_full) == (1, pytest.approx(1.0), pytest.approx(0.0))
    big = analytic.restart_optimum(2**20)
    _, asym = analytic.restart_continuum()
    assert abs(big.savings_vs_full - asym) < 3e-3
    assert big.expected_queries == pytest.approx(big.stop_at / big.success_prob)
    with pytest.raises(ValueError):
        analytic.restart_optimum(2)


@pytest.mark.parametrize("n", [4, 16, 17, 100, 1000, 2**12, 2**16])
def test_restart_against_brute_force(n):
    t_best = analytic.optimal_iterations(n).t_best
    phi = math.acos(1 - 2 / n)
    cost = {t: t / math.sin((2 * t + 1) * phi / 2) ** 2 for t in range(1, t_best + 1)}
    t_min = min(cost, key=cost.get)
    plan = analytic.restart_optimum(n)
    assert plan.stop_at == t_min
    assert plan.expected_queries == pytest.approx(cost[t_min], rel=1e-12)
    if n >= 16:
        assert plan.expected_queries <= t_best


def test_lower_bound_crude_asymptote():
    n = 2**20
    ratio = analytic.lower_bound_T(n, 1.0, 1, improved=False) / math.sqrt(n / 2)
    assert abs(ratio - 1) < 0.02


@pytest.mark.parametrize("n", [2**10, 2**14, 2**18])
def test_lower_bound_improved_near_grover(n):
    t = analytic.lower_bound_T(n, 1.0, 1, improved=True)
    assert abs(t - math.pi / 4 * math.sqrt(n)) <= 1.0
    assert abs(t - analytic.optimal_iterations(n).t_best) <= 1


def test_lower_bound_small_cases():
    assert analytic.lower_bound_T(4, 1.0, 1, improved=True) == 1
    assert analytic.lower_bound_T(16, 1 / 16, 1) == 0
    with pytest.raises(ValueError):
        analytic.lower_bound_T(16, 0.01, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 4096), st.data())
def test_lower_bound_never_contradicts_grover(n, data):
    t_best = analytic.optimal_iterations(n).t_best
    t = data.draw(st.integers(0, t_best))
    assert analytic.lower_bound_T(n, analytic.success_after(n, t), 1, improved=True) <= t


def test_more_oracles_never_need_more_rounds():
    n = 4096
    ts = [analytic.lower_bound_T(n, 0.9, s) for s in (1, 2, 4, 16)]
    assert ts == sorted(ts, reverse=True)
