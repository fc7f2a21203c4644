import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semibound.apps.bundle import (
    BundleMethod,
    bundle_price_aggregate,
    bundle_price_improved,
    bundle_price_unequal,
    improved_profit,
    mixed_bundle_check,
    optimality_residual,
)
from semibound.core import MomentSpec
from semibound.errors import EnumerationTooLarge, Infeasible
from semibound.hetero import HeteroSumSpec, equal_range_tail_lower

from reference_values import BUNDLE_TABLE, VIGNETTE

BENCH = MomentSpec(2.5, 1.0)
UNIFORM = MomentSpec(0.5, math.sqrt(1 / 12))


@pytest.mark.parametrize("n", sorted(BUNDLE_TABLE))
def test_benchmark_table(n):
    q_agg, t_agg, q_imp, t_imp, gap_q, gap_t = BUNDLE_TABLE[n]
    agg = bundle_price_aggregate(BENCH, n)
    imp = bundle_price_improved(BENCH, n)
    assert agg.price_q == pytest.approx(q_agg, abs=1e-3)
    assert agg.worst_case_profit == pytest.approx(t_agg, abs=1e-3)
    assert imp.price_q == pytest.approx(q_imp, abs=1e-3)
    assert imp.worst_case_profit == pytest.approx(t_imp, abs=1e-3)
    assert 100 * abs(agg.price_q - imp.price_q) / imp.price_q == pytest.approx(gap_q, abs=0.1)
    assert 100 * abs(agg.worst_case_profit - imp.worst_case_profit) / imp.worst_case_profit == pytest.approx(gap_t, abs=0.1)


def test_single_item_methods_agree():
    agg, imp = bundle_price_aggregate(BENCH, 1), bundle_price_improved(BENCH, 1)
    assert agg.price_q == pytest.approx(imp.price_q, abs=1e-10)
    assert agg.worst_case_profit == pytest.approx(imp.worst_case_profit, abs=1e-10)


def test_aggregate_cubic_root():
    for n in (1, 3, 17):
        sol = bundle_price_aggregate(BENCH, n)
        t = sol.safety_factor_t
        assert t**3 + 3 * t == pytest.approx(2 * math.sqrt(n) * 2.5, rel=1e-13)


def test_improved_solution_is_stationary_and_maximal():
    for n in (2, 5, 20):
        sol = bundle_price_improved(BENCH, n)
        assert sol.method is BundleMethod.IMPROVED
        assert abs(optimality_residual(BENCH, n, sol.safety_factor_t)) < 1e-10
        grid = np.linspace(1e-6, 2.5 - 1e-6, 20001)
        assert max(improved_profit(BENCH, n, t) for t in grid) <= sol.worst_case_profit + 1e-9


def test_vignette_robust_price():
    sol = bundle_price_improved(UNIFORM, 2)
    assert sol.price_q == pytest.approx(VIGNETTE["robust_price"], abs=1e-3)
    assert sol.worst_case_profit == pytest.approx(VIGNETTE["robust_income"], abs=1e-3)
    # uniform valuations: Pr(U1 + U2 > p) = 1 - p^2 / 2 for p <= 1
    p = sol.price_q
    assert p * (1 - p * p / 2) == pytest.approx(VIGNETTE["uniform_income"], abs=1e-3)


def test_unequal_reduces_to_improved():
    for n in (2, 3, 5):
        a = bundle_price_unequal([BENCH] * n)
        b = bundle_price_improved(BENCH, n)
        assert a.method is BundleMethod.UNEQUAL_MOMENTS
        assert a.price_q == pytest.approx(b.price_q, rel=1e-7)
        assert a.worst_case_profit == pytest.approx(b.worst_case_profit, rel=1e-9)


def test_unequal_vignette():
    sol = bundle_price_unequal([UNIFORM, UNIFORM])
    assert sol.price_q == pytest.approx(VIGNETTE["robust_price"], abs=1e-3)
    assert sol.worst_case_profit == pytest.approx(VIGNETTE["robust_income"], abs=1e-3)


def test_unequal_beats_price_grid():
    specs = (MomentSpec(2.5, 1.0), MomentSpec(3.0, 1.5))
    sol = bundle_price_unequal(specs)
    assert all(isinstance(x, float) for x in (sol.price_q, sol.worst_case_profit, sol.safety_factor_t))
    _, rep = equal_range_tail_lower(HeteroSumSpec(specs, sol.price_q))
    assert sol.price_q * rep.value == pytest.approx(sol.worst_case_profit, rel=1e-9)
    best = 0.0
    for q in np.linspace(0.05, 5.45, 541):
        try:
            _, r = equal_range_tail_lower(HeteroSumSpec(specs, q))
        except Infeasible:
            continue
        best = max(best, q * r.value)
    assert best <= sol.worst_case_profit + 1e-9


def test_mixed_equals_pure_under_worst_case():
    specs = [UNIFORM, UNIFORM]
    sol = bundle_price_improved(UNIFORM, 2)
    mixed, pure = mixed_bundle_check(specs, [2 / 3, 2 / 3], sol.price_q)
    assert mixed == pytest.approx(pure, abs=1e-12)
    assert pure == pytest.approx(sol.worst_case_profit, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_mixed_never_below_pure_at_high_component_prices(a, b):
    sol = bundle_price_improved(BENCH, 3)
    prices = [sol.price_q * (1 + a), sol.price_q * (1 + b), sol.price_q * 2]
    mixed, pure = mixed_bundle_check([BENCH] * 3, prices, sol.price_q)
    assert mixed == pytest.approx(pure, abs=1e-12)


def test_enumeration_cap():
    with pytest.raises(EnumerationTooLarge):
        mixed_bundle_check([BENCH] * 21, [1.0] * 21, 30.0)


def test_nonpositive_mean_rejected():
    with pytest.raises(Infeasible):
        bundle_price_improved(MomentSpec(-1.0, 1.0), 2)
    with pytest.raises(Infeasible):
        bundle_price_aggregate(MomentSpec(0.0, 1.0), 2)


def test_as_dict():
    d = bundle_price_improved(BENCH, 2).as_dict()
    assert d["method"] == "Improved"
    assert set(d) == {"price_q", "worst_case_profit", "safety_factor_t", "method", "diagnostics"}


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 40), st.floats(0.01, 2.49))
def test_pure_bundle_beats_component_pricing(n, t):
    per_item = (BENCH.mean - t * BENCH.std_dev) * t * t / (1 + t * t)
    assert n * per_item <= improved_profit(BENCH, n, t) + 1e-12
