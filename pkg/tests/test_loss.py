import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semibound.core import MomentSpec, ShiftedSpec, make_two_point
from semibound.iid import SumSpec, aggregate_abs_upper
from semibound.loss import (
    abs_sum_upper,
    beta_hat_high_mean,
    beta_hat_low_mean,
    binomial_convolution,
    loss_bound_pieces,
    loss_objective,
    optimal_loss_bound,
    thresholds,
)
from semibound.oracle import DiscreteLaw, convolve_iid, exact_expected_loss, exact_tail, random_feasible_law


def sh(mu, sigma, n):
    """Spec whose shifted mean is ``mu`` (threshold zero)."""
    return ShiftedSpec(MomentSpec(mu, sigma), 0.0, n)


def test_thresholds_zero_mean():
    assert thresholds(sh(0, 1, 5)).deltas == pytest.approx((1, 0.8, 0.6, 0.4, 0.2, 0), abs=1e-15)
    assert thresholds(sh(0, 1, 1)).deltas == (1.0, 0.0)


@pytest.mark.parametrize("mu", [-0.1, -2.0, 0.0, 0.4, 3.0])
@pytest.mark.parametrize("n", [2, 5, 12, 60])
def test_thresholds_residual_and_order(mu, n):
    s = sh(mu, 1.0, n)
    th = thresholds(s)
    assert all(abs(r) <= 1e-10 for r in th.residuals(s))
    assert all(a > b for a, b in zip(th.deltas, th.deltas[1:]))


def test_negative_root_is_not_a_threshold():
    # the other root of the quadratic in sqrt((1-d)/d) leaves a residual of -sigma
    n, mu, sigma, k = 5, -0.1, 1.0, 2
    t = (n * mu - math.sqrt(n * n * mu * mu + 4 * (n - k) * k * sigma**2)) / (2 * (n - k) * sigma)
    d = 1 / (1 + t * t)
    res = n * mu + sigma * (-(n - k) * math.sqrt((1 - d) / d) + k * math.sqrt(d / (1 - d)))
    assert res == pytest.approx(-sigma, abs=1e-12)


@pytest.mark.parametrize("mu", [-0.5, 0.0, 0.5])
def test_sign_pattern_between_thresholds(mu):
    n = 7
    s = sh(mu, 1.0, n)
    pieces = thresholds(s).pieces()
    assert len(pieces) == n
    for k, lo, hi in pieces:
        beta = 0.5 * (lo + hi)
        law = make_two_point(MomentSpec(mu, 1.0), beta)
        atoms = [(n - t) * law.low + t * law.high for t in range(n + 1)]
        assert all(a > 0 for a in atoms[k:])
        assert all(a <= 0 for a in atoms[:k])


@pytest.mark.parametrize("mu", [-0.5, 0.5])
def test_same_sign_edges(mu):
    n = 4
    s = sh(mu, 1.0, n)
    th = thresholds(s)
    if mu < 0:
        beta = 0.5 * th.lower_edge
        assert loss_objective(s, beta) == 0.0
    else:
        beta = 0.5 * (1 + th.upper_edge)
        assert loss_objective(s, beta) == pytest.approx(n * mu, abs=1e-12)


def test_loss_objective_values():
    assert loss_objective(sh(0, 1, 1), 0.5) == pytest.approx(0.5)
    assert loss_objective(sh(-0.1, 1, 5), 0.9) == pytest.approx(0.779395, abs=1e-12)


@pytest.mark.parametrize("mu", [-0.3, 0.0, 0.25])
def test_loss_objective_continuity(mu):
    n = 6
    s = sh(mu, 1.0, n)
    for d in thresholds(s).deltas[1:-1]:
        left, right = loss_objective(s, d * (1 - 1e-10)), loss_objective(s, d * (1 + 1e-10))
        assert left == pytest.approx(right, abs=1e-9)


def test_convolution_invariants():
    for beta in (0.01, 0.3, 0.77, 0.999):
        conv = binomial_convolution(make_two_point(MomentSpec(-0.2, 1.5), beta), 9)
        assert math.fsum(conv.probs) == pytest.approx(1, abs=1e-12)
        assert np.all(np.diff(conv.values) > 0)
        assert conv.mean() == pytest.approx(9 * -0.2, abs=1e-9)
        assert conv.variance() == pytest.approx(9 * 1.5**2, rel=1e-9)
        if conv.marginal.low <= 0 <= conv.marginal.high:
            p = conv.tail(0.0)
            assert (1 - beta) ** 9 - 1e-12 <= p <= 1 - beta**9 + 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 7, 12])
@pytest.mark.parametrize("mu", [-1.0, -0.1, 0.0, 0.2])
def test_loss_objective_matches_enumeration(n, mu):
    s = sh(mu, 0.8, n)
    for beta in np.linspace(0.005, 0.995, 40):
        law = DiscreteLaw.from_two_point(make_two_point(MomentSpec(mu, 0.8), float(beta)))
        assert loss_objective(s, float(beta)) == pytest.approx(exact_expected_loss(convolve_iid(law, n), 0), abs=1e-12)


def test_loss_objective_large_n():
    s = ShiftedSpec(MomentSpec(0.0194, 0.2752), 2.54, 200)
    for beta in (0.5, 0.9, 0.995):
        conv = binomial_convolution(make_two_point(MomentSpec(s.shifted_mean, 0.2752), beta), 200)
        assert loss_objective(s, beta) == pytest.approx(conv.expected_positive_part(), abs=1e-12)


def test_optimal_zero_mean():
    for n in (1, 2, 10, 1000):
        r = optimal_loss_bound(sh(0, 1, n))
        b = (2 * n - 1) / (2 * n)
        assert r.inputs["beta"] == pytest.approx(b, abs=1e-15)
        expected = n * (1 - 1 / (2 * n)) ** (n - 1) * math.sqrt((1 / (2 * n)) * (1 - 1 / (2 * n)))
        assert r.value == pytest.approx(expected, rel=1e-12)
    assert optimal_loss_bound(sh(0, 1, 1)).value == pytest.approx(0.5)


def test_optimal_values():
    assert optimal_loss_bound(sh(-0.1, 1, 5)).value == pytest.approx(0.802783678149010, abs=1e-13)
    assert optimal_loss_bound(sh(-0.1, 1, 2)).value == pytest.approx(0.568368949918992, abs=1e-13)
    nab = ShiftedSpec(MomentSpec(0.0194, 0.2752), 2.54, 30)
    assert optimal_loss_bound(nab).value == pytest.approx(0.245, abs=5e-4)


def test_zero_mean_symmetry():
    for n in (1, 3, 8, 50):
        b1, b2 = beta_hat_low_mean(n, 0, 1), beta_hat_high_mean(n, 0, 1)
        assert b1 + b2 == pytest.approx(1, abs=1e-10)
        z1, _ = loss_bound_pieces(sh(0, 1, n), b1)
        _, zn = loss_bound_pieces(sh(0, 1, n), b2)
        assert z1 == pytest.approx(zn, abs=1e-10)


@pytest.mark.parametrize("mu", [-0.4, -0.1, 0.0, 0.1, 0.4])
def test_piece_identities(mu):
    n = 5
    s = sh(mu, 1.0, n)
    th = thresholds(s)
    d = th.deltas
    for beta in np.linspace(d[1], th.upper_edge, 30)[1:-1]:
        assert loss_bound_pieces(s, float(beta))[0] == pytest.approx(loss_objective(s, float(beta)), abs=1e-12)
    for beta in np.linspace(th.lower_edge, d[n - 1], 30)[1:-1]:
        assert loss_bound_pieces(s, float(beta))[1] == pytest.approx(loss_objective(s, float(beta)), abs=1e-12)


def test_optimum_on_first_piece():
    s = sh(-0.1, 1, 5)
    r = optimal_loss_bound(s)
    assert loss_bound_pieces(s, r.inputs["beta"])[0] == pytest.approx(r.value, abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(-2, 2), st.floats(0.2, 3), st.integers(1, 25))
def test_global_optimum_on_grid(mu, sigma, n):
    s = sh(mu, sigma, n)
    best = optimal_loss_bound(s).value
    grid = np.linspace(1e-4, 1 - 1e-4, 2000)
    assert max(loss_objective(s, float(b)) for b in grid) <= best + 1e-12


@pytest.mark.parametrize("mu", [-0.5, -0.1, 0.1, 0.5])
def test_pieces_are_concave(mu):
    n = 6
    s = sh(mu, 1.0, n)
    for _, lo, hi in thresholds(s).pieces():
        grid = np.linspace(lo, hi, 202)[1:-1]
        vals = np.array([loss_objective(s, float(b)) for b in grid])
        assert np.all(vals[:-2] - 2 * vals[1:-1] + vals[2:] <= 1e-12)


def test_abs_sum_values():
    assert abs_sum_upper(SumSpec(MomentSpec(0, 1), 1, 0)).value == pytest.approx(1)
    assert aggregate_abs_upper(SumSpec(MomentSpec(0, 1), 1, 0)).value == pytest.approx(1)
    v = abs_sum_upper(SumSpec(MomentSpec(0, 1), 25, 0)).value
    assert v == pytest.approx(4.31046235556355, abs=1e-12)
    assert v < 5
    assert abs_sum_upper(SumSpec(MomentSpec(-0.1, 1), 5, 0)).value < math.sqrt(0.25 + 5)


@settings(max_examples=200)
@given(st.floats(-3, 3), st.floats(0.1, 3), st.integers(1, 60), st.floats(-10, 10))
def test_improved_abs_below_aggregate(mu, sigma, n, q):
    s = SumSpec(MomentSpec(mu, sigma), n, q)
    assert abs_sum_upper(s).value <= aggregate_abs_upper(s).value + 1e-12 * (1 + abs(q) + n * abs(mu))


def test_random_three_point_laws_stay_below():
    rng = np.random.default_rng(20240601)
    for n in (2, 4, 8):
        for mu in (-0.3, 0.0, 0.3):
            spec = MomentSpec(mu, 1.0)
            bound = optimal_loss_bound(ShiftedSpec(spec, 0.0, n)).value
            for _ in range(100):
                law = random_feasible_law(rng, spec, 3)
                assert exact_expected_loss(convolve_iid(law, n), 0.0) <= bound + 1e-12


def test_attaining_law_reproduces_bound():
    for mu, n in [(-0.1, 5), (0.3, 4), (0.0, 9)]:
        spec = MomentSpec(mu, 1.0)
        r = optimal_loss_bound(ShiftedSpec(spec, 0.0, n))
        total = convolve_iid(DiscreteLaw.from_two_point(r.attaining_distribution), n)
        assert exact_expected_loss(total, 0.0) == pytest.approx(r.value, abs=1e-12)
        assert exact_tail(total, 0.0) > 0
