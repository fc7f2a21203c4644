import math

import pytest

from semibound.apps.option import aggregate_call_bound, lo_call_bound, option_quote
from semibound.core import MomentSpec

from reference_values import OPTION_NS, OPTION_TABLE

NAB = MomentSpec(0.0194, 0.2752)


def _quotes():
    return [option_quote(NAB, n, 26.26, 28.8, 0.0) for n in OPTION_NS]


@pytest.mark.parametrize("i", range(len(OPTION_NS)))
def test_improved_and_normal_rows(i):
    q = _quotes()[i]
    assert q.prices.improved == pytest.approx(OPTION_TABLE["improved"][i], abs=1e-3)
    assert q.prices.normal_prior == pytest.approx(OPTION_TABLE["normal_prior"][i], abs=1e-3)


@pytest.mark.parametrize("i", range(len(OPTION_NS) - 1))
def test_aggregation_row(i):
    q = _quotes()[i]
    assert q.prices.aggregation == pytest.approx(OPTION_TABLE["aggregation"][i], abs=1e-3)


def test_ordering():
    for q in _quotes():
        assert q.prices.normal_prior <= q.prices.improved <= q.prices.aggregation
        assert q.lo_bound <= q.prices.aggregation + 1e-15


def test_at_the_money():
    sigma = 0.3
    q = option_quote(MomentSpec(0.0, sigma), 1, 10.0, 10.0, 0.0)
    assert q.prices.aggregation == pytest.approx(sigma / 2, abs=1e-14)
    assert q.prices.improved == pytest.approx(sigma / 2, abs=1e-14)
    assert q.prices.normal_prior == pytest.approx(sigma / math.sqrt(2 * math.pi), abs=1e-14)


def test_discounting():
    a = option_quote(NAB, 30, 26.26, 28.8, 0.0)
    b = option_quote(NAB, 30, 26.26, 28.8, 0.001)
    f = math.exp(-0.03)
    assert b.prices.improved == pytest.approx(f * a.prices.improved, rel=1e-14)
    assert b.prices.aggregation == pytest.approx(f * a.prices.aggregation, rel=1e-14)
    assert b.prices.normal_prior == pytest.approx(f * a.prices.normal_prior, rel=1e-14)


def test_lo_branches():
    # below the branch point the linear branch applies and is tighter
    assert lo_call_bound(1.0, 1.0, 0.5) == pytest.approx(1.0 - 0.5 / 2.0)
    assert lo_call_bound(1.0, 1.0, 0.5) <= aggregate_call_bound(1.0, 1.0, 0.5)
    assert lo_call_bound(1.0, 1.0, 3.0) == aggregate_call_bound(1.0, 1.0, 3.0)
    assert lo_call_bound(-1.0, 1.0, 0.0) == aggregate_call_bound(-1.0, 1.0, 0.0)


def test_days_validated():
    with pytest.raises(ValueError):
        option_quote(NAB, 0, 26.26, 28.8, 0.0)


def test_as_dict():
    d = option_quote(NAB, 10, 26.26, 28.8, 0.0).as_dict()
    assert {"aggregation", "improved", "normal_prior", "lo_bound", "days_n"} <= set(d)
