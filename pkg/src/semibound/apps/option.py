"""Envelopes for a European call on an asset whose daily price changes are iid.

After N days the price is start + xi with xi the sum of N changes, so the
payoff (start + xi - strike)+ is the expected loss of xi at the effective
threshold strike - start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core import DEFAULT_CONFIG, MomentSpec, NumericConfig, ShiftedSpec
from ..loss import optimal_loss_bound
from ..oracle import normal_expected_loss


@dataclass(frozen=True)
class OptionPrices:
    aggregation: float
    improved: float
    normal_prior: float


@dataclass(frozen=True)
class OptionQuote:
    strike: float
    days_n: int
    start_price: float
    daily_spec: MomentSpec
    prices: OptionPrices
    discount_rate: float
    lo_bound: float

    def as_dict(self) -> dict:
        return {
            "strike": self.strike,
            "days_n": self.days_n,
            "start_price": self.start_price,
            "mu": self.daily_spec.mean,
            "sigma": self.daily_spec.std_dev,
            "discount_rate": self.discount_rate,
            "aggregation": self.prices.aggregation,
            "improved": self.prices.improved,
            "normal_prior": self.prices.normal_prior,
            "lo_bound": self.lo_bound,
        }


def aggregate_call_bound(mean: float, variance: float, q: float) -> float:
    """Upper bound on E(X - q)+ from the first two moments of X alone."""
    return 0.5 * (mean - q + math.sqrt((q - mean) ** 2 + variance))


def lo_call_bound(mean: float, variance: float, q: float) -> float:
    """Two-branch moment bound for a call on a non-negative underlying change."""
    second = mean * mean + variance
    if mean > 0 and q <= second / (2.0 * mean):
        return mean - q * mean * mean / second
    return aggregate_call_bound(mean, variance, q)


def option_quote(
    daily: MomentSpec,
    days_n: int,
    start_price: float,
    strike: float,
    discount_rate: float,
    config: NumericConfig = DEFAULT_CONFIG,
) -> OptionQuote:
    if days_n < 1:
        raise ValueError("days_n must be at least 1")
    q_eff = strike - start_price
    n = days_n
    m, var = n * daily.mean, n * daily.variance
    disc = math.exp(-discount_rate * n)
    aggregation = disc * aggregate_call_bound(m, var, q_eff)
    improved = disc * optimal_loss_bound(ShiftedSpec(daily, q_eff, n), config).value
    normal = disc * normal_expected_loss(m, math.sqrt(var), q_eff)
    lo = disc * lo_call_bound(m, var, q_eff)
    return OptionQuote(strike, n, start_price, daily, OptionPrices(aggregation, improved, normal), discount_rate, lo)
