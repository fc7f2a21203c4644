"""Bounds for the sum of N iid variables with common mean and variance.

Two families live here. The aggregate bounds treat the sum as one variable
with moments (N mu, N sigma^2) and ignore independence. The improved bounds
use independence: the worst case puts each summand on a two-point law with
an atom at the per-item threshold q/N, so the tail deficit decays
geometrically in N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import BoundKind, BoundReport, MomentSpec, TwoPointDistribution
from .errors import GammaOutOfRange, WrongTailDirection


@dataclass(frozen=True)
class SumSpec:
    spec: MomentSpec
    count_n: int
    threshold_q: float

    def __post_init__(self) -> None:
        if int(self.count_n) != self.count_n or self.count_n < 1:
            raise ValueError(f"count_n must be a positive integer, got {self.count_n}")
        if not math.isfinite(self.threshold_q):
            raise ValueError(f"threshold must be finite, got {self.threshold_q}")

    @property
    def per_item_gap(self) -> float:
        """mu - q/N."""
        return self.spec.mean - self.threshold_q / self.count_n

    def inputs(self) -> dict:
        return {"mu": self.spec.mean, "sigma": self.spec.std_dev, "n": self.count_n, "q": self.threshold_q}


@dataclass(frozen=True)
class PercentileEnvelope:
    gamma: float
    lower: float
    upper: float

    def as_dict(self) -> dict:
        return {"gamma": self.gamma, "lower": self.lower, "upper": self.upper}


def _stay_ratio(s: SumSpec) -> float:
    d = s.per_item_gap
    var = s.spec.variance
    return var / (d * d + var)


def aggregate_tail_lower(s: SumSpec) -> BoundReport:
    n = s.count_n
    d = s.per_item_gap
    if d <= 0:
        raise WrongTailDirection(f"need N*mu > q, got mu - q/N = {d}")
    var = s.spec.variance
    value = 1.0 - var / (n * d * d + var)
    return BoundReport(value, BoundKind.TAIL_LOWER, "aggregate", s.inputs())


def aggregate_abs_upper(s: SumSpec) -> BoundReport:
    n = s.count_n
    d = s.per_item_gap
    value = math.sqrt(n * n * d * d + n * s.spec.variance)
    return BoundReport(value, BoundKind.ABS_UPPER, "aggregate", s.inputs())


def aggregate_loss_upper(s: SumSpec) -> BoundReport:
    """E(xi - q)+ <= ((N mu - q) + aggregate |.| bound) / 2."""
    n = s.count_n
    centred = n * s.per_item_gap
    value = 0.5 * (centred + aggregate_abs_upper(s).value)
    return BoundReport(value, BoundKind.LOSS_UPPER, "aggregate", s.inputs())


def improved_tail_lower(s: SumSpec) -> BoundReport:
    """Lower bound on Pr(xi > q) that uses independence of the summands."""
    d = s.per_item_gap
    if d <= 0:
        raise WrongTailDirection(f"need mu > q/N, got mu - q/N = {d}")
    r = _stay_ratio(s)
    # 1 - r**N without cancellation when r is close to 1
    value = -math.expm1(s.count_n * math.log(r))
    law = TwoPointDistribution(s.threshold_q / s.count_n, s.spec.mean + s.spec.variance / d, r)
    return BoundReport(value, BoundKind.TAIL_LOWER, "improved", s.inputs(), law)


def improved_left_tail_lower(s: SumSpec) -> BoundReport:
    """Lower bound on Pr(xi < q) for q above the total mean."""
    d = s.per_item_gap
    if d >= 0:
        raise WrongTailDirection(f"need mu < q/N, got mu - q/N = {d}")
    r = _stay_ratio(s)
    value = -math.expm1(s.count_n * math.log(r))
    law = TwoPointDistribution(s.spec.mean + s.spec.variance / d, s.threshold_q / s.count_n, 1.0 - r)
    return BoundReport(value, BoundKind.TAIL_LOWER, "improved_left", s.inputs(), law)


def _spread(log_x: float) -> float:
    """sqrt((1 - x)/x) for x = exp(log_x), stable when x is near 1."""
    return math.sqrt(-math.expm1(log_x) / math.exp(log_x))


def percentile_envelope(spec: MomentSpec, count_n: int, gamma: float) -> PercentileEnvelope:
    """Range containing the gamma-percentile of the sum of N iid copies."""
    if not 0.0 < gamma < 1.0:
        raise GammaOutOfRange(f"gamma must lie in (0, 1), got {gamma}")
    n = count_n
    centre = n * spec.mean
    scale = n * spec.std_dev
    lower = centre - scale * _spread(math.log(gamma) / n)
    upper = centre + scale * _spread(math.log1p(-gamma) / n)
    return PercentileEnvelope(gamma, lower, upper)
