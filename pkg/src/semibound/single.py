"""Bounds for one random variable known only through its mean and variance."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    DEFAULT_CONFIG,
    BoundKind,
    BoundReport,
    MomentSpec,
    NumericConfig,
    TwoPointDistribution,
    check_beta,
    make_two_point,
)
from .errors import InfeasibleBeta, WrongTailDirection


@dataclass(frozen=True)
class SingleBoundInput:
    spec: MomentSpec
    threshold_q: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.threshold_q):
            raise ValueError(f"threshold must be finite, got {self.threshold_q}")

    @property
    def gap(self) -> float:
        return self.spec.mean - self.threshold_q

    def _inputs(self) -> dict:
        return {"mu": self.spec.mean, "sigma": self.spec.std_dev, "q": self.threshold_q}


def cantelli_tail_lower(inp: SingleBoundInput) -> BoundReport:
    """Lower bound on Pr(X > q) for q below the mean."""
    d = inp.gap
    if d <= 0:
        raise WrongTailDirection(f"need mean > q, got mean - q = {d}")
    var = inp.spec.variance
    p_at_q = var / (d * d + var)
    law = TwoPointDistribution(inp.threshold_q, inp.spec.mean + var / d, p_at_q)
    return BoundReport(1.0 - p_at_q, BoundKind.TAIL_LOWER, "cantelli", inp._inputs(), law)


def cantelli_left_tail_lower(inp: SingleBoundInput) -> BoundReport:
    """Lower bound on Pr(X < q) for q above the mean."""
    d = inp.gap
    if d >= 0:
        raise WrongTailDirection(f"need mean < q, got mean - q = {d}")
    var = inp.spec.variance
    p_at_q = var / (d * d + var)
    law = TwoPointDistribution(inp.spec.mean + var / d, inp.threshold_q, 1.0 - p_at_q)
    return BoundReport(1.0 - p_at_q, BoundKind.TAIL_LOWER, "cantelli_left", inp._inputs(), law)


def scarf_abs_upper(inp: SingleBoundInput) -> BoundReport:
    """Upper bound on E|X - q|, attained on {q - v, q + v}."""
    d = inp.gap
    value = math.hypot(d, inp.spec.std_dev)
    # mass on the lower atom; mean q + d forces this orientation
    p_low = 0.5 - d / (2.0 * value)
    law = None
    if 0.0 < p_low < 1.0:
        law = TwoPointDistribution(inp.threshold_q - value, inp.threshold_q + value, p_low)
    return BoundReport(value, BoundKind.ABS_UPPER, "scarf_abs", inp._inputs(), law)


def scarf_expected_loss_upper(inp: SingleBoundInput) -> BoundReport:
    d = inp.gap
    value = 0.5 * (d + math.hypot(d, inp.spec.std_dev))
    law = scarf_abs_upper(inp).attaining_distribution
    return BoundReport(value, BoundKind.LOSS_UPPER, "scarf_loss", inp._inputs(), law)


def tighter_scarf_loss_upper(
    inp: SingleBoundInput, beta: float, config: NumericConfig = DEFAULT_CONFIG
) -> BoundReport:
    """E(X - q)+ under the two-point law with Pr(low) = beta.

    Requires the law to straddle q; otherwise the value is not a bound at all.
    """
    check_beta(beta, config)
    law = make_two_point(inp.spec, beta, config)
    mu_s = inp.gap
    tol = config.abs_tol * (1.0 + abs(inp.threshold_q))
    if law.low - inp.threshold_q > tol or law.high - inp.threshold_q < -tol:
        raise InfeasibleBeta(f"beta={beta} gives support [{law.low}, {law.high}] not straddling q={inp.threshold_q}")
    value = mu_s * (1.0 - beta) + inp.spec.std_dev * math.sqrt(beta - beta * beta)
    inputs = inp._inputs() | {"beta": beta}
    return BoundReport(value, BoundKind.LOSS_UPPER, "tighter_scarf", inputs, law)


def scarf_optimal_beta(inp: SingleBoundInput) -> float:
    """The beta at which the constrained bound recovers Scarf's value."""
    d = inp.gap
    return 0.5 - d / (2.0 * math.hypot(d, inp.spec.std_dev))
