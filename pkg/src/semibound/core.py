"""Shared types: moment specifications, two-point laws, bound reports, numeric settings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

from scipy.optimize import brentq

from .errors import BetaOutOfRange, NoRootInBracket, NonPositiveVariance


@dataclass(frozen=True)
class NumericConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_iterations: int = 200
    probability_clamp: float = 1e-12

    def __post_init__(self) -> None:
        if min(self.abs_tol, self.rel_tol, self.probability_clamp) <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.probability_clamp >= 1e-3:
            raise ValueError("probability_clamp must be below 1e-3")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


DEFAULT_CONFIG = NumericConfig()


@dataclass(frozen=True)
class MomentSpec:
    """Mean and standard deviation of one random variable."""

    mean: float
    std_dev: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and math.isfinite(self.std_dev)):
            raise NonPositiveVariance(f"moments must be finite, got ({self.mean}, {self.std_dev})")
        if self.std_dev <= 0:
            raise NonPositiveVariance(f"std_dev must be > 0, got {self.std_dev}")

    @property
    def variance(self) -> float:
        return self.std_dev * self.std_dev


@dataclass(frozen=True)
class ShiftedSpec:
    """A spec recentred by the per-item share of a threshold: mean - q/N."""

    spec: MomentSpec
    threshold_q: float
    count_n: int

    def __post_init__(self) -> None:
        if int(self.count_n) != self.count_n or self.count_n < 1:
            raise ValueError(f"count_n must be a positive integer, got {self.count_n}")

    @property
    def shifted_mean(self) -> float:
        return self.spec.mean - self.threshold_q / self.count_n

    @property
    def std_dev(self) -> float:
        return self.spec.std_dev


@dataclass(frozen=True)
class TwoPointDistribution:
    """Law taking ``low`` with probability ``beta`` and ``high`` otherwise."""

    low: float
    high: float
    beta: float

    def __post_init__(self) -> None:
        if not self.low < self.high:
            raise ValueError(f"need low < high, got {self.low}, {self.high}")
        if not 0.0 < self.beta < 1.0:
            raise BetaOutOfRange(f"beta must lie in (0, 1), got {self.beta}")

    @property
    def mean(self) -> float:
        return self.beta * self.low + (1.0 - self.beta) * self.high

    @property
    def variance(self) -> float:
        width = self.high - self.low
        return self.beta * (1.0 - self.beta) * width * width

    def atoms(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return ((self.low, self.beta), (self.high, 1.0 - self.beta))

    def as_dict(self) -> dict[str, Any]:
        return {"type": "two_point", "low": self.low, "high": self.high, "beta": self.beta}


class BoundKind(Enum):
    TAIL_LOWER = "TailLower"
    LOSS_UPPER = "LossUpper"
    ABS_UPPER = "AbsUpper"
    PERCENTILE_ENVELOPE = "PercentileEnvelope"


@dataclass(frozen=True)
class BoundReport:
    """A bound value plus, when one exists, a law attaining it.

    Attaining laws are expressed on the scale of the original variable;
    the bound target is evaluated at the report's threshold. For sums the
    attaining law is the common marginal of the iid summands (or a tuple of
    marginals in the heterogeneous case).
    """

    value: float
    kind: BoundKind
    method: str
    inputs: dict[str, Any] = field(default_factory=dict)
    attaining_distribution: Any = None

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "value": self.value,
            "kind": self.kind.value,
            "method": self.method,
            "inputs": dict(self.inputs),
        }
        dist = self.attaining_distribution
        if dist is not None:
            if isinstance(dist, tuple):
                out["attaining_distribution"] = [d.as_dict() for d in dist]
            else:
                out["attaining_distribution"] = dist.as_dict()
        return out


def check_beta(beta: float, config: NumericConfig = DEFAULT_CONFIG) -> None:
    clamp = config.probability_clamp
    if not (clamp < beta < 1.0 - clamp):
        raise BetaOutOfRange(f"beta={beta} outside ({clamp}, 1 - {clamp})")


def make_two_point(spec: MomentSpec, beta: float, config: NumericConfig = DEFAULT_CONFIG) -> TwoPointDistribution:
    check_beta(beta, config)
    sigma = spec.std_dev
    low = spec.mean - sigma * math.sqrt((1.0 - beta) / beta)
    high = spec.mean + sigma * math.sqrt(beta / (1.0 - beta))
    return TwoPointDistribution(low, high, beta)


def range_of(dist: TwoPointDistribution) -> float:
    return dist.high - dist.low


def find_root(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    config: NumericConfig = DEFAULT_CONFIG,
) -> float:
    """Bracketed root of ``func`` on [lo, hi] via Brent's method."""
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise NoRootInBracket(f"no sign change on [{lo}, {hi}]: f={f_lo}, {f_hi}")
    return brentq(
        func,
        lo,
        hi,
        xtol=config.abs_tol * 1e-4,
        rtol=4.0 * 2.220446049250313e-16,
        maxiter=config.max_iterations,
    )
