"""Independent but non-identical summands.

Both the tail and the loss problems are solved by the same observation:
at the worst case every marginal two-point law has the same support width
(range) R. That turns an N-dimensional search into a root find in R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import (
    DEFAULT_CONFIG,
    BoundKind,
    BoundReport,
    MomentSpec,
    NumericConfig,
    TwoPointDistribution,
    find_root,
    make_two_point,
)
from .errors import Infeasible, WrongTailDirection

RANGE_CAP_FACTOR = 1e6


@dataclass(frozen=True)
class HeteroSumSpec:
    specs: tuple[MomentSpec, ...]
    threshold_q: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "specs", tuple(self.specs))
        if not self.specs:
            raise ValueError("need at least one spec")
        if not math.isfinite(self.threshold_q):
            raise ValueError("threshold must be finite")

    @property
    def total_mean(self) -> float:
        return math.fsum(s.mean for s in self.specs)

    @property
    def max_std(self) -> float:
        return max(s.std_dev for s in self.specs)

    def inputs(self) -> dict:
        return {
            "mu": [s.mean for s in self.specs],
            "sigma": [s.std_dev for s in self.specs],
            "q": self.threshold_q,
        }


@dataclass(frozen=True)
class AllocationResult:
    q_split: tuple[float, ...]
    common_range: float
    bound_value: float
    branch: str = "small_gap"


def gap_small(sigma: float, r: float) -> float:
    """Smaller d with (d^2 + sigma^2)/d = r."""
    return 2.0 * sigma * sigma / (r + math.sqrt(max(r * r - 4.0 * sigma * sigma, 0.0)))


def gap_large(sigma: float, r: float) -> float:
    """Larger d with (d^2 + sigma^2)/d = r."""
    return 0.5 * (r + math.sqrt(max(r * r - 4.0 * sigma * sigma, 0.0)))


def tail_range(spec: MomentSpec, q_n: float) -> float:
    """Support width of the tail-attaining law of one variable at threshold q_n."""
    d = spec.mean - q_n
    return (d * d + spec.variance) / d


def tail_product(specs: Sequence[MomentSpec], q_split: Sequence[float]) -> float:
    """Product of per-variable stay probabilities; the tail bound is one minus this."""
    log_total = 0.0
    for spec, q_n in zip(specs, q_split):
        d = spec.mean - q_n
        if d <= 0:
            return 1.0
        log_total += math.log(spec.variance / (d * d + spec.variance))
    return math.exp(log_total)


def _grow_bracket(func, lo: float, cap: float, want_positive: bool) -> float:
    hi = max(2.0 * lo, lo + 1.0)
    while True:
        val = func(hi)
        if (val > 0) == want_positive and val != 0:
            return hi
        if hi >= cap:
            raise Infeasible(f"no sign change below range cap {cap}")
        hi = min(2.0 * hi, cap)


def allocate_tail_budget(h: HeteroSumSpec, config: NumericConfig = DEFAULT_CONFIG) -> AllocationResult:
    """Equal-range split of the gap sum(mu_n) - q across variables."""
    budget = h.total_mean - h.threshold_q
    if budget <= 0:
        raise WrongTailDirection(f"need sum of means > q, got gap {budget}")
    sigmas = [s.std_dev for s in h.specs]
    # both gap roots are defined at exactly 2 max sigma, where they coincide
    r_lo = 2.0 * h.max_std
    cap = RANGE_CAP_FACTOR * h.max_std
    edge_tol = config.abs_tol * (1.0 + budget)
    small_at_lo = math.fsum(gap_small(sg, r_lo) for sg in sigmas)
    large_at_lo = math.fsum(gap_large(sg, r_lo) for sg in sigmas)

    if budget <= small_at_lo + edge_tol:
        branch, gap = "small_gap", gap_small

        def residual(r: float) -> float:
            return math.fsum(gap_small(sg, r) for sg in sigmas) - budget

        r_hi = _grow_bracket(residual, r_lo, cap, want_positive=False)
    elif budget >= large_at_lo - edge_tol:
        branch, gap = "large_gap", gap_large

        def residual(r: float) -> float:
            return math.fsum(gap_large(sg, r) for sg in sigmas) - budget

        r_hi = _grow_bracket(residual, r_lo, max(cap, 2.0 * budget), want_positive=True)
    else:
        raise Infeasible(
            f"gap {budget} lies between the equal-range branches ({small_at_lo}, {large_at_lo})"
        )
    # a budget within edge_tol of the branch point sits on the bracket end itself
    r_star = r_lo if abs(residual(r_lo)) <= edge_tol else find_root(residual, r_lo, r_hi, config)
    gaps = [gap(sg, r_star) for sg in sigmas]
    # put the rounding residue on the largest gap so the split sums to q exactly
    excess = math.fsum(gaps) - budget
    j = max(range(len(gaps)), key=lambda i: gaps[i])
    gaps[j] -= excess
    q_split = tuple(s.mean - d for s, d in zip(h.specs, gaps))
    bound = 1.0 - tail_product(h.specs, q_split)
    return AllocationResult(q_split, r_star, bound, branch)


def equal_range_tail_lower(
    h: HeteroSumSpec, config: NumericConfig = DEFAULT_CONFIG
) -> tuple[AllocationResult, BoundReport]:
    alloc = allocate_tail_budget(h, config)
    laws = []
    for spec, q_n in zip(h.specs, alloc.q_split):
        d = spec.mean - q_n
        stay = spec.variance / (d * d + spec.variance)
        laws.append(TwoPointDistribution(q_n, spec.mean + spec.variance / d, stay))
    inputs = h.inputs() | {"q_split": list(alloc.q_split), "common_range": alloc.common_range}
    report = BoundReport(alloc.bound_value, BoundKind.TAIL_LOWER, "equal_range", inputs, tuple(laws))
    return alloc, report


def hetero_loss_objective(h: HeteroSumSpec, betas: Sequence[float]) -> float:
    """First-piece loss objective with the per-variable terms summed inside.

    Only the total shift sum(mu_n) - q enters, so the split of q is immaterial.
    """
    shift = h.total_mean - h.threshold_q
    prod = math.prod(betas)
    inner = math.fsum(s.std_dev * math.sqrt((1.0 - b) / b) for s, b in zip(h.specs, betas))
    return shift + prod * (-shift + inner)


def _beta_for_range(sigma: float, r: float) -> float:
    """Larger beta with sigma / sqrt(beta (1 - beta)) = r, via its complement."""
    s = math.sqrt(max(1.0 - 4.0 * sigma * sigma / (r * r), 0.0))
    return 1.0 - 2.0 * sigma * sigma / (r * r * (1.0 + s))


def hetero_loss_upper(h: HeteroSumSpec, config: NumericConfig = DEFAULT_CONFIG) -> BoundReport:
    """Upper bound on E(xi - q)+ for independent summands with total mean below q.

    Stationarity of the objective in each beta_n forces a common range R equal to
    twice the bracketed sum in the objective, which is a scalar equation in R.
    """
    deficit = h.threshold_q - h.total_mean
    if deficit <= 0:
        raise WrongTailDirection(f"need sum of means < q, got deficit {deficit}")
    sigmas = [s.std_dev for s in h.specs]

    def complement_sum(r: float) -> float:
        return math.fsum(1.0 - _beta_for_range(sg, r) for sg in sigmas)

    def stationarity(r: float) -> float:
        return r * (1.0 - 2.0 * complement_sum(r)) - 2.0 * deficit

    r_lo = 2.0 * h.max_std + config.probability_clamp
    cap = max(RANGE_CAP_FACTOR * h.max_std, 4.0 * deficit + 4.0 * h.max_std)
    if stationarity(r_lo) >= 0:
        raise Infeasible("stationarity residual is non-negative at the smallest admissible range")
    r_hi = _grow_bracket(stationarity, r_lo, cap, want_positive=True)
    r_star = find_root(stationarity, r_lo, r_hi, config)
    betas = [_beta_for_range(sg, r_star) for sg in sigmas]
    value = hetero_loss_objective(h, betas)
    laws = tuple(make_two_point(s, b, config) for s, b in zip(h.specs, betas))
    inputs = h.inputs() | {"betas": betas, "common_range": r_star}
    return BoundReport(value, BoundKind.LOSS_UPPER, "equal_range", inputs, laws)
