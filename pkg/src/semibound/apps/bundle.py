"""Robust bundle pricing.

A seller offers N items as one bundle at price q. A customer buys when the
summed valuation exceeds the price. Valuations are independent with known
mean and variance, and the seller maximises q * Pr(sum > q) under the worst
law.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from ..core import DEFAULT_CONFIG, MomentSpec, NumericConfig, find_root
from ..errors import EnumerationTooLarge, Infeasible, NoRootInBracket
from ..hetero import HeteroSumSpec, equal_range_tail_lower, gap_large, gap_small

GRID_POINTS = 1000
MAX_ENUMERATION_N = 20


class BundleMethod(Enum):
    IMPROVED = "Improved"
    AGGREGATE = "Aggregate"
    UNEQUAL_MOMENTS = "UnequalMoments"


@dataclass(frozen=True)
class BundleSolution:
    price_q: float
    worst_case_profit: float
    safety_factor_t: float
    method: BundleMethod
    diagnostics: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "price_q": self.price_q,
            "worst_case_profit": self.worst_case_profit,
            "safety_factor_t": self.safety_factor_t,
            "method": self.method.value,
            "diagnostics": list(self.diagnostics),
        }


def _require_positive_mean(spec: MomentSpec) -> None:
    if spec.mean <= 0:
        raise Infeasible(f"bundle pricing needs a positive mean valuation, got {spec.mean}")


def improved_profit(spec: MomentSpec, count_n: int, t: float) -> float:
    """Worst-case revenue at price N(mu - t sigma)."""
    price = count_n * (spec.mean - t * spec.std_dev)
    return price * -math.expm1(-count_n * math.log1p(t * t))


def optimality_residual(spec: MomentSpec, count_n: int, t: float) -> float:
    """First-order condition in t, divided through by (1 + t^2)^N."""
    n, ratio, t2 = count_n, spec.mean / spec.std_dev, t * t
    lead = 1.0 - 2.0 * n * t2 + t2 + 2.0 * n * t * ratio
    return lead * math.exp(-n * math.log1p(t2)) - (1.0 + t2)


def bundle_price_improved(
    spec: MomentSpec, count_n: int, config: NumericConfig = DEFAULT_CONFIG
) -> BundleSolution:
    _require_positive_mean(spec)
    lo = config.probability_clamp
    hi = spec.mean / spec.std_dev - config.probability_clamp
    if hi <= lo:
        raise NoRootInBracket("mean/std ratio too small to bracket the safety factor")
    grid = np.linspace(lo, hi, GRID_POINTS + 1)
    vals = [optimality_residual(spec, count_n, t) for t in grid]
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(float(a))
        elif (fa > 0) != (fb > 0) and fb != 0.0:
            roots.append(find_root(lambda t: optimality_residual(spec, count_n, t), a, b, config))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    if not roots:
        raise NoRootInBracket(f"no root of the optimality condition on ({lo}, {hi})")
    best = max(roots, key=lambda t: improved_profit(spec, count_n, t))
    diag = ("MultiRoot",) if len(roots) > 1 else ()
    price = count_n * (spec.mean - best * spec.std_dev)
    return BundleSolution(price, improved_profit(spec, count_n, best), best, BundleMethod.IMPROVED, diag)


def bundle_price_aggregate(spec: MomentSpec, count_n: int) -> BundleSolution:
    """Price from the independence-blind tail bound; t solves t^3 + 3t = c."""
    _require_positive_mean(spec)
    c = 2.0 * math.sqrt(count_n) * spec.mean / spec.std_dev
    t = 2.0 * math.sinh(math.asinh(c / 2.0) / 3.0)
    price = count_n * spec.mean - t * math.sqrt(count_n) * spec.std_dev
    profit = price * t * t / (t * t + 1.0)
    return BundleSolution(price, profit, t, BundleMethod.AGGREGATE)


def _unequal_profit(specs: Sequence[MomentSpec], r: float, gap) -> float:
    gaps = [gap(s.std_dev, r) for s in specs]
    price = math.fsum(s.mean for s in specs) - math.fsum(gaps)
    log_stay = math.fsum(math.log(s.variance / (r * d)) for s, d in zip(specs, gaps))
    return price * -math.expm1(log_stay)


def bundle_price_unequal(
    specs: Sequence[MomentSpec], config: NumericConfig = DEFAULT_CONFIG
) -> BundleSolution:
    """Bundle price when items differ in mean and variance.

    Profit is maximised over the common range R of the equal-range worst case.
    Both gap branches of the per-item quadratic are scanned and the better
    optimum is kept, so identical items reproduce the iid price.
    """
    specs = tuple(specs)
    for s in specs:
        _require_positive_mean(s)
    total_mean = math.fsum(s.mean for s in specs)
    max_std = max(s.std_dev for s in specs)
    r_lo = 2.0 * max_std
    candidates = []
    branches = [("small_gap", gap_small, np.geomspace(r_lo, r_lo * 1e4, 4 * GRID_POINTS))]
    r_top = 2.0 * total_mean + r_lo
    if r_top > r_lo * (1 + 1e-9):
        branches.append(("large_gap", gap_large, np.linspace(r_lo, r_top, 4 * GRID_POINTS)))
    for name, gap, grid in branches:
        vals = np.array([_unequal_profit(specs, r, gap) for r in grid])
        i = int(np.argmax(vals))
        a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
        res = minimize_scalar(
            lambda r: -_unequal_profit(specs, r, gap),
            bounds=(a, b),
            method="bounded",
            options={"xatol": config.abs_tol * max(1.0, b), "maxiter": config.max_iterations},
        )
        r_best, p_best = (res.x, -res.fun) if -res.fun >= vals[i] else (grid[i], vals[i])
        candidates.append((float(p_best), float(r_best), name, gap))
    profit, r_star, name, gap = max(candidates, key=lambda c: c[0])
    if not profit > 0:
        raise Infeasible("no positive worst-case profit found")
    price = total_mean - math.fsum(gap(s.std_dev, r_star) for s in specs)
    t = (total_mean - price) / math.fsum(s.std_dev for s in specs)
    diag = (f"branch={name}", f"common_range={r_star!r}")
    return BundleSolution(price, profit, t, BundleMethod.UNEQUAL_MOMENTS, diag)


def mixed_bundle_check(
    specs: Sequence[MomentSpec],
    component_prices: Sequence[float],
    bundle_price: float,
    config: NumericConfig = DEFAULT_CONFIG,
) -> tuple[float, float]:
    """Expected revenue with and without separate item sales under the worst-case law.

    The law is the equal-range two-point product built at the bundle price.
    Customers pick the subset with the highest surplus, where the full set
    costs the bundle price and any other subset costs the sum of its item
    prices. Ties go to walking away, then to smaller subsets.
    """
    specs = tuple(specs)
    n = len(specs)
    if n > MAX_ENUMERATION_N:
        raise EnumerationTooLarge(f"2^{n} states exceeds the enumeration cap")
    if len(component_prices) != n:
        raise ValueError("need one component price per item")
    _, report = equal_range_tail_lower(HeteroSumSpec(specs, bundle_price), config)
    laws = report.attaining_distribution
    tol = 1e-9 * (1.0 + abs(bundle_price))
    subsets = [s for k in range(1, n + 1) for s in itertools.combinations(range(n), k)]
    mixed = pure = 0.0
    for state in itertools.product((0, 1), repeat=n):
        prob = 1.0
        vals = []
        for law, hi in zip(laws, state):
            prob *= (1.0 - law.beta) if hi else law.beta
            vals.append(law.high if hi else law.low)
        total = math.fsum(vals)
        if total - bundle_price > tol:
            pure += prob * bundle_price
        best_surplus, best_pay = tol, 0.0
        for sub in subsets:
            pay = bundle_price if len(sub) == n else math.fsum(component_prices[i] for i in sub)
            surplus = math.fsum(vals[i] for i in sub) - pay
            if surplus > best_surplus:
                best_surplus, best_pay = surplus, pay
        mixed += prob * best_pay
    return mixed, pure
