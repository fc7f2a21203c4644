"""Risk pooling for a newsvendor that serves N iid demands from one stock.

Cost per unit short is b and per unit left over is h. Nature picks the iid
demand law; the order quantity q is chosen against the worst case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core import DEFAULT_CONFIG, MomentSpec, NumericConfig, TwoPointDistribution, make_two_point
from ..errors import CriticalRatioOutOfRange
from ..loss import binomial_convolution


@dataclass(frozen=True)
class InventorySolution:
    order_q: float
    worst_case_cost: float
    adverse_beta: float | None
    unit_costs: tuple[float, float]
    adverse_law: TwoPointDistribution | None = None

    def as_dict(self) -> dict:
        return {
            "order_q": self.order_q,
            "worst_case_cost": self.worst_case_cost,
            "adverse_beta": self.adverse_beta,
            "underage_b": self.unit_costs[0],
            "overage_h": self.unit_costs[1],
            "adverse_law": None if self.adverse_law is None else self.adverse_law.as_dict(),
        }


def _check_costs(b: float, h: float) -> None:
    if not (b > 0 and h > 0):
        raise CriticalRatioOutOfRange(f"unit costs must be positive, got b={b}, h={h}")


def inventory_solve(
    spec: MomentSpec, count_n: int, b: float, h: float, config: NumericConfig = DEFAULT_CONFIG
) -> InventorySolution:
    _check_costs(b, h)
    ratio = b / (b + h)
    if ratio < 0.5:
        raise CriticalRatioOutOfRange(f"critical ratio {ratio} below 1/2")
    n = count_n
    beta = ratio ** (1.0 / n)
    sigma = spec.std_dev
    odds_low = math.sqrt((1.0 - beta) / beta)
    order = n * spec.mean + sigma * (
        (2.0 * beta - 1.0) / (2.0 * math.sqrt(beta * (1.0 - beta))) - (n - 1) * odds_low
    )
    cost = b * sigma * n * odds_low
    law = make_two_point(spec, beta, config) if beta < 1.0 - config.probability_clamp else None
    return InventorySolution(order, cost, beta, (b, h), law)


def inventory_solve_aggregate(spec: MomentSpec, count_n: int, b: float, h: float) -> InventorySolution:
    _check_costs(b, h)
    root_n_sigma = math.sqrt(count_n) * spec.std_dev
    order = count_n * spec.mean + 0.5 * root_n_sigma * (math.sqrt(b / h) - math.sqrt(h / b))
    cost = spec.std_dev * math.sqrt(count_n * b * h)
    return InventorySolution(order, cost, None, (b, h))


def inventory_cost(
    spec: MomentSpec, count_n: int, b: float, h: float, order_q: float, beta: float,
    config: NumericConfig = DEFAULT_CONFIG,
) -> float:
    """Expected cost b E(D - q)+ + h E(q - D)+ under iid two-point demand."""
    conv = binomial_convolution(make_two_point(spec, beta, config), count_n)
    short = conv.expected_positive_part(order_q)
    over = short - (count_n * spec.mean - order_q)
    return b * short + h * over
