"""Newsvendor revenue exposure when the spot price is itself random.

The target is E[P (D - q)+] for a spot price P and demand D with known
means, variances and correlation. The worst case couples them so that
|D - q| is proportional to P, which reduces the problem to a single
Cauchy-Schwarz step and yields a three-point joint law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core import BoundKind, BoundReport, MomentSpec
from ..errors import CorrelationOutOfRange, DegenerateDenominator, InfeasibleMasses

MASS_TOL = 1e-12


@dataclass(frozen=True)
class ThreePointJoint:
    points: tuple[tuple[float, float, float], ...]
    k_ratio: float

    def __post_init__(self) -> None:
        if len(self.points) != 3:
            raise ValueError("need exactly three points")
        total = math.fsum(p for _, _, p in self.points)
        if abs(total - 1.0) > 1e-9:
            raise InfeasibleMasses(f"masses sum to {total}")

    def expectation(self, func) -> float:
        return math.fsum(p * func(s, d) for s, d, p in self.points)

    def moment_residuals(
        self, price: MomentSpec | float, demand: MomentSpec, rho: float
    ) -> dict[str, float]:
        mu_s, sd_s = _price_moments(price)
        return {
            "E[P]": self.expectation(lambda s, d: s) - mu_s,
            "E[D]": self.expectation(lambda s, d: d) - demand.mean,
            "E[P^2]": self.expectation(lambda s, d: s * s) - (mu_s**2 + sd_s**2),
            "E[D^2]": self.expectation(lambda s, d: d * d) - (demand.mean**2 + demand.variance),
            "E[PD]": self.expectation(lambda s, d: s * d) - (mu_s * demand.mean + rho * sd_s * demand.std_dev),
        }

    def as_dict(self) -> dict:
        return {
            "type": "three_point_joint",
            "k_ratio": self.k_ratio,
            "points": [{"spot_price": s, "demand": d, "prob": p} for s, d, p in self.points],
        }


def _price_moments(price: MomentSpec | float) -> tuple[float, float]:
    """A bare float stands for a deterministic price (zero variance)."""
    if isinstance(price, MomentSpec):
        return price.mean, price.std_dev
    return float(price), 0.0


def _bound_value(mu_s: float, sd_s: float, mu_d: float, sd_d: float, rho: float, q: float) -> float:
    return 0.5 * (mu_s * mu_d + rho * sd_s * sd_d - q * mu_s + math.hypot(mu_s, sd_s) * math.hypot(mu_d - q, sd_d))


def _check_rho(rho: float) -> None:
    if not -1.0 <= rho <= 1.0:
        raise CorrelationOutOfRange(f"rho must lie in [-1, 1], got {rho}")


def proportionality_constant(price: MomentSpec | float, demand: MomentSpec, q: float) -> float:
    mu_s, sd_s = _price_moments(price)
    return math.hypot(demand.mean - q, demand.std_dev) / math.hypot(mu_s, sd_s)


def random_price_loss_upper(price: MomentSpec | float, demand: MomentSpec, rho: float, q: float) -> BoundReport:
    _check_rho(rho)
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    mu_s, sd_s = _price_moments(price)
    mu_d, sd_d = demand.mean, demand.std_dev
    value = _bound_value(mu_s, sd_s, mu_d, sd_d, rho, q)
    inputs = {"price_mu": mu_s, "price_sigma": sd_s, "demand_mu": mu_d, "demand_sigma": sd_d, "rho": rho, "q": q}
    law = None
    try:
        law = random_price_worst_case(price, demand, rho, q)
    except (DegenerateDenominator, InfeasibleMasses):
        pass
    return BoundReport(value, BoundKind.LOSS_UPPER, "random_price", inputs, law)


def random_price_worst_case(price: MomentSpec | float, demand: MomentSpec, rho: float, q: float) -> ThreePointJoint:
    _check_rho(rho)
    mu_s, sd_s = _price_moments(price)
    mu_d, sd_d = demand.mean, demand.std_dev
    k = proportionality_constant(price, demand, q)
    bound = _bound_value(mu_s, sd_s, mu_d, sd_d, rho, q)
    gap = mu_d - q
    den_up, den_dn = gap + k * mu_s, gap - k * mu_s
    scale = 1e-12 * (abs(gap) + k * abs(mu_s) + 1.0)
    if abs(den_up) <= scale or abs(den_dn) <= scale:
        raise DegenerateDenominator("mu_d - q +/- k mu_s vanishes")
    cov = rho * sd_s * sd_d
    upper = mu_s + (k * sd_s**2 + cov) / den_up
    lower = mu_s + (-k * sd_s**2 + cov) / den_dn
    beta_up = den_up**2 / (4.0 * k * bound)
    beta_dn = den_dn**2 / (4.0 * (gap**2 + sd_d**2) - 4.0 * k * bound)
    middle = 1.0 - beta_up - beta_dn
    for m in (beta_up, beta_dn, middle):
        if m < -MASS_TOL or m > 1.0 + MASS_TOL:
            raise InfeasibleMasses(f"masses ({beta_up}, {middle}, {beta_dn}) leave [0, 1]")
    middle = max(middle, 0.0)
    points = ((upper, q + k * upper, beta_up), (0.0, q, middle), (lower, q - k * lower, beta_dn))
    return ThreePointJoint(points, k)
