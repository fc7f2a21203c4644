"""Certification suite: attainment by exact enumeration and adversarial search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import MomentSpec, ShiftedSpec
from .iid import SumSpec, improved_left_tail_lower, improved_tail_lower
from .loss import optimal_loss_bound
from .oracle import DiscreteLaw, adversarial_search, convolve_iid, exact_expected_loss, exact_left_tail, exact_tail

ATTAIN_TOL = 1e-9


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class VerificationSummary:
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def default_points(count_n: int) -> list[tuple[float, float, float]]:
    """(mu, sigma, q) with per-item gaps of +0.5, 0 and -0.5 standard deviations."""
    return [(1.0, 1.0, 0.5 * count_n), (1.0, 1.0, 1.0 * count_n), (1.0, 1.0, 1.5 * count_n)]


def certify_point(
    mu: float, sigma: float, q: float, count_n: int, trials: int, seed: int, slack: float = 1e-9
) -> list[Check]:
    spec = MomentSpec(mu, sigma)
    label = f"mu={mu:g} sigma={sigma:g} q={q:g} N={count_n}"
    checks = []
    s = SumSpec(spec, count_n, q)
    tail_bound = None
    tol = ATTAIN_TOL * (1.0 + abs(q))
    if s.per_item_gap != 0:
        right = s.per_item_gap > 0
        rep = improved_tail_lower(s) if right else improved_left_tail_lower(s)
        total = convolve_iid(DiscreteLaw.from_two_point(rep.attaining_distribution), count_n)
        got = exact_tail(total, q, tol=tol) if right else exact_left_tail(total, q, tol=tol)
        checks.append(Check(f"tail attainment [{label}]", abs(got - rep.value) <= ATTAIN_TOL,
                            f"bound={rep.value:.12g} enumerated={got:.12g}"))
        if right:
            tail_bound = rep.value
    loss = optimal_loss_bound(ShiftedSpec(spec, q, count_n))
    total = convolve_iid(DiscreteLaw.from_two_point(loss.attaining_distribution), count_n)
    got = exact_expected_loss(total, q)
    checks.append(Check(f"loss attainment [{label}]", abs(got - loss.value) <= ATTAIN_TOL * (1 + loss.value),
                        f"bound={loss.value:.12g} enumerated={got:.12g}"))
    adv = adversarial_search(spec, count_n, q, trials, seed, loss.value, tail_bound, slack)
    checks.append(Check(f"adversarial loss [{label}]", adv.loss_violations == 0,
                        f"{adv.loss_violations}/{trials} laws exceed {loss.value:.12g}; max={adv.max_loss:.12g}"))
    if tail_bound is not None:
        checks.append(Check(f"adversarial tail [{label}]", adv.tail_violations == 0,
                            f"{adv.tail_violations}/{trials} laws undercut {tail_bound:.12g}; min={adv.min_tail:.12g}"))
    return checks


def run_verification(
    count_n: int, seed: int, trials: int = 1000, points: Sequence[tuple[float, float, float]] | None = None
) -> VerificationSummary:
    checks: list[Check] = []
    for mu, sigma, q in points or default_points(count_n):
        checks.extend(certify_point(mu, sigma, q, count_n, trials, seed))
    return VerificationSummary(tuple(checks))
