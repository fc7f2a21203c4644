"""Expected linear loss E(xi - q)+ for iid sums under two-point marginals.

With every summand on the same two-point law the sum is binomial, so the
loss is a piecewise function of beta. The pieces are delimited by the betas
at which one convolution atom crosses zero. The maximum over beta has a
closed form that sits on the first piece (total mean below q) or the last
piece (total mean above q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import binom

from .core import (
    DEFAULT_CONFIG,
    BoundKind,
    BoundReport,
    MomentSpec,
    NumericConfig,
    ShiftedSpec,
    TwoPointDistribution,
    check_beta,
    make_two_point,
)
from .iid import SumSpec


@dataclass(frozen=True)
class BinomialConvolution:
    """Law of the sum of N iid copies of a two-point marginal."""

    marginal: TwoPointDistribution
    count_n: int

    @property
    def values(self) -> np.ndarray:
        t = np.arange(self.count_n + 1)
        return (self.count_n - t) * self.marginal.low + t * self.marginal.high

    @property
    def probs(self) -> np.ndarray:
        # t counts high atoms, each with probability 1 - beta
        t = np.arange(self.count_n + 1)
        return binom.pmf(t, self.count_n, 1.0 - self.marginal.beta)

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.probs.tolist()))

    def mean(self) -> float:
        return math.fsum(self.values * self.probs)

    def variance(self) -> float:
        m = self.mean()
        return math.fsum((self.values - m) ** 2 * self.probs)

    def expected_positive_part(self, q: float = 0.0) -> float:
        excess = np.maximum(self.values - q, 0.0)
        return math.fsum(excess * self.probs)

    def tail(self, q: float = 0.0) -> float:
        return math.fsum(self.probs[self.values > q])


def binomial_convolution(marginal: TwoPointDistribution, count_n: int) -> BinomialConvolution:
    return BinomialConvolution(marginal, count_n)


@dataclass(frozen=True)
class ThresholdSequence:
    """Betas where convolution atoms change sign, from delta_0 = 1 down to delta_N = 0.

    The conventional end points hide two more sign changes. When the shifted
    mean is positive every atom is positive for beta above ``upper_edge``;
    when it is negative every atom is non-positive for beta below
    ``lower_edge``. Otherwise the edges are 1 and 0.
    """

    deltas: tuple[float, ...]
    lower_edge: float = 0.0
    upper_edge: float = 1.0

    def pieces(self) -> list[tuple[int, float, float]]:
        """(k, lo, hi) on which atoms t >= k are positive and the rest are not."""
        n = len(self.deltas) - 1
        out = []
        for k in range(1, n + 1):
            lo = max(self.deltas[k], self.lower_edge)
            hi = min(self.deltas[k - 1], self.upper_edge)
            if lo < hi:
                out.append((k, lo, hi))
        return out

    def residuals(self, shifted: ShiftedSpec) -> list[float]:
        """Zero-crossing residual of atom k at each interior delta_k."""
        n = shifted.count_n
        mu, sigma = shifted.shifted_mean, shifted.std_dev
        out = []
        for k in range(1, n):
            d = self.deltas[k]
            out.append(n * mu + sigma * (-(n - k) * math.sqrt((1 - d) / d) + k * math.sqrt(d / (1 - d))))
        return out


def thresholds(shifted: ShiftedSpec) -> ThresholdSequence:
    """delta_k is the beta at which atom (N-k)L + kH of the shifted law is zero.

    Writing x = sqrt((1-beta)/beta) the condition is the quadratic
    sigma (N-k) x^2 - N mu x - sigma k = 0, whose positive root gives
    delta_k = 1/(1 + x^2).
    """
    n = shifted.count_n
    mu, sigma = shifted.shifted_mean, shifted.std_dev
    deltas = [1.0]
    for k in range(1, n):
        disc = math.sqrt(n * n * mu * mu + 4.0 * (n - k) * k * sigma * sigma)
        if mu >= 0:
            x = (n * mu + disc) / (2.0 * (n - k) * sigma)
        else:
            # product of roots is -k/(N-k); avoids cancellation for mu < 0
            x = 2.0 * k * sigma / (disc - n * mu)
        deltas.append(1.0 / (1.0 + x * x))
    deltas.append(0.0)
    var, mu2 = sigma * sigma, mu * mu
    lower = mu2 / (var + mu2) if mu < 0 else 0.0
    upper = var / (var + mu2) if mu > 0 else 1.0
    return ThresholdSequence(tuple(deltas), lower, upper)


def _log_comb(n: int, k: np.ndarray | int) -> np.ndarray:
    return gammaln(n + 1) - gammaln(np.asarray(k) + 1) - gammaln(n - np.asarray(k) + 1)


def _first_positive_atom(n: int, low: float, high: float) -> int:
    """Smallest t with (N-t)L + tH > 0, or N+1 when none is."""
    t = np.arange(n + 1)
    positive = np.flatnonzero((n - t) * low + t * high > 0)
    return int(positive[0]) if positive.size else n + 1


def loss_objective(shifted: ShiftedSpec, beta: float, config: NumericConfig = DEFAULT_CONFIG) -> float:
    """E(sum)+ of N iid shifted two-point variables, evaluated piecewise.

    The piece index k is the first atom with positive value; k = 0 and
    k = N + 1 cover the ranges where every atom has the same sign.
    """
    check_beta(beta, config)
    n = shifted.count_n
    mu, sigma = shifted.shifted_mean, shifted.std_dev
    law = make_two_point(MomentSpec(mu, sigma), beta, config)
    k = _first_positive_atom(n, law.low, law.high)
    if k > n:
        return 0.0
    t = np.arange(k, n + 1)
    log_b, log_1b = math.log(beta), math.log1p(-beta)
    upper_mass = math.fsum(np.exp(_log_comb(n, t) + (n - t) * log_b + t * log_1b))
    value = n * mu * upper_mass
    if k >= 1:
        log_w = float(_log_comb(n - 1, k - 1)) + (k - 1) * log_1b + (n - k) * log_b
        value += n * sigma * math.sqrt(beta * (1.0 - beta)) * math.exp(log_w)
    return value


def loss_bound_pieces(
    shifted: ShiftedSpec, beta: float, config: NumericConfig = DEFAULT_CONFIG
) -> tuple[float, float]:
    """The first-piece and last-piece formulas, evaluated anywhere in (0, 1)."""
    check_beta(beta, config)
    n = shifted.count_n
    mu, sigma = shifted.shifted_mean, shifted.std_dev
    root = math.sqrt(beta * (1.0 - beta))
    z1 = -n * mu * math.expm1(n * math.log(beta)) + n * sigma * root * beta ** (n - 1)
    zn = n * mu * (1.0 - beta) ** n + n * sigma * root * (1.0 - beta) ** (n - 1)
    return z1, zn


def beta_hat_low_mean(n: int, mu: float, sigma: float) -> float:
    """Maximiser of the first piece; used when the total mean is below q."""
    var, mu2 = sigma * sigma, mu * mu
    root = math.sqrt((2 * n - 1) * var + n * n * mu2)
    return ((2 * n - 1) * var + n * mu2 - mu * root) / (2 * n * (var + mu2))


def beta_hat_high_mean(n: int, mu: float, sigma: float) -> float:
    """Maximiser of the last piece; used when the total mean is above q."""
    var, mu2 = sigma * sigma, mu * mu
    root = math.sqrt((2 * n - 1) * var + n * n * mu2)
    return (var + n * mu2 - mu * root) / (2 * n * (var + mu2))


def optimal_loss_bound(shifted: ShiftedSpec, config: NumericConfig = DEFAULT_CONFIG) -> BoundReport:
    """Sharp upper bound on E(xi - q)+ over iid sums with the given moments."""
    n = shifted.count_n
    mu, sigma = shifted.shifted_mean, shifted.std_dev
    if mu <= 0:
        beta = beta_hat_low_mean(n, mu, sigma)
        value = n * mu + n * beta**n * (-mu + sigma * math.sqrt((1.0 - beta) / beta))
        branch = "low_mean"
    else:
        beta = beta_hat_high_mean(n, mu, sigma)
        value = n * (1.0 - beta) ** n * (mu + sigma * math.sqrt(beta / (1.0 - beta)))
        branch = "high_mean"
    law = make_two_point(shifted.spec, beta, config)
    inputs = {
        "mu": shifted.spec.mean,
        "sigma": sigma,
        "n": n,
        "q": shifted.threshold_q,
        "shifted_mean": mu,
        "beta": beta,
        "branch": branch,
    }
    return BoundReport(value, BoundKind.LOSS_UPPER, "improved", inputs, law)


def abs_sum_upper(s: SumSpec, config: NumericConfig = DEFAULT_CONFIG) -> BoundReport:
    """Upper bound on E|xi - q| through (x)+ = (x + |x|)/2."""
    shifted = ShiftedSpec(s.spec, s.threshold_q, s.count_n)
    loss = optimal_loss_bound(shifted, config)
    value = 2.0 * loss.value - (s.count_n * s.spec.mean - s.threshold_q)
    return BoundReport(value, BoundKind.ABS_UPPER, "improved", loss.inputs, loss.attaining_distribution)
