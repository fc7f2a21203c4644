"""Independent verification engines.

Nothing here relies on the closed forms it is used to check: convolutions
are built atom by atom, expectations are summed directly, Monte Carlo uses
index-keyed random streams, and the normal reference is cross-checked by
adaptive quadrature.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate
from scipy.stats import norm

from .core import DEFAULT_CONFIG, MomentSpec, NumericConfig, TwoPointDistribution
from .errors import TooLarge

MAX_ATOMS = 10**6
MC_BLOCK = 1 << 14


@dataclass(frozen=True)
class DiscreteLaw:
    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if values.shape != probs.shape or values.ndim != 1 or values.size == 0:
            raise ValueError("values and probs must be equal-length non-empty vectors")
        if np.any(probs < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(math.fsum(probs) - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {math.fsum(probs)}")
        order = np.argsort(values, kind="stable")
        object.__setattr__(self, "values", values[order])
        object.__setattr__(self, "probs", probs[order])

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[float, float]]) -> "DiscreteLaw":
        pairs = list(atoms)
        return cls(np.array([v for v, _ in pairs]), np.array([p for _, p in pairs]))

    @classmethod
    def from_two_point(cls, dist: TwoPointDistribution) -> "DiscreteLaw":
        return cls.from_atoms(dist.atoms())

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.probs.tolist()))

    def mean(self) -> float:
        return math.fsum(self.values * self.probs)

    def variance(self) -> float:
        m = self.mean()
        return math.fsum((self.values - m) ** 2 * self.probs)

    def shifted(self, offset: float) -> "DiscreteLaw":
        return DiscreteLaw(self.values + offset, self.probs)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int


def _merge(values: np.ndarray, probs: np.ndarray, rel_tol: float) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(values, kind="stable")
    values, probs = values[order], probs[order]
    scale = max(float(np.max(np.abs(values))), 1.0)
    new_group = np.empty(values.size, dtype=bool)
    new_group[0] = True
    new_group[1:] = np.diff(values) > rel_tol * scale
    group = np.cumsum(new_group) - 1
    merged_p = np.bincount(group, weights=probs)
    # keep the probability-weighted position of each merged cluster
    merged_v = np.bincount(group, weights=values * probs)
    keep = merged_p > 0
    first_v = values[new_group]
    merged_v = np.where(keep, merged_v / np.where(keep, merged_p, 1.0), first_v)
    return merged_v, merged_p


def convolve(a: DiscreteLaw, b: DiscreteLaw, config: NumericConfig = DEFAULT_CONFIG) -> DiscreteLaw:
    if a.values.size * b.values.size > MAX_ATOMS * 16:
        raise TooLarge("pairwise product of atoms is too large")
    values = np.add.outer(a.values, b.values).ravel()
    probs = np.multiply.outer(a.probs, b.probs).ravel()
    values, probs = _merge(values, probs, config.rel_tol)
    if values.size > MAX_ATOMS:
        raise TooLarge(f"convolution has {values.size} atoms")
    return DiscreteLaw(values, probs / math.fsum(probs))


def convolve_iid(law: DiscreteLaw, count_n: int, config: NumericConfig = DEFAULT_CONFIG) -> DiscreteLaw:
    """N-fold convolution by repeated squaring."""
    if count_n < 1:
        raise ValueError("count_n must be positive")
    k = law.values.size
    if math.comb(count_n + k - 1, k - 1) > MAX_ATOMS:
        raise TooLarge(f"{count_n}-fold convolution of {k} atoms exceeds {MAX_ATOMS} atoms")
    result: DiscreteLaw | None = None
    power = law
    n = count_n
    while n:
        if n & 1:
            result = power if result is None else convolve(result, power, config)
        n >>= 1
        if n:
            power = convolve(power, power, config)
    assert result is not None
    return result


def convolve_all(laws: Sequence[DiscreteLaw], config: NumericConfig = DEFAULT_CONFIG) -> DiscreteLaw:
    """Law of the sum of independent, possibly different, discrete variables."""
    it = iter(laws)
    total = next(it)
    for law in it:
        total = convolve(total, law, config)
    return total


def exact_expected_loss(law: DiscreteLaw, q: float) -> float:
    return math.fsum(np.maximum(law.values - q, 0.0) * law.probs)


def exact_expected_abs(law: DiscreteLaw, q: float) -> float:
    return math.fsum(np.abs(law.values - q) * law.probs)


def exact_tail(law: DiscreteLaw, q: float, strict: bool = True, tol: float = 0.0) -> float:
    """Pr(X > q) or Pr(X >= q); atoms within ``tol`` of q count as sitting on q."""
    mask = law.values > q + tol if strict else law.values >= q - tol
    return math.fsum(law.probs[mask])


def exact_left_tail(law: DiscreteLaw, q: float, strict: bool = True, tol: float = 0.0) -> float:
    mask = law.values < q - tol if strict else law.values <= q + tol
    return math.fsum(law.probs[mask])


def _block_losses(law: DiscreteLaw, count_n: int, q: float, seed: int, block: int, size: int) -> np.ndarray:
    # each block owns an independent stream keyed by (seed, block index)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))
    cdf = np.cumsum(law.probs)
    cdf[-1] = 1.0
    u = rng.random((size, count_n))
    draws = law.values[np.searchsorted(cdf, u, side="right").clip(max=law.values.size - 1)]
    return np.maximum(draws.sum(axis=1) - q, 0.0)


def mc_expected_loss(
    law: DiscreteLaw,
    count_n: int,
    q: float,
    samples: int,
    seed: int,
    workers: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of E(sum of N iid draws - q)+.

    Samples are generated in fixed-size blocks, each from its own stream, so
    the estimate is bitwise identical for any number of workers.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    seed = int(seed) & ((1 << 64) - 1)
    n_blocks = -(-samples // MC_BLOCK)
    sizes = [min(MC_BLOCK, samples - i * MC_BLOCK) for i in range(n_blocks)]

    def run(i: int) -> np.ndarray:
        return _block_losses(law, count_n, q, seed, i, sizes[i])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    else:
        parts = [run(i) for i in range(n_blocks)]
    losses = np.concatenate(parts)
    mean = math.fsum(losses) / samples
    std = float(np.std(losses, ddof=1)) if samples > 1 else 0.0
    return McEstimate(mean, std / math.sqrt(samples), samples, seed)


def normal_expected_loss(mean: float, std_dev: float, q: float) -> float:
    """E(X - q)+ for X ~ Normal(mean, std_dev^2)."""
    if std_dev <= 0:
        raise ValueError("std_dev must be positive")
    d = (mean - q) / std_dev
    return float((mean - q) * norm.cdf(d) + std_dev * norm.pdf(d))


def normal_expected_loss_quadrature(mean: float, std_dev: float, q: float) -> float:
    """The same quantity by adaptive quadrature over standardised values."""
    z0 = (q - mean) / std_dev
    value, _ = integrate.quad(
        lambda z: (mean + std_dev * z - q) * norm.pdf(z), z0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200
    )
    return value


def pair_sum_tail(dist, q: float) -> float:
    """Pr(X1 + X2 > q) for iid X1, X2 with a continuous scipy distribution."""
    lo, hi = dist.support()
    value, _ = integrate.quad(lambda x: dist.pdf(x) * dist.sf(q - x), lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
    return value


def random_feasible_law(rng: np.random.Generator, spec: MomentSpec, n_atoms: int) -> DiscreteLaw:
    """Random discrete law with exactly the given mean and standard deviation."""
    while True:
        raw = rng.standard_normal(n_atoms) * rng.exponential(1.0, n_atoms)
        probs = rng.dirichlet(np.full(n_atoms, 0.5))
        probs = np.maximum(probs, 1e-6)
        probs /= probs.sum()
        m = float(np.dot(raw, probs))
        s = math.sqrt(float(np.dot((raw - m) ** 2, probs)))
        if s > 1e-8:
            break
    values = spec.mean + spec.std_dev * (raw - m) / s
    return DiscreteLaw(values, probs)


@dataclass(frozen=True)
class AdversarialReport:
    trials: int
    max_loss: float
    loss_bound: float
    loss_violations: int
    min_tail: float | None
    tail_bound: float | None
    tail_violations: int
    worst_tail_law: DiscreteLaw | None

    @property
    def passed(self) -> bool:
        return self.loss_violations == 0 and self.tail_violations == 0


def adversarial_search(
    spec: MomentSpec,
    count_n: int,
    q: float,
    trials: int,
    seed: int,
    loss_bound: float,
    tail_bound: float | None = None,
    slack: float = 1e-9,
    max_atoms: int = 4,
) -> AdversarialReport:
    """Try random feasible iid laws against a loss upper bound and a tail lower bound."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & ((1 << 64) - 1), count_n]))
    max_loss = -math.inf
    min_tail = math.inf
    worst = None
    loss_viol = tail_viol = 0
    for _ in range(trials):
        law = random_feasible_law(rng, spec, int(rng.integers(2, max_atoms + 1)))
        total = convolve_iid(law, count_n)
        loss = exact_expected_loss(total, q)
        max_loss = max(max_loss, loss)
        if loss > loss_bound + slack:
            loss_viol += 1
        if tail_bound is not None:
            tail = exact_tail(total, q, strict=True)
            if tail < min_tail:
                min_tail, worst = tail, law
            if tail < tail_bound - slack:
                tail_viol += 1
    return AdversarialReport(
        trials,
        max_loss,
        loss_bound,
        loss_viol,
        None if tail_bound is None else min_tail,
        tail_bound,
        tail_viol,
        worst,
    )
