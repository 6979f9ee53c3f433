"""
Monte Carlo oracle for the delay laws.

Trials are cut into fixed-size blocks and block ``i`` draws from its own
generator seeded by ``SeedSequence(seed, spawn_key=(i,))``. The sample
multiset therefore depends only on ``(seed, trials)``; ``streams`` only sets
how many worker threads process blocks.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from . import fbl, ibl
from .channel import ChannelModel, snr_sample

__all__ = [
    "BLOCK_SIZE",
    "McConfig",
    "EmpiricalDistribution",
    "McMoments",
    "ViolationEstimate",
    "simulate_snr",
    "simulate_ibl",
    "simulate_fbl",
    "empirical_violation",
    "empirical_moments",
    "binomial_sigma",
    "tail_index",
]

BLOCK_SIZE = 1 << 16
# below this Hill index the variance estimate is not trustworthy
HEAVY_TAIL_INDEX = 2.5


@dataclass(frozen=True)
class McConfig:
    trials: int = 1_000_000
    seed: int = 0
    streams: int = 1

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1000:
            raise ValueError(f"trials must be an integer >= 1000, got {self.trials}")
        if int(self.streams) != self.streams or self.streams < 1:
            raise ValueError(f"streams must be a positive integer, got {self.streams}")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted per-draw delays (s). ``inf`` entries come from zero-SNR draws."""

    sorted_samples: np.ndarray
    n_infinite: int = 0

    @property
    def n(self):
        return len(self.sorted_samples)

    @property
    def finite_samples(self):
        return self.sorted_samples[: self.n - self.n_infinite]

    def ecdf(self, t):
        """Fraction of draws ``<= t``."""
        return np.searchsorted(self.sorted_samples, t, side="right") / self.n

    def quantile(self, p):
        return np.quantile(self.finite_samples, p)

    def histogram(self, edges):
        """Density estimate on ``edges`` normalised by all ``n`` draws."""
        counts, _ = np.histogram(self.finite_samples, bins=edges)
        return counts / (self.n * np.diff(edges))


@dataclass(frozen=True)
class McMoments:
    """Sample moments; ``heavy_tail`` marks a tail too thin-sampled to trust the variance."""

    mean: float
    variance: float
    std_error_mean: float
    n: int
    n_infinite: int = 0
    tail_index: float = math.inf
    heavy_tail: bool = False
    std_error_variance: float = math.nan


@dataclass(frozen=True)
class ViolationEstimate:
    """Exceedance frequency with its 95% Wilson interval."""

    p: float
    ci_low: float
    ci_high: float
    exceed: int
    n: int

    def covers(self, value):
        return self.ci_low <= value <= self.ci_high


def _block_bounds(trials):
    starts = range(0, trials, BLOCK_SIZE)
    return [(i, s, min(s + BLOCK_SIZE, trials)) for i, s in enumerate(starts)]


def _run_blocks(seed, trials, streams, draw):
    """Apply ``draw(rng, size)`` per block and concatenate in block order."""
    blocks = _block_bounds(trials)

    def one(block):
        i, lo, hi = block
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i,))))
        return draw(rng, hi - lo)

    if streams == 1:
        parts = [one(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=streams) as pool:
            parts = list(pool.map(one, blocks))
    return np.concatenate(parts)


def simulate_snr(m: ChannelModel, mc: McConfig):
    """``mc.trials`` SNR draws in block order."""
    return _run_blocks(mc.seed, mc.trials, mc.streams, lambda rng, k: snr_sample(m, rng, k))


def _to_distribution(delays):
    delays = np.sort(delays)
    return EmpiricalDistribution(sorted_samples=delays, n_infinite=int(np.isinf(delays).sum()))


def simulate_ibl(m: ChannelModel, c: ibl.LinkConfig, mc: McConfig) -> EmpiricalDistribution:
    """Shannon-rate delays ``L / (B log2(1 + gamma))`` over ``mc.trials`` fades."""
    return _to_distribution(ibl.delay_sample(simulate_snr(m, mc), c))


def simulate_fbl(m: ChannelModel, c: fbl.FblConfig, mc: McConfig) -> EmpiricalDistribution:
    """Minimum-blocklength delays ``n(gamma) / B`` over ``mc.trials`` fades."""
    return _to_distribution(fbl.exact_delay_sample(simulate_snr(m, mc), c))


def empirical_violation(d: EmpiricalDistribution, tau_th) -> ViolationEstimate:
    if not (tau_th > 0):
        raise ValueError("tau_th must be > 0")
    exceed = int(d.n - np.searchsorted(d.sorted_samples, tau_th, side="right"))
    ci = binomtest(exceed, d.n).proportion_ci(confidence_level=0.95, method="wilson")
    return ViolationEstimate(p=exceed / d.n, ci_low=float(ci.low), ci_high=float(ci.high),
                             exceed=exceed, n=d.n)


def empirical_moments(d: EmpiricalDistribution) -> McMoments:
    """Sample mean and unbiased variance of the finite draws (two-pass)."""
    x = d.finite_samples
    if len(x) < 2:
        raise ValueError("need at least two finite samples")
    mean = float(np.mean(x))
    dev = x - mean
    var = float(np.sum(dev * dev) / (len(x) - 1))
    m4 = float(np.mean(dev ** 4))
    alpha = tail_index(d)
    return McMoments(mean=mean, variance=var, std_error_mean=math.sqrt(var / len(x)),
                     n=len(x), n_infinite=d.n_infinite, tail_index=alpha,
                     heavy_tail=alpha < HEAVY_TAIL_INDEX,
                     std_error_variance=math.sqrt(max(m4 - var * var, 0.0) / len(x)))


def tail_index(d: EmpiricalDistribution, k=None):
    """Hill estimate of the power-law index of the upper delay tail.

    Moments of order ``>= alpha`` do not exist; for the Rayleigh link with
    ``N`` antennas the true index is ``N``. ``k`` defaults to ``sqrt(n)``
    upper order statistics.
    """
    x = d.finite_samples
    if k is None:
        k = max(int(math.sqrt(len(x))), 10)
    k = min(k, len(x) - 1)
    top = x[len(x) - k:]
    ref = x[len(x) - k - 1]
    if not ref > 0:
        return math.inf
    h = float(np.mean(np.log(top / ref)))
    return 1.0 / h if h > 0 else math.inf


def binomial_sigma(f, n):
    """Standard deviation of an empirical CDF value ``f`` from ``n`` draws."""
    f = np.asarray(f, dtype=float)
    return np.sqrt(f * (1.0 - f) / n)
