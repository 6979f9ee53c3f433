"""
SNR laws of the quasi-static Rayleigh link.

With ``N`` transmit antennas and average SNR ``rho`` the received SNR is
``Gamma(N, rho/N)`` (shape ``N``, scale ``rho/N``); ``N = 1`` is the
exponential law of the single-antenna link.
"""

import math
from dataclasses import dataclass

import numpy as np

from .specfun import reg_lower_inc_gamma

__all__ = [
    "ChannelModel",
    "PathLossParams",
    "avg_snr_from_pathloss",
    "db_to_linear",
    "linear_to_db",
    "snr_cdf",
    "snr_pdf",
    "snr_logpdf",
    "snr_sample",
]


@dataclass(frozen=True)
class ChannelModel:
    """Antenna count ``N`` and linear average SNR ``rho``."""

    antennas: int
    avg_snr: float

    def __post_init__(self):
        if int(self.antennas) != self.antennas or self.antennas < 1:
            raise ValueError(f"antennas must be a positive integer, got {self.antennas}")
        if not (self.avg_snr > 0) or not math.isfinite(self.avg_snr):
            raise ValueError(f"avg_snr must be positive and finite, got {self.avg_snr}")
        object.__setattr__(self, "antennas", int(self.antennas))
        object.__setattr__(self, "avg_snr", float(self.avg_snr))

    @property
    def rate(self):
        """Gamma rate parameter ``N / rho``."""
        return self.antennas / self.avg_snr


@dataclass(frozen=True)
class PathLossParams:
    """Large-scale link budget: ``rho = P_t * chi0 * d**(-alpha) / sigma2``."""

    tx_power: float
    ref_gain: float
    distance: float
    exponent: float
    noise_power: float

    def __post_init__(self):
        for name in ("tx_power", "ref_gain", "distance", "exponent", "noise_power"):
            v = getattr(self, name)
            if not (v > 0) or not math.isfinite(v):
                raise ValueError(f"{name} must be positive and finite, got {v}")


def avg_snr_from_pathloss(p: PathLossParams) -> float:
    """Average SNR of the link described by ``p`` (linear)."""
    beta = p.ref_gain * p.distance ** (-p.exponent)
    return p.tx_power * beta / p.noise_power


def db_to_linear(db):
    """``10**(db/10)``; the single dB entry point used by the CLI."""
    if np.ndim(db) == 0:
        return 10.0 ** (float(db) / 10.0)
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(lin):
    return 10.0 * np.log10(lin)


def snr_cdf(m: ChannelModel, x):
    """``P(gamma <= x) = gamma_lower(N, N x / rho) / Gamma(N)``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("snr_cdf requires x >= 0")
    out = reg_lower_inc_gamma(float(m.antennas), m.rate * x)
    return out


def snr_logpdf(m: ChannelModel, x):
    """Log density of the SNR; ``-inf`` where the density vanishes."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0):
        raise ValueError("snr_pdf requires x >= 0")
    n = m.antennas
    with np.errstate(divide="ignore", invalid="ignore"):
        out = n * math.log(m.rate) - math.lgamma(n) + (n - 1) * np.log(x) - m.rate * x
    if n == 1:
        out = np.where(np.isfinite(x), math.log(m.rate) - m.rate * x, -np.inf)
    out = np.where(np.isnan(out), -np.inf, out)
    return float(out[0]) if scalar else out


def snr_pdf(m: ChannelModel, x):
    """``N^N x^(N-1) exp(-N x / rho) / (rho^N Gamma(N))``."""
    return np.exp(snr_logpdf(m, x))


def snr_sample(m: ChannelModel, rng: np.random.Generator, size=None):
    """Draw SNRs as ``(rho/N) * (sum of N unit exponentials)``.

    ``size=None`` returns a single float.
    """
    n = 1 if size is None else int(size)
    e = rng.standard_exponential((n, m.antennas))
    g = e.sum(axis=1) * (m.avg_snr / m.antennas)
    return float(g[0]) if size is None else g
