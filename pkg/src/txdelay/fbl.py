"""
Finite-blocklength delay analytics.

The achievable rate follows the normal approximation
``R = log2(1 + g) - sqrt(V(g)/n) Q^{-1}(eps)`` with dispersion
``V(g) = (1 - (1 + g)^-2) (log2 e)^2``. The minimum blocklength carrying
``L`` bits solves a quadratic in ``sqrt(n)`` and the delay is ``n / B``.

Distributions come in two flavours: the Lambert-W form, which inverts the
blocklength after replacing ``sqrt(1 - (1+g)^-2)`` by ``1 - (1+g)^-2 / 2``,
and the high-SNR form which sets ``V = (log2 e)^2``. The high-SNR delay is
then bounded by a three-term expansion whose mean and variance give the
closed-form moments.
"""

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .channel import ChannelModel
from .ibl import LN2, MomentMethod, MomentReport, RateMoments, _as_positive_t, _threshold_law, delay_moment_finite
from .specfun import (
    DomainWarning,
    NumericalWarning,
    gaussian_q_inv,
    lambert_series_coefficients,
    lambert_w0_series,
    reg_lower_inc_gamma,
)

__all__ = [
    "FblConfig",
    "SeriesParams",
    "UTerms",
    "dispersion",
    "fbl_rate",
    "min_blocklength",
    "exact_delay_sample",
    "u_of_t",
    "fbl_delay_cdf",
    "fbl_delay_pdf",
    "fbl_delay_cdf_highsnr",
    "fbl_delay_pdf_highsnr",
    "fbl_delay_violation",
    "delay_highsnr",
    "delay_approx_terms",
    "delay_upper",
    "approx_validity_snr",
    "fbl_delay_moments",
]

LOG2E = 1.0 / LN2


@dataclass(frozen=True)
class FblConfig:
    """Payload bits ``L``, bandwidth ``B`` (Hz) and target block error rate ``eps``."""

    payload_bits: float
    bandwidth: float
    bler: float

    def __post_init__(self):
        if not (self.payload_bits > 0) or not (self.bandwidth > 0):
            raise ValueError("payload_bits and bandwidth must be positive")
        if not (0.0 < self.bler <= 0.5):
            raise ValueError(f"bler must lie in (0, 0.5], got {self.bler}")

    @cached_property
    def q_inv(self) -> float:
        """``Q^{-1}(eps)``, nonnegative since ``eps <= 0.5``."""
        return gaussian_q_inv(self.bler)

    @property
    def bits_per_hz(self):
        return self.payload_bits / self.bandwidth


@dataclass(frozen=True)
class SeriesParams:
    """Truncation of the Lambert-W series: ``M`` terms, early stop below ``early_stop_tol``."""

    lambert_terms: int = 20
    early_stop_tol: float = 1e-14

    def __post_init__(self):
        if int(self.lambert_terms) != self.lambert_terms or self.lambert_terms < 1:
            raise ValueError(f"lambert_terms must be a positive integer, got {self.lambert_terms}")
        if self.early_stop_tol < 0:
            raise ValueError("early_stop_tol must be >= 0")


@dataclass(frozen=True)
class UTerms:
    """``u(t) = ln(1 + gamma_th(t))`` and its time derivative (1/s)."""

    u_value: np.ndarray
    u_derivative: np.ndarray


# --------------------------------------------------------------------------
# per-realization quantities
# --------------------------------------------------------------------------

def _snr(gamma, strict=True):
    g = np.asarray(gamma, dtype=float)
    if strict and np.any(~(g > 0)):
        raise ValueError("SNR must be > 0 (the blocklength is unbounded at 0)")
    if not strict and np.any(g < 0):
        raise ValueError("SNR must be >= 0")
    return g


def dispersion(gamma):
    """Channel dispersion ``(1 - (1 + g)^-2) (log2 e)^2`` in bits^2."""
    g = np.asarray(gamma, dtype=float)
    return g * (2.0 + g) / (1.0 + g) ** 2 * LOG2E ** 2


def fbl_rate(gamma, n, eps):
    """Normal-approximation rate in bits per channel use; negative for tiny ``n``."""
    g = _snr(gamma, strict=False)
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    n = np.asarray(n, dtype=float)
    if np.any(~(n > 0)):
        raise ValueError("blocklength must be > 0")
    return np.log1p(g) * LOG2E - np.sqrt(dispersion(g) / n) * gaussian_q_inv(eps)


def min_blocklength(gamma, c: FblConfig):
    """Real-valued blocklength solving ``n C - sqrt(n V) Q^{-1}(eps) = L``.

    Both roots added are nonnegative, so the quadratic formula in
    ``sqrt(n)`` has no cancellation.
    """
    g = _snr(gamma)
    cap = np.log1p(g) * LOG2E
    sv = np.sqrt(dispersion(g)) * c.q_inv
    root = (sv + np.sqrt(sv * sv + 4.0 * c.payload_bits * cap)) / (2.0 * cap)
    return root * root


def exact_delay_sample(gamma, c: FblConfig):
    """Delay ``n / B`` with ``n`` the minimum blocklength; ``inf`` at ``gamma = 0``.

    Used per draw by the Monte Carlo oracle, so zero SNR is tolerated here.
    """
    g = _snr(gamma, strict=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        cap = np.log1p(g) * LOG2E
        sv = np.sqrt(dispersion(g)) * c.q_inv
        root = (sv + np.sqrt(sv * sv + 4.0 * c.payload_bits * cap)) / (2.0 * cap)
        out = root * root / c.bandwidth
    return np.where(g > 0, out, np.inf)


def delay_highsnr(gamma, c: FblConfig):
    """High-SNR delay with ``V = (log2 e)^2``; never below the exact delay."""
    g = _snr(gamma)
    lg = np.log1p(g)
    q = c.q_inv
    root = (q + np.sqrt(q * q + 4.0 * c.payload_bits * LN2 * lg)) / (2.0 * math.sqrt(c.bandwidth) * lg)
    return root * root


def approx_validity_snr(c: FblConfig) -> float:
    """SNR above which ``4 L ln2 ln(1 + g) >= Q^{-1}(eps)^2``."""
    return math.expm1(c.q_inv ** 2 / (4.0 * c.payload_bits * LN2))


def delay_approx_terms(gamma, c: FblConfig):
    """Three-term binomial expansion of :func:`delay_highsnr`."""
    g = _snr(gamma)
    thr = approx_validity_snr(c)
    if np.any(g < thr):
        warnings.warn(f"delay_approx_terms below its validity SNR {thr:.3g}", DomainWarning, stacklevel=2)
    lg = np.log1p(g)
    l2 = c.payload_bits * LN2
    q = c.q_inv
    b = c.bandwidth
    return l2 / (b * lg) + math.sqrt(l2) * q / (b * lg ** 1.5) + q * q / (2.0 * b * lg * lg)


def delay_upper(gamma, c: FblConfig):
    """Upper bound on the high-SNR delay, valid where ``ln(1 + g) > 1``."""
    g = _snr(gamma)
    lg = np.log1p(g)
    if np.any(lg <= 1.0):
        warnings.warn("delay_upper used with ln(1 + gamma) <= 1", DomainWarning, stacklevel=2)
    l2 = c.payload_bits * LN2
    q = c.q_inv
    b = c.bandwidth
    return (2.0 * l2 + q * q) / (2.0 * b * lg) + math.sqrt(l2) * q / (b * lg ** 1.5)


# --------------------------------------------------------------------------
# delay distributions
# --------------------------------------------------------------------------

def u_of_t(c: FblConfig, s: SeriesParams, t) -> UTerms:
    """Threshold exponent ``u(t)`` of the Lambert-W delay law and ``u'(t)``.

    With ``theta = Q^{-1}(eps)/sqrt(Bt)`` and ``ell = L ln2/(Bt)``::

        u = theta + ell + W0(-theta exp(-2 theta - 2 ell)) / 2

    where ``W0`` is the ``M``-term Taylor series. The series argument never
    exceeds ``1/(2e)`` in magnitude, inside the convergence disc.
    """
    t = _as_positive_t(t)
    theta = c.q_inv / np.sqrt(c.bandwidth * t)
    ell = LN2 * c.bits_per_hz / t
    x = theta * np.exp(-2.0 * theta - 2.0 * ell)
    w = lambert_w0_series(-x, s.lambert_terms, s.early_stop_tol)
    u = theta + ell + 0.5 * w

    # d/dt of sum_m m^(m-1)/m! x^m is sum_m m^(m-1)/(m-1)! x^m * dlnx/dt
    m = np.arange(1, s.lambert_terms + 1)
    coef = lambert_series_coefficients(s.lambert_terms) * m
    xm = np.asarray(x)[..., None] ** m
    terms = coef * xm
    if s.early_stop_tol > 0:
        base = lambert_series_coefficients(s.lambert_terms) * xm
        partial = np.cumsum(base, axis=-1)
        small = base < s.early_stop_tol * partial
        terms = np.where(np.cumsum(small, axis=-1) <= 1, terms, 0.0)
    dsum = terms.sum(axis=-1)
    dlnx = (theta + 2.0 * ell - 0.5) / t
    du = -0.5 * theta / t - ell / t - 0.5 * dsum * dlnx
    return UTerms(u_value=u, u_derivative=du)


def _highsnr_exponent(c: FblConfig, t):
    theta = c.q_inv / np.sqrt(c.bandwidth * t)
    ell = LN2 * c.bits_per_hz / t
    return theta + ell, (0.5 * theta + ell) / t


def fbl_delay_cdf(m: ChannelModel, c: FblConfig, s: SeriesParams, t):
    """Delay CDF ``Gamma(N, (N/rho)(e^u(t) - 1)) / Gamma(N)`` from the Lambert-W inversion."""
    ut = u_of_t(c, s, t)
    return _threshold_law(m, ut.u_value)


def fbl_delay_pdf(m: ChannelModel, c: FblConfig, s: SeriesParams, t):
    """Delay density ``-u'(t) e^u f_gamma(e^u - 1)``."""
    ut = u_of_t(c, s, t)
    return _threshold_law(m, ut.u_value, -ut.u_derivative)[1]


def fbl_delay_cdf_highsnr(m: ChannelModel, c: FblConfig, t):
    """High-SNR delay CDF; lies below :func:`fbl_delay_cdf`."""
    t = _as_positive_t(t)
    return _threshold_law(m, _highsnr_exponent(c, t)[0])


def fbl_delay_pdf_highsnr(m: ChannelModel, c: FblConfig, t):
    t = _as_positive_t(t)
    a, neg_da = _highsnr_exponent(c, t)
    return _threshold_law(m, a, neg_da)[1]


def fbl_delay_violation(m: ChannelModel, c: FblConfig, tau_th):
    """``P(tau > tau_th)`` under the high-SNR delay law."""
    tau_th = _as_positive_t(tau_th, "tau_th")
    with np.errstate(over="ignore"):
        x = np.expm1(_highsnr_exponent(c, tau_th)[0])
    return reg_lower_inc_gamma(float(m.antennas), m.rate * x)


# --------------------------------------------------------------------------
# moments
# --------------------------------------------------------------------------

def fbl_delay_moments(m: ChannelModel, c: FblConfig, rm: RateMoments) -> MomentReport:
    """Mean and variance of the delay upper bound.

    The bound is ``A Phi + C Phi^(3/2)`` with ``Phi = 1/ln(1 + gamma)``; the
    moments of ``Phi`` and ``Phi^(3/2)`` come from the second-order
    delta method in the rate moments ``rm`` (either rate-moment routine).
    """
    e = rm.m1
    if not (e > 0):
        raise ValueError(f"mean rate must be positive, got {e}")
    v = rm.variance
    q = c.q_inv
    l2 = c.payload_bits * LN2
    b = c.bandwidth

    e_phi = (1.0 / e + v / e ** 3) / LN2
    var_phi = (v / e ** 4 - v * v / e ** 6) / LN2 ** 2
    e_phi32 = (1.0 / e ** 1.5 + 15.0 * v / (8.0 * e ** 3.5)) / LN2 ** 1.5
    var_phi32 = (9.0 * v / (4.0 * e ** 5) - 225.0 * v * v / (64.0 * e ** 7)) / LN2 ** 3

    lin = (2.0 * l2 + q * q) / (2.0 * b)
    mean = lin * e_phi + math.sqrt(l2) * q / b * e_phi32
    jit = lin ** 2 * var_phi + l2 * q * q / b ** 2 * var_phi32
    clamped = False
    if jit < 0:
        if jit < -1e-12 * mean * mean:
            warnings.warn(f"Taylor jitter negative ({jit:.3e}); clamped to 0", NumericalWarning, stacklevel=2)
            clamped = True
        jit = 0.0
    heavy = not delay_moment_finite(m, 1)
    return MomentReport(mean_delay=float(mean), jitter=float(jit), method=MomentMethod.THEOREM3,
                        heavy_tail=heavy, clamped=clamped)
