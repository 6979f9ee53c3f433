"""
Infinite-blocklength (Shannon rate) delay analytics.

A packet of ``L`` bits sent at the Shannon rate ``R = log2(1 + gamma)`` over
bandwidth ``B`` takes ``tau = L / (B R)`` seconds. The module gives the laws
of ``R`` and ``tau``, the violation probability ``P(tau > tau_th)``, rate
moments (closed form through the ``ln t ~ b t^(1/b) - b`` surrogate, and the
high-SNR delta-method form) and the Taylor approximations of the delay mean
and variance built on them.
"""

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .channel import ChannelModel, snr_logpdf, snr_pdf
from .specfun import DomainWarning, NumericalWarning, psi_helper, reg_lower_inc_gamma, reg_upper_inc_gamma

__all__ = [
    "LinkConfig",
    "IblApproxParams",
    "RateMoments",
    "MomentMethod",
    "MomentReport",
    "HeavyTailWarning",
    "rate_cdf",
    "rate_pdf",
    "delay_cdf",
    "delay_pdf",
    "delay_violation",
    "delay_sample",
    "log_surrogate",
    "rate_moments_exact",
    "rate_moments_highsnr",
    "rate_moments_quadrature",
    "delay_moments",
    "delay_moments_quadrature",
    "delay_moment_finite",
]

LN2 = math.log(2.0)


class HeavyTailWarning(UserWarning):
    """The delay law has no finite moment of the requested order."""


@dataclass(frozen=True)
class LinkConfig:
    """Payload size in bits and bandwidth in Hz."""

    payload_bits: float
    bandwidth: float

    def __post_init__(self):
        if not (self.payload_bits > 0) or not (self.bandwidth > 0):
            raise ValueError("payload_bits and bandwidth must be positive")

    @property
    def bits_per_hz(self):
        return self.payload_bits / self.bandwidth


@dataclass(frozen=True)
class IblApproxParams:
    """Constant ``b`` of the logarithm surrogate; 1000 keeps the error near 0.1%."""

    log_b: float = 1000.0

    def __post_init__(self):
        if not (self.log_b >= 100):
            raise ValueError(f"log_b must be >= 100, got {self.log_b}")


@dataclass(frozen=True)
class RateMoments:
    """First two moments of the rate in bits/s/Hz."""

    m1: float
    m2: float

    def __post_init__(self):
        if not (self.m2 >= self.m1 ** 2 * (1 - 1e-12)):
            raise ValueError(f"inconsistent rate moments: E[R^2]={self.m2} < E[R]^2={self.m1 ** 2}")

    @property
    def variance(self):
        return max(self.m2 - self.m1 ** 2, 0.0)

    @classmethod
    def from_mean_var(cls, mean, var):
        return cls(m1=float(mean), m2=float(var + mean * mean))


class MomentMethod(str, enum.Enum):
    THEOREM1 = "theorem1"
    THEOREM2 = "theorem2"
    THEOREM3 = "theorem3"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class MomentReport:
    """Mean delay (s) and jitter, i.e. delay variance (s^2)."""

    mean_delay: float
    jitter: float
    method: MomentMethod
    heavy_tail: bool = False
    clamped: bool = False


# --------------------------------------------------------------------------
# distributions
# --------------------------------------------------------------------------

def _threshold_law(m: ChannelModel, expo, neg_dexpo=None):
    """Delay CDF (and pdf) when ``tau <= t`` iff ``ln(1 + gamma) >= expo(t)``.

    ``neg_dexpo`` is ``-d expo / dt``; when given the density is returned too.
    All big exponentials stay in log space so tiny ``t`` gives exactly 0.
    """
    expo = np.asarray(expo, dtype=float)
    with np.errstate(over="ignore"):
        x = np.expm1(expo)
    cdf = reg_upper_inc_gamma(float(m.antennas), m.rate * x)
    if neg_dexpo is None:
        return cdf
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        logf = np.log(neg_dexpo) + expo + snr_logpdf(m, x)
        pdf = np.where(np.isnan(logf), 0.0, np.exp(logf))
    return cdf, pdf


def _as_positive_t(t, what="t"):
    ta = np.asarray(t, dtype=float)
    if np.any(~(ta > 0)):
        raise ValueError(f"{what} must be > 0")
    return ta


def rate_cdf(m: ChannelModel, y):
    """``P(R <= y) = F_gamma(2^y - 1)``."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("rate must be >= 0")
    with np.errstate(over="ignore"):
        x = np.expm1(LN2 * y)
    return reg_lower_inc_gamma(float(m.antennas), m.rate * x)


def rate_pdf(m: ChannelModel, y):
    """Density of the Shannon rate: ``ln2 * 2^y * f_gamma(2^y - 1)``."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("rate must be >= 0")
    with np.errstate(over="ignore", invalid="ignore"):
        logf = math.log(LN2) + LN2 * y + snr_logpdf(m, np.expm1(LN2 * y))
        return np.where(np.isnan(logf), 0.0, np.exp(logf))


def _ibl_exponent(c: LinkConfig, t):
    return LN2 * c.bits_per_hz / t


def delay_cdf(m: ChannelModel, c: LinkConfig, t):
    """``P(tau <= t) = Gamma(N, (N/rho)(2^(L/(Bt)) - 1)) / Gamma(N)``."""
    t = _as_positive_t(t)
    return _threshold_law(m, _ibl_exponent(c, t))


def delay_pdf(m: ChannelModel, c: LinkConfig, t):
    """Delay density in 1/s."""
    t = _as_positive_t(t)
    a = _ibl_exponent(c, t)
    return _threshold_law(m, a, a / t)[1]


def delay_violation(m: ChannelModel, c: LinkConfig, tau_th):
    """``P(tau > tau_th) = gamma_lower(N, (N/rho)(2^(L/(B tau_th)) - 1)) / Gamma(N)``."""
    tau_th = _as_positive_t(tau_th, "tau_th")
    with np.errstate(over="ignore"):
        x = np.expm1(_ibl_exponent(c, tau_th))
    return reg_lower_inc_gamma(float(m.antennas), m.rate * x)


def delay_sample(gamma, c: LinkConfig):
    """Per-draw Shannon delay ``L / (B log2(1 + gamma))``; ``inf`` at gamma = 0."""
    g = np.asarray(gamma, dtype=float)
    with np.errstate(divide="ignore"):
        return c.bits_per_hz / (np.log1p(g) / LN2)


# --------------------------------------------------------------------------
# rate moments
# --------------------------------------------------------------------------

def log_surrogate(t, b):
    """``b t^(1/b) - b``, the power-law stand-in for ``ln t``."""
    return b * np.expm1(np.log(t) / b)


def rate_moments_exact(m: ChannelModel, p: IblApproxParams = IblApproxParams()) -> RateMoments:
    """Closed-form ``E[R]``, ``E[R^2]`` via the surrogate ``ln t ~ b t^(1/b) - b``.

    Expands ``(t - 1)^(N-1)`` binomially and integrates each power against
    ``exp(-N t / rho)`` on ``[1, inf)``, giving sums of ``Psi(k + 1 + j/b, N/rho)``.
    The alternating signs cancel for large ``N``; a ``NumericalWarning`` is
    raised when the estimated relative rounding error exceeds 1e-6.
    """
    n = m.antennas
    y = m.rate
    b = float(p.log_b)
    k = np.arange(n, dtype=float)
    log_binom = np.array([math.lgamma(n) - math.lgamma(kk + 1) - math.lgamma(n - kk) for kk in k])
    sign = np.where((n - 1 - k) % 2 == 0, 1.0, -1.0)
    log_pref = n * math.log(y) + y - math.lgamma(n)
    weight = sign * np.exp(log_binom + log_pref)

    psi0 = psi_helper(k + 1.0, y)
    psi1 = psi_helper(k + 1.0 + 1.0 / b, y)
    psi2 = psi_helper(k + 1.0 + 2.0 / b, y)

    t1 = weight * b * (psi1 - psi0)
    t2 = weight * b * b * (psi2 - 2.0 * psi1 + psi0)
    m1 = t1.sum() / LN2
    m2 = t2.sum() / LN2 ** 2

    eps = np.finfo(float).eps
    err1 = 8 * eps * b * np.sum(np.abs(weight) * psi1) / LN2
    err2 = 16 * eps * b * b * np.sum(np.abs(weight) * psi1) / LN2 ** 2
    if err1 > 1e-6 * abs(m1) or err2 > 1e-6 * abs(m2):
        warnings.warn(
            f"rate moment sums lost precision to cancellation (N={n}, est. rel. err "
            f"{max(err1 / abs(m1), err2 / abs(m2)):.1e})", NumericalWarning, stacklevel=2)
    if m2 < m1 * m1:
        # surrogate rounding at tiny variance; keep the pair consistent
        m2 = m1 * m1
    return RateMoments(m1=float(m1), m2=float(m2))


def rate_moments_highsnr(m: ChannelModel) -> RateMoments:
    """Second-order delta-method moments of ``log2(1 + gamma)`` about ``gamma = rho``."""
    n, rho = m.antennas, m.avg_snr
    if rho < 3.0:
        warnings.warn(f"high-SNR rate moments used at rho={rho:.3g} < 3", DomainWarning, stacklevel=2)
    r = rho / (1.0 + rho)
    mean = math.log2(1.0 + rho) - r * r / (2.0 * LN2 * n)
    var = r * r / (LN2 ** 2 * n) - r ** 4 / (4.0 * LN2 ** 2 * n * n)
    return RateMoments.from_mean_var(mean, max(var, 0.0))


def _snr_quad(m: ChannelModel, g):
    """``int_0^inf g(x) f_gamma(x) dx`` split around the bulk of the law."""
    rho, n = m.avg_snr, m.antennas
    hi = rho * (1.0 + 10.0 / math.sqrt(n)) * 20.0

    def integrand(x):
        return g(x) * snr_pdf(m, x)

    pieces = [(0.0, rho), (rho, hi)]
    total = 0.0
    for lo, up in pieces:
        total += integrate.quad(integrand, lo, up, limit=400, epsabs=0.0, epsrel=1e-12)[0]
    total += integrate.quad(integrand, hi, np.inf, limit=400, epsabs=0.0, epsrel=1e-10)[0]
    return total


def rate_moments_quadrature(m: ChannelModel) -> RateMoments:
    """Rate moments by adaptive Gauss-Kronrod quadrature over the SNR law."""
    m1 = _snr_quad(m, lambda x: math.log2(1.0 + x))
    m2 = _snr_quad(m, lambda x: math.log2(1.0 + x) ** 2)
    return RateMoments(m1=m1, m2=max(m2, m1 * m1))


# --------------------------------------------------------------------------
# delay moments
# --------------------------------------------------------------------------

def delay_moment_finite(m: ChannelModel, order: int) -> bool:
    """Whether ``E[tau^order]`` is finite.

    Near ``gamma = 0`` the delay grows like ``1/gamma`` while the SNR density
    behaves like ``gamma^(N-1)``, so the moment exists iff ``N > order``.
    The same holds for the finite-blocklength delay.
    """
    return m.antennas > order


def delay_moments(m: ChannelModel, c: LinkConfig, rm: RateMoments, method="theorem1") -> MomentReport:
    """Second-order Taylor mean and variance of ``tau = (L/B) / R``.

    ``theorem1`` writes the result in ``E[R]``, ``E[R^2]``; ``theorem2`` in
    ``E[R]``, ``Var[R]``. Algebraically they coincide for the same moments;
    in practice ``theorem2`` is paired with :func:`rate_moments_highsnr`.
    A negative variance is clamped to 0 with a warning. For ``N = 1`` the true
    moments are infinite and ``heavy_tail`` is set.
    """
    method = MomentMethod(method)
    if method not in (MomentMethod.THEOREM1, MomentMethod.THEOREM2):
        raise ValueError(f"delay_moments supports theorem1/theorem2, got {method.value}")
    e1 = rm.m1
    if not (e1 > 0):
        raise ValueError(f"mean rate must be positive, got {e1}")
    scale = c.bits_per_hz
    if method is MomentMethod.THEOREM1:
        e2 = rm.m2
        mean = scale * e2 / e1 ** 3
        jit = scale ** 2 * (-(e2 ** 2) / e1 ** 6 + 3.0 * e2 / e1 ** 4 - 2.0 / e1 ** 2)
    else:
        v = rm.variance
        mean = scale * (1.0 / e1 + v / e1 ** 3)
        jit = scale ** 2 * (v / e1 ** 4 - v * v / e1 ** 6)
    clamped = False
    if jit < 0:
        # rounding in theorem1's form can give -1e-30-ish values at zero variance
        if jit < -1e-12 * mean * mean:
            warnings.warn(f"Taylor jitter negative ({jit:.3e}); clamped to 0", NumericalWarning, stacklevel=2)
            clamped = True
        jit = 0.0
    heavy = not delay_moment_finite(m, 1)
    if heavy:
        warnings.warn("single-antenna delay has infinite mean and variance; "
                      "Taylor values are not true moments", HeavyTailWarning, stacklevel=2)
    return MomentReport(mean_delay=float(mean), jitter=float(jit), method=method,
                        heavy_tail=heavy, clamped=clamped)


def delay_moments_quadrature(m: ChannelModel, c: LinkConfig):
    """Exact ``(E[tau], Var[tau])`` by quadrature; ``inf`` where they diverge."""
    mean = math.inf
    var = math.inf
    if delay_moment_finite(m, 1):
        mean = _snr_quad(m, lambda x: c.bits_per_hz * LN2 / math.log1p(x) if x > 0 else 0.0)
    if delay_moment_finite(m, 2):
        sec = _snr_quad(m, lambda x: (c.bits_per_hz * LN2 / math.log1p(x)) ** 2 if x > 0 else 0.0)
        var = sec - mean * mean
    return mean, var
