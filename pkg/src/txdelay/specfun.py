"""
Special functions used by the delay analytics.

Gaussian tail probability and its inverse, the (regularized) incomplete gamma
functions for real positive shape, the principal branch of the Lambert W
function (iterative and truncated power series) and the ``Psi`` helper
``Psi(x, y) = y**(-x) * Gamma(x, y)``.

All functions accept scalars or array_like input and return a float for
scalar input, an ndarray otherwise.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainWarning",
    "NumericalWarning",
    "SpecFunTolerances",
    "gaussian_q",
    "log_gaussian_q",
    "gaussian_q_inv",
    "reg_lower_inc_gamma",
    "reg_upper_inc_gamma",
    "lower_inc_gamma",
    "upper_inc_gamma",
    "psi_helper",
    "lambert_w0",
    "lambert_w0_series",
]

_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_INV_E = math.exp(-1.0)
_TINY = 1e-300


class DomainWarning(UserWarning):
    """An input lies outside the range where an approximation is trustworthy."""


class NumericalWarning(UserWarning):
    """A result may have lost accuracy (cancellation, truncation)."""


@dataclass(frozen=True)
class SpecFunTolerances:
    """Stopping rule shared by the iterative solvers."""

    rel_tol: float = 1e-14
    max_iter: int = 1000

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-3):
            raise ValueError(f"rel_tol must lie in (0, 1e-3], got {self.rel_tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 8:
            raise ValueError(f"max_iter must be an integer >= 8, got {self.max_iter}")


DEFAULT_TOL = SpecFunTolerances()


def _out(arr, scalar):
    return float(arr) if scalar else arr


# --------------------------------------------------------------------------
# Gaussian tail
# --------------------------------------------------------------------------

_erfc = np.frompyfunc(math.erfc, 1, 1)


def gaussian_q(x):
    """Upper tail of the standard normal law, ``Q(x) = P(Z > x)``.

    Underflows gracefully to 0 beyond x ~ 38; use :func:`log_gaussian_q`
    when the logarithm of a deep tail is needed.
    """
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("gaussian_q requires finite arguments")
    q = 0.5 * np.asarray(_erfc(x / _SQRT2), dtype=float)
    return _out(q, scalar)


def log_gaussian_q(x):
    """Natural log of ``Q(x)``, accurate where ``Q`` itself underflows."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    deep = x > 30.0
    if np.any(~deep):
        out[~deep] = np.log(gaussian_q(x[~deep]))
    if np.any(deep):
        xd = x[deep]
        # asymptotic Mills-ratio series, 5 terms is exact to double precision for x > 30
        z = 1.0 / (xd * xd)
        series = 1.0 - z * (1.0 - 3.0 * z * (1.0 - 5.0 * z * (1.0 - 7.0 * z * (1.0 - 9.0 * z))))
        out[deep] = -0.5 * xd * xd - _LOG_SQRT_2PI - np.log(xd) + np.log(series)
    return _out(out[0] if scalar else out, scalar)


# Acklam's rational approximation of the normal quantile, |rel err| < 1.2e-9.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)


def _upper_quantile_guess(p):
    """Rough ``Q^{-1}(p)`` for a scalar p in (0, 1)."""
    if p < 0.02425:
        r = math.sqrt(-2.0 * math.log(p))
        num = ((((_C[0] * r + _C[1]) * r + _C[2]) * r + _C[3]) * r + _C[4]) * r + _C[5]
        den = (((_D[0] * r + _D[1]) * r + _D[2]) * r + _D[3]) * r + 1.0
        return -num / den
    if p > 1.0 - 0.02425:
        return -_upper_quantile_guess(1.0 - p)
    r = p - 0.5
    s = r * r
    num = (((((_A[0] * s + _A[1]) * s + _A[2]) * s + _A[3]) * s + _A[4]) * s + _A[5]) * r
    den = ((((_B[0] * s + _B[1]) * s + _B[2]) * s + _B[3]) * s + _B[4]) * s + 1.0
    return -num / den


def _q_inv_scalar(p, tol):
    if not (0.0 < p < 1.0):
        raise ValueError(f"gaussian_q_inv requires p in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        # symmetry keeps Newton working on the small tail
        return -_q_inv_scalar(1.0 - p, tol)
    x = _upper_quantile_guess(p)
    for _ in range(tol.max_iter):
        qx = 0.5 * math.erfc(x / _SQRT2)
        dens = math.exp(-0.5 * x * x - _LOG_SQRT_2PI)
        # Halley step on Q(x) - p; Q' = -phi, Q'' = x phi
        r = (qx - p) / dens
        step = r / (1.0 + 0.5 * x * r)
        x += step
        if abs(step) <= tol.rel_tol * max(abs(x), 1.0):
            break
    return x


def gaussian_q_inv(p, tol=DEFAULT_TOL):
    """Inverse of :func:`gaussian_q` on (0, 1).

    A rational first guess is polished by Halley steps on ``Q`` itself, so
    the result keeps full double precision far into the tail (p ~ 1e-300).
    """
    scalar = np.ndim(p) == 0
    arr = np.atleast_1d(np.asarray(p, dtype=float))
    out = np.array([_q_inv_scalar(float(v), tol) for v in arr.ravel()]).reshape(arr.shape)
    return _out(out[0] if scalar else out, scalar)


# --------------------------------------------------------------------------
# Incomplete gamma
# --------------------------------------------------------------------------

_lgamma = np.frompyfunc(math.lgamma, 1, 1)


def _check_gamma_args(s, x):
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(~(s > 0)) or np.any(~np.isfinite(s)):
        raise ValueError("incomplete gamma requires a finite shape s > 0")
    if np.any(~(x >= 0)):
        raise ValueError("incomplete gamma requires x >= 0")
    return np.broadcast_arrays(s, x)


def _log_prefactor(s, x):
    # log(x^s e^-x / Gamma(s)); x > 0 assumed
    return s * np.log(x) - x - _lgamma(s).astype(float)


def _p_series(s, x, tol):
    """Regularized lower gamma P(s, x) by its power series (x < s + 1)."""
    ap = s.copy()
    term = 1.0 / s
    total = term.copy()
    active = np.ones(s.shape, dtype=bool)
    for _ in range(tol.max_iter):
        ap[active] += 1.0
        term[active] *= x[active] / ap[active]
        total[active] += term[active]
        active &= np.abs(term) > np.abs(total) * _stop_tol(tol)
        if not active.any():
            break
    else:
        warnings.warn("incomplete gamma series hit max_iter", NumericalWarning, stacklevel=3)
    return total * np.exp(_log_prefactor(s, x))


def _stop_tol(tol):
    # below a few ulps the update can stall without ever rounding to exactly 1
    return max(tol.rel_tol * 0.01, 4.0 * np.finfo(float).eps)


def _q_contfrac(s, x, tol):
    """Regularized upper gamma Q(s, x) by Lentz's continued fraction (x >= s + 1)."""
    tiny = 1e-300
    b = x + 1.0 - s
    c = np.full(s.shape, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(s.shape, dtype=bool)
    for i in range(1, tol.max_iter + 1):
        an = -i * (i - s)
        b = b + 2.0
        d_new = an * d + b
        d_new = np.where(np.abs(d_new) < tiny, tiny, d_new)
        c_new = b + an / c
        c_new = np.where(np.abs(c_new) < tiny, tiny, c_new)
        d_new = 1.0 / d_new
        delta = d_new * c_new
        d = np.where(active, d_new, d)
        c = np.where(active, c_new, c)
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > _stop_tol(tol)
        if not active.any():
            break
    else:
        warnings.warn("incomplete gamma continued fraction hit max_iter",
                      NumericalWarning, stacklevel=3)
    return np.exp(_log_prefactor(s, x)) * h


def _reg_gamma_pair(s, x, tol):
    s, x = _check_gamma_args(s, x)
    s = np.array(s, dtype=float, ndmin=1)
    x = np.array(x, dtype=float, ndmin=1)
    p = np.zeros(s.shape)
    q = np.ones(s.shape)
    pos = x > 0
    inf = np.isinf(x)
    p[inf], q[inf] = 1.0, 0.0
    ser = pos & ~inf & (x < s + 1.0)
    cf = pos & ~inf & ~ser
    if ser.any():
        p[ser] = np.minimum(_p_series(s[ser], x[ser], tol), 1.0)
        q[ser] = 1.0 - p[ser]
    if cf.any():
        q[cf] = np.minimum(_q_contfrac(s[cf], x[cf], tol), 1.0)
        p[cf] = 1.0 - q[cf]
    return p, q


def reg_lower_inc_gamma(s, x, tol=DEFAULT_TOL):
    """Regularized lower incomplete gamma ``P(s, x) = gamma(s, x) / Gamma(s)``."""
    scalar = np.ndim(s) == 0 and np.ndim(x) == 0
    p, _ = _reg_gamma_pair(s, x, tol)
    return _out(p[0] if scalar else p, scalar)


def reg_upper_inc_gamma(s, x, tol=DEFAULT_TOL):
    """Regularized upper incomplete gamma ``Q(s, x) = Gamma(s, x) / Gamma(s)``."""
    scalar = np.ndim(s) == 0 and np.ndim(x) == 0
    _, q = _reg_gamma_pair(s, x, tol)
    return _out(q[0] if scalar else q, scalar)


def lower_inc_gamma(s, x, tol=DEFAULT_TOL):
    """Lower incomplete gamma ``gamma(s, x) = int_0^x t^(s-1) e^-t dt``.

    Uses the power series below ``x = s + 1`` and a continued fraction for
    the upper function above it; the other tail follows from
    ``gamma(s, x) + Gamma(s, x) = Gamma(s)``.
    """
    scalar = np.ndim(s) == 0 and np.ndim(x) == 0
    p, _ = _reg_gamma_pair(s, x, tol)
    s_b = np.broadcast_to(np.asarray(s, dtype=float), p.shape)
    out = p * np.exp(_lgamma(s_b).astype(float))
    return _out(out[0] if scalar else out, scalar)


def upper_inc_gamma(s, x, tol=DEFAULT_TOL):
    """Upper incomplete gamma ``Gamma(s, x) = int_x^inf t^(s-1) e^-t dt``."""
    scalar = np.ndim(s) == 0 and np.ndim(x) == 0
    _, q = _reg_gamma_pair(s, x, tol)
    s_b = np.broadcast_to(np.asarray(s, dtype=float), q.shape)
    out = q * np.exp(_lgamma(s_b).astype(float))
    return _out(out[0] if scalar else out, scalar)


def psi_helper(x, y, tol=DEFAULT_TOL):
    """``Psi(x, y) = y**(-x) * Gamma(x, y)`` for x, y > 0, evaluated in log space."""
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if np.any(~(xa > 0)) or np.any(~(ya > 0)) or np.any(~np.isfinite(ya)):
        raise ValueError("psi_helper requires x > 0 and finite y > 0")
    _, q = _reg_gamma_pair(xa, ya, tol)
    xb, yb = np.broadcast_arrays(xa, ya)
    xb = np.array(xb, ndmin=1)
    yb = np.array(yb, ndmin=1)
    with np.errstate(divide="ignore"):
        log_val = np.log(q) + _lgamma(xb).astype(float) - xb * np.log(yb)
    out = np.exp(log_val)
    return _out(out[0] if scalar else out, scalar)


# --------------------------------------------------------------------------
# Lambert W, principal branch
# --------------------------------------------------------------------------

def _w0_guess(x):
    if x < -0.25:
        # branch-point expansion in p = sqrt(2(ex + 1))
        p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    if x < 3.0:
        return math.log1p(x) * (1.0 - 0.15 * math.log1p(x))
    l1 = math.log(x)
    l2 = math.log(l1)
    return l1 - l2 + l2 / l1


def _w0_scalar(x, tol):
    if x < -_INV_E:
        # rounding of -1/e itself is tolerated
        if x < -_INV_E * (1.0 + 4e-16):
            raise ValueError(f"lambert_w0 requires x >= -1/e, got {x}")
        return -1.0
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    w = _w0_guess(x)
    for _ in range(tol.max_iter):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol.rel_tol * max(abs(x), _TINY):
            break
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w_new = w - step
        if w_new < -1.0:
            w_new = 0.5 * (w - 1.0)
        if abs(w_new - w) <= 4e-16 * max(abs(w_new), 1.0):
            w = w_new
            break
        w = w_new
    return w


def lambert_w0(x, tol=DEFAULT_TOL):
    """Principal branch ``W0`` of the Lambert W function on ``[-1/e, inf)``.

    Halley iteration from a branch-point series, a log-based guess or the
    asymptotic expansion, depending on the region.
    """
    scalar = np.ndim(x) == 0
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.array([_w0_scalar(float(v), tol) for v in arr.ravel()]).reshape(arr.shape)
    return _out(out[0] if scalar else out, scalar)


def lambert_series_coefficients(terms):
    """Magnitudes ``m**(m-1) / m!`` for ``m = 1..terms``."""
    m = np.arange(1, int(terms) + 1, dtype=float)
    return np.exp((m - 1.0) * np.log(m) - _lgamma(m + 1.0).astype(float))


def lambert_w0_series(x, terms, early_stop_tol=0.0):
    """Partial sum of the Taylor series ``W0(x) = sum (-m)^(m-1)/m! x^m``.

    Parameters
    ----------
    x : array_like
        Argument; the series converges for ``|x| <= 1/e``.
    terms : int
        Number of terms ``M`` to keep.
    early_stop_tol : float, optional
        Drop trailing terms once a term falls below this fraction of the
        running sum. The default keeps all ``M`` terms.
    """
    if int(terms) != terms or terms < 1:
        raise ValueError(f"terms must be a positive integer, got {terms}")
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(xa) > _INV_E):
        warnings.warn("lambert_w0_series used outside |x| <= 1/e; the series may diverge",
                      DomainWarning, stacklevel=2)
    coef = lambert_series_coefficients(terms)
    m = np.arange(1, int(terms) + 1)
    sign = np.where(m % 2 == 1, 1.0, -1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        t = sign * coef * xa[..., None] ** m
    if early_stop_tol > 0:
        partial = np.cumsum(t, axis=-1)
        small = np.abs(t) < early_stop_tol * np.abs(partial)
        # once a term is negligible, everything after it is dropped
        keep = np.cumsum(small, axis=-1) <= 1
        t = np.where(keep, t, 0.0)
    out = t.sum(axis=-1)
    return _out(out[0] if scalar else out, scalar)
