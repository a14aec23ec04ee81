"""Scalar special functions: log-gamma, E1 and its inverse, multivariate
Gamma and Beta functions, Marchenko-Pastur moments.

E1 and its inverse accept scalars or arrays and return the same shape. The
Gamma-family functions work in log space so that arguments with ``d * eta``
in the thousands stay finite.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Integral, Rational

import numpy as np
from scipy import special

from .errors import DomainError

EULER_GAMMA = float(np.euler_gamma)
_TINY = 1e-300


def _as_float_array(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _return(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def log_gamma(x):
    """Natural log of the Gamma function for x > 0."""
    arr = _as_float_array(x, "x")
    if np.any(arr <= 0):
        raise DomainError("log_gamma requires x > 0")
    if arr.ndim == 0:
        return math.lgamma(float(arr))
    return special.gammaln(arr)


# ---------------------------------------------------------------------------
# exponential integral


def _e1_series(x, logx=None):
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!), used on (0, 1]
    term = np.ones_like(x)
    acc = np.zeros_like(x)
    for k in range(1, 60):
        term = term * (-x) / k
        acc += term / k
        if np.all(np.abs(term) < 1e-18):
            break
    if logx is None:
        logx = np.log(x)
    return -EULER_GAMMA - logx - acc


def _e1_cf_scaled(x):
    """Continued fraction for e^x E1(x), modified Lentz, used on x > 1.

    Iterates only on entries that have not converged yet.
    """
    x = np.asarray(x, dtype=float)
    b = x + 1.0
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    idx = np.arange(x.size)
    for i in range(1, 1000):
        an = -float(i * i)
        b[idx] += 2.0
        bi = b[idx]
        di = 1.0 / (an * d[idx] + bi)
        ci = bi + an / c[idx]
        delta = ci * di
        h[idx] *= delta
        d[idx] = di
        c[idx] = ci
        idx = idx[np.abs(delta - 1.0) > 4e-16]
        if idx.size == 0:
            break
    return h


def exp_integral_e1(z):
    """Exponential integral ``E1(z) = int_z^inf exp(-t)/t dt`` for z > 0.

    Power series on (0, 1], continued fraction above.
    """
    arr = _as_float_array(z, "z")
    if np.any(arr <= 0):
        raise DomainError("exp_integral_e1 requires z > 0")
    x = np.atleast_1d(arr)
    out = np.empty_like(x)
    lo = x <= 1.0
    if np.any(lo):
        out[lo] = _e1_series(x[lo])
    if np.any(~lo):
        xh = x[~lo]
        out[~lo] = _e1_cf_scaled(xh) * np.exp(-xh)
    return _return(out.reshape(arr.shape), z)


def log_exp_integral_e1(z):
    """``ln E1(z)``, finite even where E1 underflows."""
    arr = _as_float_array(z, "z")
    if np.any(arr <= 0):
        raise DomainError("log_exp_integral_e1 requires z > 0")
    x = np.atleast_1d(arr)
    out = np.empty_like(x)
    lo = x <= 1.0
    if np.any(lo):
        out[lo] = np.log(_e1_series(x[lo]))
    if np.any(~lo):
        xh = x[~lo]
        out[~lo] = np.log(_e1_cf_scaled(xh)) - xh
    return _return(out.reshape(arr.shape), z)


_E1_ONE = float(_e1_series(np.array([1.0]))[0])


def e1_inverse(y):
    """Solve ``E1(r) = y`` for r > 0.

    Bracketed Newton iteration with bisection fallback. For ``y >= E1(1)`` the
    unknown is ``t = ln r`` (E1 is close to linear in ``ln r`` there); for
    smaller ``y`` it is ``r`` itself with the residual ``ln E1(r) - ln y``.
    """
    arr = _as_float_array(y, "y")
    if np.any(arr <= 0):
        raise DomainError("e1_inverse requires y > 0")
    return _return(np.exp(np.asarray(log_e1_inverse(arr))), y)


def log_e1_inverse(y):
    """``ln r`` where ``E1(r) = y``; stays finite when r underflows.

    For very large y the solution is ``r ~ exp(-gamma - y)``, which is not
    representable in double precision once y exceeds about 700.
    """
    arr = _as_float_array(y, "y")
    if np.any(arr <= 0):
        raise DomainError("e1_inverse requires y > 0")
    yv = np.atleast_1d(arr).astype(float)
    out = np.empty_like(yv)
    big = yv >= _E1_ONE
    if np.any(big):
        out[big] = _inverse_small_r(yv[big])
    if np.any(~big):
        out[~big] = np.log(_inverse_large_r(yv[~big]))
    return _return(out.reshape(arr.shape), y)


def _inverse_small_r(y):
    # returns t = ln r for r in (0, 1]; f(t) = E1(e^t) - y is decreasing with f' = -exp(-e^t)
    lo = -EULER_GAMMA - y - 1.0
    hi = np.zeros_like(y)
    t = np.minimum(-EULER_GAMMA - y, -1e-3)
    for _ in range(200):
        r = np.exp(t)
        f = _e1_series(r, t) - y
        done = np.abs(f) <= 1e-14 * y
        if np.all(done):
            break
        lo = np.where(f > 0, t, lo)
        hi = np.where(f < 0, t, hi)
        step = t + f * np.exp(r)
        bad = ~((step > lo) & (step < hi))
        step = np.where(bad, 0.5 * (lo + hi), step)
        stalled = np.abs(step - t) <= 1e-15 * np.maximum(1.0, np.abs(t))
        t = np.where(done, t, step)
        if np.all(done | stalled):
            break
    return t


def _scaled_e1(x):
    # e^x E1(x) for x > 1; the series is still accurate to ~1e-14 up to 2.5
    out = np.empty_like(x)
    lo = x <= 2.5
    if np.any(lo):
        out[lo] = _e1_series(x[lo]) * np.exp(x[lo])
    if np.any(~lo):
        out[~lo] = _e1_cf_scaled(x[~lo])
    return out


def _inverse_large_r(y):
    # r > 1; g(r) = ln E1(r) - ln y is decreasing, g' = -1 / (r e^r E1(r))
    ly = np.log(y)
    lo = np.ones_like(y)
    hi = np.maximum(-ly, 1.0)
    r = np.clip(-ly - np.log(np.maximum(-ly, 1.0)), 1.0 + 1e-12, hi)
    for _ in range(200):
        scaled = _scaled_e1(r)
        g = np.log(scaled) - r - ly
        done = np.abs(g) <= 1e-14 * np.maximum(1.0, np.abs(ly))
        if np.all(done):
            break
        lo = np.where(g > 0, r, lo)
        hi = np.where(g < 0, r, hi)
        step = r + g * r * scaled
        bad = ~((step > lo) & (step < hi))
        step = np.where(bad, 0.5 * (lo + hi), step)
        stalled = np.abs(step - r) <= 1e-15 * r
        r = np.where(done, r, step)
        if np.all(done | stalled):
            break
    return r


# ---------------------------------------------------------------------------
# multivariate Gamma / Beta


def _check_mv(d, eta, name="eta"):
    if int(d) != d or d < 1:
        raise DomainError("d must be a positive integer")
    if not np.isfinite(eta) or eta <= (d - 1) / 2:
        raise DomainError(f"{name}={eta} must exceed (d-1)/2 = {(d - 1) / 2}")


def log_multivariate_gamma(d: int, eta: float) -> float:
    """``ln Gamma_d(eta)``; requires eta > (d-1)/2."""
    _check_mv(d, eta)
    d = int(d)
    acc = d * (d - 1) / 4.0 * math.log(math.pi)
    for i in range(d):
        acc += math.lgamma(eta - i / 2.0)
    return acc


def multivariate_gamma(d: int, eta: float) -> float:
    """Multivariate Gamma function ``Gamma_d(eta)``.

    Equal to ``pi^(d(d-1)/4) prod_{i=1}^d Gamma(eta - (i-1)/2)``. May return
    ``inf`` when the value overflows; use :func:`log_multivariate_gamma`
    for large arguments.
    """
    lg = log_multivariate_gamma(d, eta)
    return math.exp(lg) if lg < 709.0 else math.inf


def log_beta(a: float, b: float) -> float:
    if a <= 0 or b <= 0:
        raise DomainError("beta function requires a, b > 0")
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def beta_fn(a: float, b: float) -> float:
    """Euler Beta function ``Gamma(a)Gamma(b)/Gamma(a+b)``."""
    return math.exp(log_beta(a, b))


def log_multivariate_beta(d: int, a: float, b: float) -> float:
    _check_mv(d, a, "a")
    _check_mv(d, b, "b")
    return (
        log_multivariate_gamma(d, a)
        + log_multivariate_gamma(d, b)
        - log_multivariate_gamma(d, a + b)
    )


def multivariate_beta(d: int, a: float, b: float) -> float:
    """``B_d(a, b) = Gamma_d(a) Gamma_d(b) / Gamma_d(a+b)``."""
    return math.exp(log_multivariate_beta(d, a, b))


# ---------------------------------------------------------------------------
# Marchenko-Pastur moments


def narayana_coefficients(p: int) -> list[int]:
    """Integer coefficients ``C(p,j) C(p-1,j) / (j+1)``, j = 0..p-1."""
    if int(p) != p or p < 1:
        raise DomainError("p must be a positive integer")
    p = int(p)
    # C(p-1, j)/(j+1) = C(p, j+1)/p, so each coefficient is an integer
    return [math.comb(p, j) * math.comb(p, j + 1) // p for j in range(p)]


def mp_moment(p: int, lam):
    """p-th moment ``mu_p(lam)`` of the Marchenko-Pastur law with ratio lam.

    Integer and rational ``lam`` give exact results; floats give a float.
    """
    coef = narayana_coefficients(p)
    if isinstance(lam, (Integral, Rational)) and not isinstance(lam, bool):
        if lam < 0:
            raise DomainError("lambda must be nonnegative")
        total = sum(c * Fraction(lam) ** j for j, c in enumerate(coef))
        return int(total) if total.denominator == 1 else total
    lam = float(lam)
    if lam < 0 or not math.isfinite(lam):
        raise DomainError("lambda must be a nonnegative real")
    # Horner from the top coefficient
    acc = 0.0
    for c in reversed(coef):
        acc = acc * lam + c
    return acc
