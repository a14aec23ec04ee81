"""Matrix Gamma families on the PSD cone.

``AGamma_d(eta, Sigma)`` has Levy density

    g(X) = c |Sigma|^{-eta} exp(-tr(Sigma^{-1} X)) tr(Sigma^{-1} X)^{-eta d} |X|^{eta - (d+1)/2}

on positive definite X, with ``c = omega Gamma(eta d) / Gamma_d(eta)``. Its
directional measure is omega times the law of ``W / tr W`` for a Wishart
``W ~ W_d(2 eta, Sigma)`` and ``beta(U) = tr(Sigma^{-1} U)``. ``BGamma_d(q,
beta0)`` has rank-q projector directions and a constant rate. Vectorisation
``vec`` stacks columns; on symmetric matrices it agrees with a row-major
flatten.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .gamma_law import Estimate, GammaLaw, _discrete_sum, _family_average, _check_dual
from .specfun import (
    log_beta,
    log_multivariate_beta,
    log_multivariate_gamma,
    mp_moment,
)
from .spectral import (
    CONE,
    ConstantScale,
    DiscreteMeasure,
    RankQProjectorMeasure,
    SigmaTraceScale,
    WishartInducedMeasure,
    check_spd,
)

OMEGA_PRESETS = ("d_eta", "d", "one")
MC_WISHART = 200_000  # Wishart draws for moments without a closed form


def omega_preset(name, d: int, eta: float) -> float:
    """Total spherical mass from a preset name ("d_eta", "d", "one") or a number."""
    if isinstance(name, str):
        if name == "d_eta":
            return d * eta
        if name == "d":
            return float(d)
        if name == "one":
            return 1.0
        raise ValidationError(f"unknown omega preset {name!r}")
    return float(name)


@dataclass(frozen=True, eq=False)
class AGammaParams:
    """Parameters of ``AGamma_d(eta, Sigma)`` with total spherical mass omega."""

    d: int
    eta: float
    sigma: np.ndarray | None = None
    omega: float | str = "d_eta"

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValidationError("d must be a positive integer")
        d = int(self.d)
        if not (math.isfinite(self.eta) and self.eta > (d - 1) / 2):
            raise DomainError(f"eta={self.eta} must exceed (d-1)/2 = {(d - 1) / 2}")
        s = np.eye(d) if self.sigma is None else check_spd(self.sigma, d)
        s.setflags(write=False)
        om = omega_preset(self.omega, d, self.eta)
        if not (om > 0 and math.isfinite(om)):
            raise ValidationError("omega must be positive")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "eta", float(self.eta))
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "omega", om)


@dataclass(frozen=True)
class BGammaParams:
    d: int
    q: int
    beta0: float = 1.0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValidationError("d must be a positive integer")
        if int(self.q) != self.q or not 1 <= self.q <= self.d:
            raise ValidationError("q must be an integer in 1..d")
        if not (self.beta0 > 0 and math.isfinite(self.beta0)):
            raise ValidationError("beta0 must be positive")


@dataclass(frozen=True, eq=False)
class GammaNormalParams:
    """``Y = X^{1/2} Z`` with X from a cone-valued mixing law and Z d x q Gaussian."""

    mixing: GammaLaw
    q: int

    def __post_init__(self):
        if not isinstance(self.mixing, GammaLaw) or self.mixing.mode != CONE:
            raise ValidationError("mixing law must be a cone-mode GammaLaw")
        if int(self.q) != self.q or self.q < 1:
            raise ValidationError("q must be a positive integer")


# ---------------------------------------------------------------------------
# AGamma


def log_agamma_constant(d: int, eta: float, omega: float) -> float:
    if not omega > 0:
        raise DomainError("omega must be positive")
    return math.log(omega) + math.lgamma(eta * d) - log_multivariate_gamma(d, eta)


def agamma_constant(d: int, eta: float, omega: float) -> float:
    """``c = omega Gamma(eta d) / Gamma_d(eta)``."""
    return math.exp(log_agamma_constant(d, eta, omega))


def agamma_levy_density(X, params: AGammaParams):
    """Levy density g(X); 0 off the open PD cone. Accepts a stack of matrices.

    On the boundary of the cone the true density diverges when
    ``eta < (d+1)/2``; 0 is returned there as well.
    """
    X = np.asarray(X, dtype=float)
    d = params.d
    if X.shape[-2:] != (d, d):
        raise ValidationError(f"X must be {d}x{d}")
    single = X.ndim == 2
    Xs = X.reshape((-1, d, d))
    sym = np.allclose(Xs, np.swapaxes(Xs, -1, -2), atol=1e-12 * max(1.0, float(np.abs(Xs).max(initial=0.0))))
    out = np.zeros(Xs.shape[0])
    if sym:
        lam = np.linalg.eigvalsh(0.5 * (Xs + np.swapaxes(Xs, -1, -2)))
        pd = lam[:, 0] > 0
        if np.any(pd):
            sinv = np.linalg.inv(params.sigma)
            t = np.einsum("ij,nji->n", sinv, Xs[pd])
            logdet_x = np.log(lam[pd]).sum(axis=1)
            _, logdet_s = np.linalg.slogdet(params.sigma)
            eta = params.eta
            lg = (
                log_agamma_constant(d, eta, params.omega)
                - eta * logdet_s
                - t
                - eta * d * np.log(t)
                + (eta - 0.5 * (d + 1)) * logdet_x
            )
            out[pd] = np.exp(lg)
    return float(out[0]) if single else out.reshape(X.shape[:-2])


def agamma_law(params: AGammaParams) -> GammaLaw:
    """``AGamma_d(eta, Sigma)`` as a cone-mode GammaLaw.

    For ``Sigma = s I`` the law is homogeneous with rate ``1/s``.
    """
    d, s = params.d, params.sigma
    if np.array_equal(s, s[0, 0] * np.eye(d)):
        return GammaLaw(WishartInducedMeasure(d, params.eta, params.omega), ConstantScale(1.0 / s[0, 0]))
    return GammaLaw(WishartInducedMeasure(d, params.eta, params.omega, s), SigmaTraceScale(s))


def commutation_matrix(d: int) -> np.ndarray:
    """The d^2 x d^2 matrix K with ``K vec(A) = vec(A^T)``."""
    if int(d) != d or d < 1:
        raise ValidationError("d must be a positive integer")
    d = int(d)
    K = np.zeros((d * d, d * d))
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    K[(i + d * j).ravel(), (j + d * i).ravel()] = 1.0
    return K


def vec(A) -> np.ndarray:
    """Column-stacking vectorisation (acts on the last two axes)."""
    A = np.asarray(A)
    return np.swapaxes(A, -1, -2).reshape(A.shape[:-2] + (-1,))


@dataclass(frozen=True)
class WishartMoments:
    """``mean = E W``; ``cov = Cov(vec W)``; ``second = E[vec W vec W^T]``."""

    mean: np.ndarray
    cov: np.ndarray | None = None
    second: np.ndarray | None = None


def wishart_moments(d: int, dof: float, sigma=None, p: int = 2) -> WishartMoments:
    """Closed-form Wishart moments up to order 2.

    ``E W = n Sigma`` and ``Cov(vec W) = n (I + K)(Sigma (x) Sigma)``.
    """
    if int(d) != d or d < 1:
        raise ValidationError("d must be a positive integer")
    d = int(d)
    if not dof > d - 1:
        raise DomainError(f"degrees of freedom {dof} must exceed d - 1")
    if p not in (1, 2):
        raise ValidationError("closed forms are available for p = 1, 2")
    s = np.eye(d) if sigma is None else check_spd(sigma, d)
    mean = dof * s
    if p == 1:
        return WishartMoments(mean)
    K = commutation_matrix(d)
    cov = dof * (np.eye(d * d) + K) @ np.kron(s, s)
    return WishartMoments(mean, cov, cov + np.outer(vec(mean), vec(mean)))


def _wishart_power_mean(d, n, s, p):
    if p == 1:
        return n * s
    if p == 2:
        # E W^2 = n(n+1) Sigma^2 + n tr(Sigma) Sigma
        return n * (n + 1.0) * s @ s + n * np.trace(s) * s
    return None


def levy_moment_integral(params: AGammaParams, p: int, kind: str = "power", rng=None, n_mc: int = MC_WISHART) -> Estimate:
    """Moment integrals of the AGamma Levy measure through Wishart moments.

    ``power``:  int X^p g dX = (omega/2^p) B(eta d, p) E W^p
    ``tensor``: int X^{(x)p} g dX = (omega/2^p) B(eta d, p) E W^{(x)p}
    ``det``:    int |X|^p g dX = omega Gamma_d(p) B(eta d, p d) / B_d(eta, p) |Sigma|^p

    with ``W ~ W_d(2 eta, Sigma)``. Wishart moments of order p >= 3 come
    from Monte Carlo (``rng`` required) and carry a standard error.
    """
    if int(p) != p or p < 1:
        raise DomainError("p must be a positive integer")
    p = int(p)
    d, eta, om, s = params.d, params.eta, params.omega, params.sigma
    if kind == "det":
        if not p > (d - 1) / 2:
            raise DomainError("det moments need p > (d-1)/2")
        lg = (
            math.log(om)
            + log_multivariate_gamma(d, p)
            + log_beta(eta * d, p * d)
            - log_multivariate_beta(d, eta, p)
            + p * np.linalg.slogdet(s)[1]
        )
        return Estimate(math.exp(lg), 0.0)
    if kind not in ("power", "tensor"):
        raise ValidationError(f"unknown kind {kind!r}")
    n = 2.0 * eta
    coef = om / 2.0**p * math.exp(log_beta(eta * d, p))
    if kind == "power":
        m = _wishart_power_mean(d, n, s, p)
        if m is not None:
            return Estimate(coef * m, 0.0)
    elif p <= 2:
        w = wishart_moments(d, n, s, 2)
        return Estimate(coef * (vec(w.mean) if p == 1 else w.second), 0.0)
    if rng is None:
        raise ValidationError("moments of order >= 3 need an rng for Monte Carlo")
    from .sampler import sample_wishart

    W = sample_wishart(d, n, s, rng, size=n_mc)
    if kind == "power":
        vals = np.linalg.matrix_power(W, p)
    else:
        v = vec(W)
        vals = v
        for _ in range(p - 1):
            vals = np.einsum("na,nb->nab", vals, v).reshape(n_mc, -1)
    mean_ = vals.mean(axis=0)
    se = vals.std(axis=0, ddof=1) / math.sqrt(n_mc)
    return Estimate(coef * mean_, float(coef * se.max()))


def agamma_mean(params: AGammaParams) -> np.ndarray:
    """``E M = (omega/d) Sigma``."""
    return params.omega / params.d * params.sigma


def agamma_cov(params: AGammaParams) -> np.ndarray:
    """``Cov(vec M)`` from the second Wishart moment.

    ``(omega/4) B(eta d, 2) E[vec W vec W^T]``, which equals
    ``omega / (d (eta d + 1)) [ (I + K)(Sigma (x) Sigma)/2 + eta vec Sigma vec Sigma^T ]``.
    """
    return levy_moment_integral(params, 2, "tensor").value


# ---------------------------------------------------------------------------
# Marchenko-Pastur asymptotics


def mp_constant(p: int, lam: float) -> float:
    """``K_p(lam) = Gamma(p) mu_p(1/(2 lam))`` with ``lam = eta/d``.

    The scaled p-th trace moment of the Levy measure of AGamma(eta, I)
    approaches ``K_p omega d^{-p}`` as d grows with ``eta/d -> lam``.
    """
    if not lam > 0:
        raise DomainError("lambda must be > 0")
    return math.gamma(p) * mp_moment(p, 1.0 / (2.0 * lam))


def mp_trace_asymptotics(d: int, eta: float, omega, p: int, epsilon: float = 0.0, rng=None) -> dict:
    """Exact and asymptotic ``d^{-eps p} (1/d) tr int X^p g dX`` for Sigma = I.

    Returns ``{"exact", "asymptotic", "ratio", "exact_stderr"}``; the
    asymptotic value is ``K_p(eta/d) omega d^{-p(1+eps)}``.
    """
    params = AGammaParams(d, eta, None, omega)
    if p <= 2:
        # traces of the closed forms, without forming d x d matrices for large d
        n = 2.0 * eta
        tr_w = n * d if p == 1 else n * (n + 1.0) * d + n * d * d
        coef = params.omega / 2.0**p * math.exp(log_beta(eta * d, p))
        exact, se = coef * tr_w / d, 0.0
    else:
        est = levy_moment_integral(params, p, "power", rng)
        exact, se = float(np.trace(est.value)) / d, est.stderr
    scale = float(d) ** (-epsilon * p)
    exact *= scale
    asym = mp_constant(p, eta / d) * params.omega * float(d) ** (-p * (1.0 + epsilon))
    return {"exact": exact, "asymptotic": asym, "ratio": exact / asym, "exact_stderr": se * scale}


# ---------------------------------------------------------------------------
# BGamma and Gamma-Normal


def bgamma_law(params: BGammaParams) -> GammaLaw:
    """``BGamma_d(q, beta0)``: rank-q projector directions of total mass d."""
    return GammaLaw(RankQProjectorMeasure(params.d, params.q, float(params.d)), ConstantScale(params.beta0))


def gamma_normal_cf(params: GammaNormalParams, theta) -> float:
    """``E exp(i tr(Theta^T Y))`` for ``Y = X^{1/2} Z``.

    Conditioning on X gives ``E exp(-tr(X Theta Theta^T)/2)``, i.e.
    ``exp(-<Psi_0, T> - int log(1 + tr(U T)/beta(U)) alpha(dU))`` with
    ``T = Theta Theta^T / 2``. The value is real and lies in (0, 1].
    """
    law = params.mixing
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (law.d, params.q):
        raise ValidationError(f"Theta must be {law.d}x{params.q}")
    T = 0.5 * theta @ theta.T
    a, b = law.alpha, law.beta

    def integrand(u, bb):
        return np.log1p(np.einsum("nij,ij->n", u, T) / bb)

    if isinstance(a, DiscreteMeasure):
        s = _discrete_sum(a, b, integrand)
        val = 0.0 if s is None else float(s)
    elif isinstance(b, ConstantScale) and np.allclose(T, T[0, 0] * np.eye(law.d), atol=0):
        val = a.total_mass * math.log1p(T[0, 0] / b.beta0)
    else:
        val = float(_family_average(a, b, integrand)[0])
    return math.exp(-val - float(np.sum(law.drift * T)))


def gamma_normal_cf_via_laplace(params: GammaNormalParams, theta) -> float:
    """Same value through the Laplace transform of the mixing law at ``Theta Theta^T / 2``."""
    from .gamma_law import laplace_transform

    theta = np.asarray(theta, dtype=float)
    T = 0.5 * theta @ theta.T
    return laplace_transform(params.mixing, _check_dual(params.mixing, T))
