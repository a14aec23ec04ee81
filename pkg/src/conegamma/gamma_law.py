"""The Gamma law object Gamma(alpha, beta) and its analytic functionals.

Convention: Gamma(a, b) has Laplace transform ``(1 + z/b)^(-a)``, mean
``a/b`` and variance ``a/b^2`` (b is a rate). The Levy measure of
Gamma(alpha, beta) is ``alpha(dv) exp(-beta(v) r) / r dr`` in polar form.

Integrals over a parametric direction family are Monte-Carlo averages over
a fixed, cached sample of directions; they come with a standard error.
Integrals over discrete measures are exact sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, MomentError, UnsupportedError, ValidationError
from .spectral import (
    CONE,
    ConjugatedMeasure,
    ConstantScale,
    DiscreteMeasure,
    PerAtomScale,
    RankQProjectorMeasure,
    ScaleFunction,
    SequenceMeasure,
    SequenceScale,
    SigmaTraceScale,
    SphereMeasure,
    WishartInducedMeasure,
    atom_scale_values,
)

SERIES_TERMS = 100_000  # explicit terms summed for sequence fixtures


@dataclass(frozen=True)
class Verdict:
    """Finiteness verdict for an integral, with its value (``inf`` if divergent)."""

    finite: bool
    value: float


@dataclass(frozen=True)
class FourierLaplace:
    exists: bool
    radius: float


@dataclass(frozen=True)
class Estimate:
    """A value with a Monte-Carlo standard error (0 for exact results)."""

    value: object
    stderr: float = 0.0


# ---------------------------------------------------------------------------
# the law


@dataclass(frozen=True, eq=False)
class GammaLaw:
    """A validated Gamma law on R^d (vector mode) or on the PSD cone.

    Parameters
    ----------
    alpha : SphereMeasure
        Directional measure.
    beta : ScaleFunction
        Rate as a function of direction.
    drift : array, optional
        Deterministic shift Psi_0; must lie in the cone in cone mode.

    Raises
    ------
    DomainError
        If ``int log(1 + 1/beta) d alpha`` is infinite.
    """

    alpha: SphereMeasure
    beta: ScaleFunction
    drift: np.ndarray | None = None

    def __post_init__(self):
        a, b = self.alpha, self.beta
        if not isinstance(a, SphereMeasure) or not isinstance(b, ScaleFunction):
            raise ValidationError("alpha must be a SphereMeasure and beta a ScaleFunction")
        if isinstance(b, PerAtomScale) and not isinstance(a, DiscreteMeasure):
            raise ValidationError("per-atom beta requires a discrete alpha")
        if isinstance(a, SequenceMeasure) != isinstance(b, SequenceScale):
            raise ValidationError("sequence fixtures pair a sequence alpha with a sequence beta")
        if isinstance(b, SigmaTraceScale) and (a.mode != CONE or b.sigma.shape[0] != a.d):
            raise ValidationError("trace-form beta needs a cone law of matching dimension")
        if isinstance(a, DiscreteMeasure):
            atom_scale_values(b, a)  # length check
        shape = self.ambient_shape
        if self.drift is None:
            drift = np.zeros(shape)
        else:
            drift = np.array(self.drift, dtype=float)
            if drift.shape != shape:
                raise ValidationError(f"drift must have shape {shape}")
            if a.mode == CONE:
                if not np.allclose(drift, drift.T, atol=1e-12):
                    raise ValidationError("drift must be symmetric")
                drift = 0.5 * (drift + drift.T)
                if np.linalg.eigvalsh(drift)[0] < -1e-10 * max(1.0, np.abs(drift).max()):
                    raise ValidationError("drift must lie in the PSD cone")
        drift.setflags(write=False)
        object.__setattr__(self, "drift", drift)
        ex = existence_check(a, b)
        if not ex.finite:
            raise DomainError("integral of log(1 + 1/beta) d alpha diverges; no such law")

    @property
    def mode(self) -> str:
        return self.alpha.mode

    @property
    def d(self) -> int:
        return self.alpha.d

    @property
    def norm(self):
        return self.alpha.norm

    @property
    def ambient_shape(self):
        return (self.d, self.d) if self.mode == CONE else (self.d,)

    @property
    def is_homogeneous(self) -> bool:
        return isinstance(self.beta, ConstantScale)

    def replace(self, alpha=None, beta=None, drift=None) -> "GammaLaw":
        return GammaLaw(
            self.alpha if alpha is None else alpha,
            self.beta if beta is None else beta,
            self.drift if drift is None else drift,
        )


# ---------------------------------------------------------------------------
# sphere integrals


def _family_average(alpha, beta, func):
    """mass * E[func(U, beta(U))] over the cached direction sample, with SE."""
    dirs = alpha.quadrature()
    b = np.asarray(beta.at(dirs), dtype=float)
    vals = np.asarray(func(dirs, b))
    n = vals.shape[0]
    mass = alpha.total_mass
    mean = vals.mean(axis=0)
    if np.iscomplexobj(vals):
        var = vals.real.var(axis=0) + vals.imag.var(axis=0)
    else:
        var = vals.var(axis=0)
    return mass * mean, mass * np.sqrt(var / n)


def _discrete_sum(alpha, beta, func):
    b = atom_scale_values(beta, alpha)
    if alpha.size == 0:
        return None
    vals = np.asarray(func(alpha.atoms, b))
    return np.tensordot(alpha.weights, vals, axes=1)


def _converges(power, rate, logpow) -> bool:
    # sum n^power e^{-rate n} ln(n)^logpow, by ratio / integral comparison
    if rate > 0:
        return True
    if power < -1:
        return True
    return power == -1 and logpow < -1


def series_sum(alpha: SequenceMeasure, term, shift=(0.0, 0.0), n_terms: int = SERIES_TERMS):
    """Sum ``term(n)`` over n >= 1 for a sequence fixture.

    ``term(n)`` must behave like ``w_n * n^k * ln(n)^j`` with ``shift = (k, j)``.
    Convergence is decided from this profile (ratio test for exponential
    weights, integral comparison for power/log weights); when finite the
    value is the partial sum plus the integral of the term over the tail.

    Returns
    -------
    (finite, value)
    """
    power, rate, logpow = alpha.profile()
    if not _converges(power + shift[0], rate, logpow + shift[1]):
        return False, math.inf
    n = np.arange(1, n_terms + 1, dtype=float)
    head = np.asarray(term(n))
    total = head.sum(axis=0)
    if rate == 0:
        # integrate in u = ln x up to U, then add the asymptotic remainder of
        # the profile e^{(a+1)u} u^j beyond U
        a, lp = power + shift[0], logpow + shift[1]

        def g(u):
            x = math.exp(u)
            return float(np.real(np.sum(term(np.array([x]))))) * x

        u0, u1 = math.log(n_terms + 0.5), 200.0
        with np.errstate(over="ignore", under="ignore"):
            tail, _ = integrate.quad(g, u0, u1, limit=400)
            rest = g(u1) / -(a + 1.0) if a < -1.0 else g(u1) * u1 / -(lp + 1.0)
        tail += rest
        if np.ndim(total) == 0:
            total = total + tail
    return True, total


def existence_check(alpha: SphereMeasure, beta: ScaleFunction) -> Verdict:
    """Evaluate ``int log(1 + 1/beta(v)) alpha(dv)`` and whether it is finite."""
    if isinstance(alpha, SequenceMeasure):
        f = beta.factor
        ok, val = series_sum(alpha, lambda n: alpha.weight(n) * np.log1p(n / f), (0.0, 1.0))
        return Verdict(ok, float(val))
    if isinstance(alpha, DiscreteMeasure):
        b = atom_scale_values(beta, alpha)
        if np.any(b <= 0):
            return Verdict(False, math.inf)
        return Verdict(True, float(np.sum(alpha.weights * np.log1p(1.0 / b))))
    if isinstance(beta, ConstantScale):
        return Verdict(True, alpha.total_mass * math.log1p(1.0 / beta.beta0))
    if beta.lower_bound() <= 0:
        return Verdict(False, math.inf)
    val, _ = _family_average(alpha, beta, lambda u, b: np.log1p(1.0 / b))
    return Verdict(True, float(val))


def _pairing(law, dirs, z):
    z = np.asarray(z)
    if law.mode == CONE:
        if z.shape != (law.d, law.d):
            raise ValidationError(f"argument must be a {law.d}x{law.d} matrix")
        return np.einsum("...ij,ij->...", dirs, z)
    if z.shape != (law.d,):
        raise ValidationError(f"argument must be a vector of length {law.d}")
    return dirs @ z


def _log_cf(law: GammaLaw, z):
    """``int log(beta / (beta - i <v, z>)) d alpha`` with its standard error."""
    a, b = law.alpha, law.beta

    def integrand(dirs, bb):
        t = _pairing(law, dirs, z)
        return -np.log(1.0 - 1j * t / bb)

    if isinstance(a, SequenceMeasure):
        def term(n):
            t = _pairing(law, a.atom(n), z)
            return -a.weight(n) * np.log(1.0 - 1j * t * n / b.factor)

        n_terms = SERIES_TERMS
        n = np.arange(1, n_terms + 1, dtype=float)
        val = term(n).sum()
        # remainder bounded by the integral of |term| over the tail
        tail, _ = integrate.quad(lambda x: abs(term(np.array([x]))[0]), n_terms + 0.5, np.inf, limit=200)
        return complex(val), float(tail)
    if isinstance(a, DiscreteMeasure):
        s = _discrete_sum(a, b, integrand)
        return (0j if s is None else complex(s)), 0.0
    val, se = _family_average(a, b, integrand)
    return complex(val), float(se)


def char_fn(law: GammaLaw, z, return_error: bool = False):
    """Characteristic function ``E exp(i <X, z>)``.

    ``z`` may be complex; ``z = i Theta`` gives the Laplace transform at Theta
    where that exists. With ``return_error`` the Monte-Carlo standard error
    of the value (0 for discrete laws) is returned as well.
    """
    z = np.asarray(z)
    lg, se = _log_cf(law, z)
    drift_term = 1j * np.sum(law.drift * z)
    val = complex(np.exp(lg + drift_term))
    if return_error:
        return val, abs(val) * se
    return val


def _check_dual(law, theta):
    theta = np.asarray(theta, dtype=float)
    if law.mode == CONE:
        if theta.shape != (law.d, law.d):
            raise ValidationError(f"Theta must be {law.d}x{law.d}")
        if not np.allclose(theta, theta.T, atol=1e-12 * max(1.0, np.abs(theta).max())):
            raise DomainError("Theta must be symmetric")
        theta = 0.5 * (theta + theta.T)
        if np.linalg.eigvalsh(theta)[0] < -1e-12 * max(1.0, np.abs(theta).max()):
            raise DomainError("Theta must be positive semidefinite")
        return theta
    if theta.shape != (law.d,):
        raise ValidationError(f"Theta must have length {law.d}")
    a = law.alpha
    if isinstance(a, DiscreteMeasure) and a.size and np.any(a.atoms @ theta < -1e-14):
        raise DomainError("Theta is not in the dual of the support cone")
    if isinstance(a, SequenceMeasure) and np.any(a.atom(np.arange(1, 1000)) @ theta < 0):
        raise DomainError("Theta is not in the dual of the support cone")
    if float(np.sum(law.drift * theta)) < 0 and np.any(law.drift):
        raise DomainError("Theta pairs negatively with the drift")
    return theta


def log_laplace(law: GammaLaw, theta, return_error: bool = False):
    """``log E exp(-<X, Theta>)``."""
    theta = _check_dual(law, theta)
    a, b = law.alpha, law.beta

    def integrand(dirs, bb):
        return np.log1p(_pairing(law, dirs, theta) / bb)

    if isinstance(a, SequenceMeasure):
        ok, val = series_sum(
            a, lambda n: a.weight(n) * np.log1p(_pairing(law, a.atom(n), theta) * n / b.factor), (0.0, 1.0)
        )
        val, se = float(val), 0.0
    elif isinstance(a, DiscreteMeasure):
        s = _discrete_sum(a, b, integrand)
        val, se = (0.0 if s is None else float(s)), 0.0
    else:
        v, se = _family_average(a, b, integrand)
        val, se = float(v), float(se)
    out = -val - float(np.sum(law.drift * theta))
    return (out, se) if return_error else out


def laplace_transform(law: GammaLaw, theta, return_error: bool = False):
    """Laplace transform ``E exp(-<X, Theta>)`` for Theta in the dual cone."""
    lg, se = log_laplace(law, theta, return_error=True)
    val = math.exp(lg)
    return (val, val * se) if return_error else val


def essinf_beta(law_or_alpha, beta=None) -> float:
    if isinstance(law_or_alpha, GammaLaw):
        alpha, beta = law_or_alpha.alpha, law_or_alpha.beta
    else:
        alpha = law_or_alpha
    if isinstance(alpha, DiscreteMeasure):
        b = atom_scale_values(beta, alpha)
        return float(b.min()) if b.size else math.inf
    # the families charge every neighbourhood of the minimiser of beta, so
    # the exact lower bound is also the essential infimum
    return beta.lower_bound()


def fourier_laplace_exists(law: GammaLaw) -> FourierLaplace:
    """Whether the Fourier-Laplace transform exists near 0, and its radius.

    The radius is the essential infimum of beta under alpha.
    """
    r = essinf_beta(law)
    return FourierLaplace(r > 0, r)


def moment_order_check(law: GammaLaw, k: float) -> Verdict:
    """Evaluate ``int beta^{-k} d alpha``; finite iff the k-th moment is finite."""
    if not k > 0:
        raise DomainError("moment order must be > 0")
    a, b = law.alpha, law.beta
    if isinstance(a, SequenceMeasure):
        ok, val = series_sum(a, lambda n: a.weight(n) * (n / b.factor) ** k, (float(k), 0.0))
        return Verdict(ok, float(val))
    if isinstance(a, DiscreteMeasure):
        bb = atom_scale_values(b, a)
        if np.any(bb <= 0):
            return Verdict(False, math.inf)
        return Verdict(True, float(np.sum(a.weights * bb ** (-float(k)))))
    if isinstance(b, ConstantScale):
        return Verdict(True, a.total_mass * b.beta0 ** (-float(k)))
    if b.lower_bound() <= 0:
        return Verdict(False, math.inf)
    val, _ = _family_average(a, b, lambda u, bb: bb ** (-float(k)))
    return Verdict(True, float(val))


def _require_moment(law, k):
    if not moment_order_check(law, k).finite:
        raise MomentError(f"moment of order {k} is infinite for this law")


def _vec_outer(dirs):
    flat = dirs.reshape(dirs.shape[0], -1)
    return flat[:, :, None] * flat[:, None, :]


def _agamma_sigma(law):
    """Sigma if law is AGamma(eta, Sigma) up to a scale change, else None."""
    a, b = law.alpha, law.beta
    if not isinstance(a, WishartInducedMeasure):
        return None
    if isinstance(b, ConstantScale) and a.isotropic:
        return np.eye(a.d) / b.beta0
    if isinstance(b, SigmaTraceScale):
        s = b.sigma
        c = s[0, 0] / a.sigma[0, 0]
        if np.allclose(s, c * a.sigma, rtol=1e-13, atol=0):
            return s
    return None


def mean_estimate(law: GammaLaw) -> Estimate:
    """Mean with its Monte-Carlo standard error (0 when exact)."""
    _require_moment(law, 1)
    a, b = law.alpha, law.beta
    if isinstance(a, SequenceMeasure):
        n = np.arange(1, SERIES_TERMS + 1, dtype=float)
        w = a.weight(n) * n / b.factor
        head = w @ a.atom(n)
        tail_mass = moment_order_check(law, 1).value - w.sum()
        return Estimate(law.drift + head + tail_mass * np.array([0.0, 1.0]), 0.0)
    if isinstance(a, DiscreteMeasure):
        s = _discrete_sum(a, b, lambda u, bb: u / bb.reshape((-1,) + (1,) * (u.ndim - 1)))
        return Estimate(law.drift + (0.0 if s is None else s), 0.0)
    sig = _agamma_sigma(law)
    if sig is not None:
        return Estimate(law.drift + a.total_mass * sig / a.d, 0.0)
    if isinstance(b, ConstantScale) and isinstance(a, RankQProjectorMeasure):
        return Estimate(law.drift + a.total_mass * a.mean_direction() / b.beta0, 0.0)
    val, se = _family_average(a, b, lambda u, bb: u / bb[:, None, None])
    return Estimate(law.drift + val, float(np.max(se)))


def mean(law: GammaLaw):
    """``Psi_0 + int v / beta(v) alpha(dv)``."""
    return mean_estimate(law).value


def covariance_estimate(law: GammaLaw) -> Estimate:
    """Covariance (d x d in vector mode, Cov(vec M) as d^2 x d^2 in cone mode)."""
    _require_moment(law, 2)
    a, b = law.alpha, law.beta
    if isinstance(a, SequenceMeasure):
        n = np.arange(1, SERIES_TERMS + 1, dtype=float)
        w = a.weight(n) * (n / b.factor) ** 2
        v = a.atom(n)
        head = np.einsum("n,ni,nj->ij", w, v, v)
        tail_mass = moment_order_check(law, 2).value - w.sum()
        return Estimate(head + tail_mass * np.array([[0.0, 0.0], [0.0, 1.0]]), 0.0)
    if isinstance(a, DiscreteMeasure):
        dd = law.d * law.d if law.mode == CONE else law.d
        if a.size == 0:
            return Estimate(np.zeros((dd, dd)), 0.0)
        s = _discrete_sum(a, b, lambda u, bb: _vec_outer(u) / (bb**2)[:, None, None])
        return Estimate(s, 0.0)
    from .matrix_gamma import commutation_matrix

    d = a.d
    eye = np.eye(d)
    vec_i = eye.reshape(-1)
    K = commutation_matrix(d)
    sig = _agamma_sigma(law)
    if sig is not None:
        eta = a.eta
        cov = (
            a.total_mass
            / (d * (eta * d + 1.0))
            * (0.5 * (np.eye(d * d) + K) @ np.kron(sig, sig) + eta * np.outer(sig.reshape(-1), sig.reshape(-1)))
        )
        return Estimate(cov, 0.0)
    if isinstance(b, ConstantScale) and isinstance(a, RankQProjectorMeasure):
        q = a.q
        # U = W / tr W with W ~ W_d(q, I) independent of tr W ~ chi2(dq)
        second = (q * (np.eye(d * d) + K) + q * q * np.outer(vec_i, vec_i)) / (d * q * (d * q + 2.0))
        return Estimate(a.total_mass * second / b.beta0**2, 0.0)
    val, se = _family_average(a, b, lambda u, bb: _vec_outer(u) / (bb**2)[:, None, None])
    return Estimate(val, float(np.max(se)))


def covariance(law: GammaLaw):
    """``int v v^T / beta(v)^2 alpha(dv)``; in cone mode the d^2 x d^2 Cov(vec M)."""
    return covariance_estimate(law).value


# ---------------------------------------------------------------------------
# closure operations


def scale(law: GammaLaw, c: float) -> GammaLaw:
    """Law of ``c X``: beta becomes beta / c."""
    if not c > 0:
        raise DomainError("scale factor must be > 0")
    if c == 1:
        return law
    return GammaLaw(law.alpha, law.beta.scaled(c), law.drift * c)


def _scaled_alpha(alpha, t):
    if isinstance(alpha, (DiscreteMeasure, SequenceMeasure)):
        return alpha.scaled(t)
    return alpha.with_mass(alpha.total_mass * t)


def process_marginal(law: GammaLaw, t: float) -> GammaLaw:
    """Law of L_t for the Levy process with L_1 ~ law: alpha becomes t alpha."""
    if not t > 0:
        raise DomainError("time must be > 0")
    if t == 1:
        return law
    return GammaLaw(_scaled_alpha(law.alpha, t), law.beta, law.drift * t)


def _same_scale(b1, b2) -> bool:
    if type(b1) is not type(b2):
        return False
    if isinstance(b1, ConstantScale):
        return b1.beta0 == b2.beta0
    if isinstance(b1, SigmaTraceScale):
        return np.array_equal(b1.sigma, b2.sigma)
    if isinstance(b1, SequenceScale):
        return b1.factor == b2.factor
    return False


def convolve(law1: GammaLaw, law2: GammaLaw) -> GammaLaw:
    """Law of ``X1 + X2`` for independent X1, X2 sharing the same beta."""
    if law1.mode != law2.mode or law1.d != law2.d:
        raise ValidationError("laws live in different spaces")
    a1, a2 = law1.alpha, law2.alpha
    drift = law1.drift + law2.drift
    if isinstance(a1, DiscreteMeasure) and isinstance(a2, DiscreteMeasure):
        if not a1.norm == a2.norm:
            raise ValidationError("discrete measures on different spheres")
        b1 = atom_scale_values(law1.beta, a1)
        b2 = atom_scale_values(law2.beta, a2)
        atoms = list(a1.atoms)
        weights = list(a1.weights)
        betas = list(b1)
        for atom, w, bb in zip(a2.atoms, a2.weights, b2):
            hit = next((i for i, x in enumerate(atoms) if np.array_equal(x, atom)), None)
            if hit is None:
                atoms.append(atom)
                weights.append(w)
                betas.append(bb)
            elif betas[hit] != bb:
                raise ValidationError("beta differs at a shared atom; convolution leaves the class")
            else:
                weights[hit] += w
        shape = (0,) + a1.atoms.shape[1:]
        alpha = DiscreteMeasure(np.array(atoms).reshape((-1,) + shape[1:]), np.array(weights), a1.mode, a1.norm, False)
        if isinstance(law1.beta, ConstantScale) and _same_scale(law1.beta, law2.beta):
            beta = law1.beta
        else:
            beta = PerAtomScale(np.array(betas))
        return GammaLaw(alpha, beta, drift)
    if not _same_scale(law1.beta, law2.beta):
        raise ValidationError("convolution requires the same beta")
    if isinstance(a1, SequenceMeasure) and isinstance(a2, SequenceMeasure):
        if (a1.rule, a1.m) != (a2.rule, a2.m):
            raise UnsupportedError("different sequence fixtures")
        return GammaLaw(a1.scaled(1.0 + a2.scale / a1.scale), law1.beta, drift)
    if type(a1) is type(a2) and _same_family(a1, a2):
        return GammaLaw(a1.with_mass(a1.total_mass + a2.total_mass), law1.beta, drift)
    raise UnsupportedError("convolution of these direction measures is not representable")


def _same_family(a1, a2) -> bool:
    if isinstance(a1, WishartInducedMeasure):
        return a1.d == a2.d and a1.eta == a2.eta and np.array_equal(a1.sigma, a2.sigma)
    if isinstance(a1, RankQProjectorMeasure):
        return a1.d == a2.d and a1.q == a2.q
    if isinstance(a1, ConjugatedMeasure):
        return np.array_equal(a1.C, a2.C) and _same_family(a1.base, a2.base)
    return False


def trace_thorin_measure(law: GammaLaw, n_atoms: int | None = None):
    """Thorin measure of ``tr(M)``: the image of alpha under ``U -> beta(U)``.

    Exact for discrete and homogeneous laws. For other families the image
    is represented by equal-weight atoms at beta of the cached direction
    sample (``n_atoms`` of them).
    """
    from .wiener_gamma import ThorinMeasure

    if law.mode != CONE:
        raise ValidationError("trace law requires cone mode")
    a, b = law.alpha, law.beta
    if isinstance(a, DiscreteMeasure):
        vals = atom_scale_values(b, a)
        return ThorinMeasure.from_atoms(vals, a.weights)
    if isinstance(b, ConstantScale):
        return ThorinMeasure.from_atoms([b.beta0], [a.total_mass])
    dirs = a.quadrature()
    if n_atoms is not None:
        dirs = dirs[:n_atoms]
    vals = np.asarray(b.at(dirs))
    return ThorinMeasure.from_atoms(vals, np.full(vals.size, a.total_mass / vals.size))
