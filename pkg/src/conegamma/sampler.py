"""Random generation for Gamma laws on cones.

Every function takes an explicit ``numpy.random.Generator``. :class:`RngSpec`
builds counter-based Philox generators from ``(seed, stream)`` and derives
per-replicate child streams, so a batch drawn one replicate per stream does
not depend on how the batch is split.

Continuous-direction laws are sampled from the shot-noise series
``r_k = E1^{-1}(G_k / mass) / beta`` over standard Poisson arrival times
``G_k``, truncated at radius ``eps``; the omitted small jumps are replaced by
their mean. Non-constant beta is handled by thinning a series drawn at the
lower bound of beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DomainError, UnsupportedError, ValidationError
from .gamma_law import GammaLaw, _family_average, essinf_beta, process_marginal
from .specfun import exp_integral_e1, e1_inverse
from .spectral import (
    CONE,
    ConstantScale,
    DiscreteMeasure,
    SequenceMeasure,
    atom_scale_values,
    check_spd,
)

DEFAULT_EPS = 1e-8
JUMP_CHUNK = 1 << 20  # candidate jumps generated per vectorised block

DISCRETE = "discrete"
HOMOGENEOUS = "homogeneous-series"
THINNED = "thinned"


# ---------------------------------------------------------------------------
# random streams


@dataclass(frozen=True)
class RngSpec:
    """A reproducible random stream: 64-bit ``seed`` and ``stream`` id."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= v < 1 << 64:
                raise ValidationError(f"{name} must be an integer in [0, 2^64)")

    def generator(self, replicate: int | None = None) -> np.random.Generator:
        """Philox generator for this stream, or for one of its replicates."""
        key = (int(self.stream),) if replicate is None else (int(self.stream), int(replicate))
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(self.seed), spawn_key=key)))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngSpec):
        return rng.generator()
    if rng is None or isinstance(rng, (int, np.integer)):
        return RngSpec(0 if rng is None else int(rng)).generator()
    raise ValidationError("rng must be a Generator, RngSpec or integer seed")


# ---------------------------------------------------------------------------
# elementary draws


def gamma1(a: float, b: float, rng, size=None):
    """Draw from Gamma(a, b) with shape a and rate b."""
    if not (a > 0 and b > 0) or not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("Gamma shape and rate must be positive and finite")
    return as_generator(rng).gamma(a, 1.0 / b, size)


def sample_wishart(d: int, dof: float, sigma, rng, size=None):
    """Wishart ``W_d(dof, sigma)`` draws by the Bartlett decomposition.

    ``W = L A A^T L^T`` with ``L`` the Cholesky factor of sigma and ``A``
    lower triangular, ``A_ii^2 ~ chi2(dof - i)``, ``A_ij ~ N(0, 1)`` below
    the diagonal.
    """
    rng = as_generator(rng)
    if int(d) != d or d < 1:
        raise DomainError("d must be a positive integer")
    d = int(d)
    if not dof > d - 1:
        raise DomainError(f"degrees of freedom {dof} must exceed d - 1 = {d - 1}")
    s = np.eye(d) if sigma is None else check_spd(sigma, d)
    L = np.linalg.cholesky(s)
    n = 1 if size is None else int(size)
    shapes = 0.5 * (dof - np.arange(d))
    diag = np.sqrt(2.0 * rng.standard_gamma(shapes, size=(n, d)))
    A = np.zeros((n, d, d))
    idx = np.arange(d)
    A[:, idx, idx] = diag
    rows, cols = np.tril_indices(d, -1)
    if rows.size:
        A[:, rows, cols] = rng.standard_normal((n, rows.size))
    B = L @ A
    W = B @ np.swapaxes(B, -1, -2)
    W = 0.5 * (W + np.swapaxes(W, -1, -2))
    return W[0] if size is None else W


def sample_discrete(law: GammaLaw, rng, size=None):
    """Exact draw ``Psi_0 + sum_j G_j v_j`` with ``G_j ~ Gamma(w_j, beta_j)``."""
    rng = as_generator(rng)
    a = law.alpha
    if not isinstance(a, DiscreteMeasure):
        raise ValidationError("sample_discrete needs a discrete alpha")
    b = atom_scale_values(law.beta, a)
    if np.any(b <= 0):
        raise DomainError("an atom has beta = 0; the law has no exact sampler")
    n = 1 if size is None else int(size)
    if a.size == 0:
        out = np.broadcast_to(law.drift, (n,) + law.drift.shape).copy()
    else:
        g = rng.gamma(a.weights, 1.0 / b, size=(n, a.size))
        out = law.drift + np.tensordot(g, a.atoms, axes=1)
    if law.mode == CONE:
        out = 0.5 * (out + np.swapaxes(out, -1, -2))
    return out[0] if size is None else out


# ---------------------------------------------------------------------------
# jump series


@dataclass(frozen=True)
class JumpSeries:
    """Retained jumps ``radii[k] * directions[k]`` of a truncated series.

    Radii are decreasing and at least ``eps``; ``compensation`` is the mean of
    the omitted jumps and ``times`` is set for path simulation.
    """

    radii: np.ndarray
    directions: np.ndarray
    eps: float
    compensation: np.ndarray
    law: GammaLaw
    times: np.ndarray | None = None

    @property
    def jumps(self):
        return self.radii.reshape((-1,) + (1,) * (self.directions.ndim - 1)) * self.directions

    @property
    def count(self) -> int:
        return int(self.radii.size)


def sampler_variant(law: GammaLaw) -> str:
    """Which sampler :func:`sample` uses for a law."""
    a = law.alpha
    if isinstance(a, SequenceMeasure):
        raise UnsupportedError("sequence fixtures have no sampler")
    if isinstance(a, DiscreteMeasure):
        if np.any(atom_scale_values(law.beta, a) <= 0):
            raise DomainError("an atom has beta = 0; the law cannot be sampled")
        return DISCRETE
    if isinstance(law.beta, ConstantScale):
        return HOMOGENEOUS
    return THINNED


def _check_eps(eps):
    if not (eps > 0 and math.isfinite(eps)):
        raise DomainError("truncation eps must be positive")


def _series_rate(law: GammaLaw) -> float:
    bmin = essinf_beta(law)
    if not bmin > 0:
        raise DomainError("essential infimum of beta is 0; the series sampler does not apply")
    return bmin


def compensation(law: GammaLaw, eps: float) -> np.ndarray:
    """Mean of the jumps below ``eps``: ``int U (1 - e^{-beta eps}) / beta alpha(dU)``."""
    _check_eps(eps)
    a, b = law.alpha, law.beta
    shape = law.ambient_shape
    if isinstance(a, DiscreteMeasure):
        if a.size == 0:
            return np.zeros(shape)
        bb = atom_scale_values(b, a)
        f = -np.expm1(-bb * eps) / bb
        return np.tensordot(a.weights * f, a.atoms, axes=1)
    if isinstance(b, ConstantScale):
        f = -math.expm1(-b.beta0 * eps) / b.beta0
        return a.total_mass * f * a.mean_direction()
    val, _ = _family_average(a, b, lambda u, bb: u * (-np.expm1(-bb * eps) / bb)[:, None, None])
    return val


def _directions(law, rng, k):
    """k directions from alpha/|alpha| and beta at each of them."""
    a = law.alpha
    if isinstance(a, DiscreteMeasure):
        idx = a.sample_index(rng, k)
        return a.atoms[idx], atom_scale_values(law.beta, a)[idx]
    dirs = a.sample(rng, k)
    return dirs, np.asarray(law.beta.at(dirs), dtype=float)


def _arrival_radii(mass, b, eps, rng):
    """Radii ``E1^{-1}(G_k / mass) / b`` for all arrivals with radius >= eps."""
    cap = mass * float(exp_integral_e1(b * eps))
    chunk = int(cap + 4.0 * math.sqrt(cap) + 16)
    parts = []
    t0 = 0.0
    while True:
        g = t0 + np.cumsum(rng.standard_exponential(chunk))
        k = int(np.searchsorted(g, cap, side="right"))
        parts.append(g[:k])
        if k < chunk:
            break
        t0 = float(g[-1])
    gam = np.concatenate(parts)
    if gam.size == 0:
        return gam
    return np.asarray(e1_inverse(np.maximum(gam, 1e-300) / mass)) / b


def _series_draw(law, eps, rng, thinned):
    _check_eps(eps)
    rng = as_generator(rng)
    bmin = _series_rate(law)
    mass = law.alpha.total_mass
    r = _arrival_radii(mass, bmin, eps, rng)
    k = r.size
    shape = law.ambient_shape
    if k:
        dirs, bvals = _directions(law, rng, k)
        if thinned:
            u = rng.random(k)
            keep = u < np.exp(-(bvals - bmin) * r)
            r, dirs = r[keep], dirs[keep]
    else:
        dirs = np.zeros((0,) + shape)
    comp = compensation(law, eps)
    series = JumpSeries(r, dirs, eps, comp, law)
    x = law.drift + comp + np.tensordot(r, dirs, axes=1) if r.size else law.drift + comp
    if law.mode == CONE:
        x = 0.5 * (x + x.T)
    return np.asarray(x), series


def sample_series_homogeneous(law: GammaLaw, eps: float = DEFAULT_EPS, rng=None):
    """One draw from a constant-beta law by the truncated shot-noise series.

    Returns
    -------
    draw, JumpSeries
    """
    if not isinstance(law.beta, ConstantScale):
        raise ValidationError("homogeneous series needs a constant beta; use sample_series_thinned")
    return _series_draw(law, eps, rng, thinned=False)


def sample_series_thinned(law: GammaLaw, eps: float = DEFAULT_EPS, rng=None):
    """One draw by thinning a series generated at ``beta_min = essinf beta``.

    A candidate jump ``(r, U)`` is kept with probability
    ``exp(-(beta(U) - beta_min) r)``. For constant beta every candidate is
    kept and the draw equals :func:`sample_series_homogeneous` on the same rng.
    """
    return _series_draw(law, eps, rng, thinned=True)


def _series_batch(law, n, eps, rng, thinned):
    _check_eps(eps)
    rng = as_generator(rng)
    bmin = _series_rate(law)
    mass = law.alpha.total_mass
    shape = law.ambient_shape
    width = int(np.prod(shape))
    cap = mass * float(exp_integral_e1(bmin * eps))
    out = np.zeros((n, width))
    per_block = max(1, int(JUMP_CHUNK / max(cap, 1.0)))
    for start in range(0, n, per_block):
        m = min(per_block, n - start)
        counts = rng.poisson(cap, m)
        tot = int(counts.sum())
        if tot == 0:
            continue
        # given the count, the arrivals are iid uniform on [0, cap]
        y = rng.uniform(0.0, cap, tot) / mass
        r = np.asarray(e1_inverse(np.maximum(y, 1e-300))).reshape(-1) / bmin
        dirs, bvals = _directions(law, rng, tot)
        if thinned:
            u = rng.random(tot)
            r = np.where(u < np.exp(-(bvals - bmin) * r), r, 0.0)
        flat = dirs.reshape(tot, width) * r[:, None]
        owner = np.repeat(np.arange(m), counts)
        for j in range(width):
            out[start : start + m, j] = np.bincount(owner, weights=flat[:, j], minlength=m)
    out = out.reshape((n,) + shape) + law.drift + compensation(law, eps)
    if law.mode == CONE:
        out = 0.5 * (out + np.swapaxes(out, -1, -2))
    return out


def sample(law: GammaLaw, n: int, rng=None, eps: float = DEFAULT_EPS, variant: str | None = None):
    """``n`` independent draws, shape ``(n,) + ambient shape``.

    Discrete laws use the exact sampler; others use the series sampler
    (homogeneous or thinned). The draws are vectorised over one generator;
    see :func:`sample_replicates` for draws that are stable under changes
    of ``n``.
    """
    if int(n) != n or n < 0:
        raise ValidationError("n must be a nonnegative integer")
    n = int(n)
    variant = variant or sampler_variant(law)
    rng = as_generator(rng)
    if variant == DISCRETE:
        return sample_discrete(law, rng, size=n)
    if variant == HOMOGENEOUS:
        if not isinstance(law.beta, ConstantScale):
            raise ValidationError("homogeneous series needs a constant beta")
        return _series_batch(law, n, eps, rng, thinned=False)
    if variant == THINNED:
        return _series_batch(law, n, eps, rng, thinned=True)
    raise ValidationError(f"unknown sampler variant {variant!r}")


def sample_one(law: GammaLaw, rng, eps: float = DEFAULT_EPS, variant: str | None = None):
    """A single draw by the sampler chosen for the law."""
    variant = variant or sampler_variant(law)
    if variant == DISCRETE:
        return sample_discrete(law, rng)
    if variant == HOMOGENEOUS:
        return sample_series_homogeneous(law, eps, rng)[0]
    return sample_series_thinned(law, eps, rng)[0]


def sample_replicates(law: GammaLaw, n: int, spec: RngSpec, eps: float = DEFAULT_EPS, variant=None):
    """Draw ``i`` from replicate stream ``i`` of ``spec``.

    The first k draws do not depend on n.
    """
    variant = variant or sampler_variant(law)
    return np.stack([sample_one(law, spec.generator(i), eps, variant) for i in range(int(n))]) if n else np.zeros((0,) + law.ambient_shape)


# ---------------------------------------------------------------------------
# matrix Gamma-Normal


def symmetric_sqrt(x, tol: float = 1e-10):
    """Symmetric PSD square root (batched); negative eigenvalues below tol raise."""
    x = np.asarray(x, dtype=float)
    lam, vec = np.linalg.eigh(x)
    scale = np.maximum(1.0, np.abs(lam).max(axis=-1, keepdims=True))
    if np.any(lam < -tol * scale):
        raise DomainError("matrix has a negative eigenvalue")
    root = np.sqrt(np.clip(lam, 0.0, None))
    return (vec * root[..., None, :]) @ np.swapaxes(vec, -1, -2)


def sample_gamma_normal(mixing: GammaLaw, q: int, rng, n: int | None = None, eps: float = DEFAULT_EPS):
    """Matrix Gamma-Normal draws ``Y = X^{1/2} Z``, X from ``mixing``, Z iid N(0,1) d x q."""
    if mixing.mode != CONE:
        raise ValidationError("the mixing law must be cone-valued")
    if int(q) != q or q < 1:
        raise ValidationError("q must be a positive integer")
    rng = as_generator(rng)
    m = 1 if n is None else int(n)
    x = sample(mixing, m, rng, eps)
    z = rng.standard_normal((m, mixing.d, int(q)))
    y = symmetric_sqrt(x) @ z
    return y[0] if n is None else y


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class PathSample:
    """Process values on ``times``; ``values[i]`` is X(times[i])."""

    times: np.ndarray
    values: np.ndarray
    jumps: JumpSeries


def simulate_path(law: GammaLaw, T: float, eps: float = DEFAULT_EPS, n_grid: int = 100, rng=None) -> PathSample:
    """Levy process with ``X(1) ~ law`` on ``[0, T]``, evaluated on ``n_grid + 1`` points.

    The jumps of the marginal law at T get iid uniform times on ``[0, T]``;
    drift and small-jump compensation accrue linearly in time.
    """
    if not (T > 0 and math.isfinite(T)):
        raise DomainError("T must be positive")
    if int(n_grid) != n_grid or n_grid < 1:
        raise ValidationError("n_grid must be a positive integer")
    rng = as_generator(rng)
    lt = process_marginal(law, T)
    _, series = _series_draw(lt, eps, rng, thinned=not isinstance(law.beta, ConstantScale))
    k = series.count
    times = rng.uniform(0.0, T, k)
    order = np.argsort(times, kind="stable")
    jumps = series.jumps[order]
    grid = np.linspace(0.0, T, int(n_grid) + 1)
    shape = law.ambient_shape
    cum = np.concatenate([np.zeros((1,) + shape), np.cumsum(jumps, axis=0)]) if k else np.zeros((1,) + shape)
    hit = np.searchsorted(times[order], grid, side="right")
    rate = (lt.drift + series.compensation) / T
    values = cum[hit] + grid.reshape((-1,) + (1,) * len(shape)) * rate
    if law.mode == CONE:
        values = 0.5 * (values + np.swapaxes(values, -1, -2))
    sj = JumpSeries(series.radii[order], series.directions[order], eps, series.compensation, lt, times[order])
    return PathSample(grid, values, sj)


# ---------------------------------------------------------------------------
# Wiener-Gamma integrals


def _wg_components(h, base):
    """Split ``Y^h`` into independent one-dimensional cores.

    Each item is ``(rule, mass, rate, direction or None)``; a None direction
    means directions are drawn from the base's alpha.
    """
    from .wiener_gamma import ThorinFunction

    if not isinstance(h, ThorinFunction):
        raise ValidationError("h must be a ThorinFunction")
    a, b = base.alpha, base.beta
    if isinstance(a, DiscreteMeasure):
        bb = atom_scale_values(b, a)
        rules = h.rules(a.size)
        return [(rules[j], a.weights[j], 1.0 if h.scaled else bb[j], a.atoms[j]) for j in range(a.size)]
    if isinstance(a, SequenceMeasure):
        raise UnsupportedError("sequence fixtures have no sampler")
    if h.per_atom:
        raise ValidationError("per-atom rules need a discrete base")
    if h.scaled:
        return [(h.rule, a.total_mass, 1.0, None)]
    if not isinstance(b, ConstantScale):
        raise UnsupportedError("direction-free h over a non-constant beta family is not supported")
    return [(h.rule, a.total_mass, b.beta0, None)]


def _default_horizon(rule, mass, b, tol):
    from .wiener_gamma import ExponentialRule, PiecewiseConstantRule, PowerLawRule

    if isinstance(rule, PiecewiseConstantRule):
        return rule.horizon
    if isinstance(rule, PowerLawRule):
        return math.inf
    if isinstance(rule, ExponentialRule):
        # tail of int log(1 + h/b) ds is at most mass * c e^{-lam S} / (lam b)
        return max(0.0, math.log(mass * rule.c / (rule.lam * b * tol)) / rule.lam)
    raise UnsupportedError(f"no sampler for {type(rule).__name__}")


def _tail_bound(rule, mass, b, S):
    if math.isinf(S):
        return 0.0
    return mass * rule.mass_beyond(S) / b


def _small_jump_mean(rule, mass, b, eps, S):
    """``mass * [int_0^S (h/b)(1 - e^{-b eps/h}) ds + int_S^inf h/b ds]``."""
    from .wiener_gamma import PiecewiseConstantRule, PowerLawRule

    if isinstance(rule, PowerLawRule) and math.isinf(S):
        # substitute u = (b eps/c)^(1/p) s; int_0^inf (1 - e^{-u^p}) u^{-p} du = -Gamma(1/p - 1)/p
        p = rule.p
        unit = -special.gamma(1.0 / p - 1.0) / p
        return float(mass * eps ** (1.0 - 1.0 / p) * (rule.c / b) ** (1.0 / p) * unit)
    if isinstance(rule, PiecewiseConstantRule):
        lens = np.diff(np.clip(rule.edges, 0.0, S))
        v = rule.values
        pos = v > 0
        inner_ = np.sum(lens[pos] * v[pos] / b * -np.expm1(-b * eps / v[pos]))
        return float(mass * inner_ + _tail_bound(rule, mass, b, S))

    def f(s):
        hv = float(rule(s))
        if hv <= 0:
            return 0.0
        if not math.isfinite(hv):
            return eps
        return hv / b * -math.expm1(-b * eps / hv)

    # the integrand is ~eps where h is large and ~h/b in the tail; split
    # the range on a geometric grid so quad sees both regimes
    edges = [0.0] + [10.0**k for k in range(-8, 9)] + [math.inf]
    total = 0.0
    for a_, b_ in zip(edges[:-1], edges[1:]):
        if a_ >= S:
            break
        v, _ = integrate.quad(f, a_, min(b_, S), epsabs=1e-16, epsrel=1e-10, limit=200)
        total += v
    return float(mass * total + _tail_bound(rule, mass, b, S))


def _wg_core(rule, mass, b, S, eps, rng, n):
    """Retained points ``y = h(s) r >= eps`` for n independent draws.

    Returns ``(owner, y)``: the draw index and value of each retained point.
    """
    from .wiener_gamma import ExponentialRule, PiecewiseConstantRule, PowerLawRule

    owners, ys = [], []
    if isinstance(rule, PowerLawRule):
        # y = c s^-p r; marginally y has intensity at most
        # mass Gamma(1 + 1/p) (b/c)^(-1/p) y^(-1-1/p) dy, sampled as Pareto
        # and thinned by the fraction of s in [0, S]
        p, c = rule.p, rule.c
        k = b / c
        lam = mass * special.gamma(1.0 + 1.0 / p) * k ** (-1.0 / p) * p * eps ** (-1.0 / p)
        counts = rng.poisson(lam, n)
        tot = int(counts.sum())
        y = eps * rng.random(tot) ** (-p)
        owner = np.repeat(np.arange(n), counts)
        if math.isfinite(S):
            keep = rng.random(tot) < special.gammainc(1.0 / p, k * y * S**p)
            y, owner = y[keep], owner[keep]
        owners.append(owner)
        ys.append(y)
        return np.concatenate(owners), np.concatenate(ys)

    if isinstance(rule, PiecewiseConstantRule):
        cells = [
            (a_, min(b_, S), v, v)
            for a_, b_, v in zip(rule.edges[:-1], rule.edges[1:], rule.values)
            if v > 0 and a_ < S
        ]
    elif isinstance(rule, ExponentialRule):
        # cells on which h drops by a factor of 2, envelope h(left end)
        width = math.log(2.0) / rule.lam
        cells = []
        a_ = 0.0
        while a_ < S:
            b_ = min(a_ + width, S)
            cells.append((a_, b_, float(rule(a_)), None))
            a_ = b_
    else:
        raise UnsupportedError(f"no sampler for {type(rule).__name__}")

    for a_, b_, H, exact in cells:
        length = b_ - a_
        # candidates (s, r): s uniform on the cell, r >= eps/H
        e = float(exp_integral_e1(b * eps / H))
        counts = rng.poisson(mass * length * e, n)
        tot = int(counts.sum())
        if tot == 0:
            continue
        r = np.asarray(e1_inverse(np.maximum(rng.uniform(0.0, e, tot), 1e-300))).reshape(-1) / b
        owner = np.repeat(np.arange(n), counts)
        if exact is not None:
            y = exact * r
        else:
            s = a_ + length * rng.random(tot)
            y = rule(s) * r
            keep = y >= eps
            y, owner = y[keep], owner[keep]
        owners.append(owner)
        ys.append(y)
    if not ys:
        return np.zeros(0, dtype=int), np.zeros(0)
    return np.concatenate(owners), np.concatenate(ys)


def simulate_wiener_gamma(
    h,
    base: GammaLaw,
    S: float | None = None,
    eps: float = 1e-6,
    rng=None,
    size: int | None = None,
    tol: float = 1e-3,
):
    """Draws of ``Y^h = int int h(s, x/|x|) x N(ds, dx)`` over ``[0, S]``.

    Points with ``h(s, U) r < eps`` and all points beyond the horizon S are
    replaced by their mean. S defaults to the end of a table, to infinity for
    power laws, and otherwise to the point where the omitted part of
    ``int int log(1 + h/beta)`` falls below ``tol``.

    Raises
    ------
    DomainError
        If h is not integrable, or if the given S leaves a tail above ``tol``.
    """
    from .wiener_gamma import h_integrability_check

    _check_eps(eps)
    rng = as_generator(rng)
    if not h_integrability_check(h, base).ok:
        raise DomainError("h is not integrable against the base law")
    n = 1 if size is None else int(size)
    shape = base.ambient_shape
    width = int(np.prod(shape))
    out = np.zeros((n, width))
    for rule, mass, b, direction in _wg_components(h, base):
        s_max = _default_horizon(rule, mass, b, tol) if S is None else float(S)
        if S is not None:
            need = _default_horizon(rule, mass, b, tol)
            if _tail_bound(rule, mass, b, s_max) > tol and s_max < need:
                raise DomainError(f"horizon S={S} leaves a tail above tol; need S >= {need:.6g}")
        owner, y = _wg_core(rule, mass, b, s_max, eps, rng, n)
        comp = _small_jump_mean(rule, mass, b, eps, s_max)
        if direction is not None:
            tot = np.bincount(owner, weights=y, minlength=n) + comp
            out += tot[:, None] * np.asarray(direction).reshape(1, width)
        else:
            dirs = base.alpha.sample(rng, y.size).reshape(y.size, width) if y.size else np.zeros((0, width))
            for j in range(width):
                out[:, j] += np.bincount(owner, weights=y * dirs[:, j], minlength=n)
            out += comp * base.alpha.mean_direction().reshape(1, width)
    out = out.reshape((n,) + shape)
    if base.mode == CONE:
        out = 0.5 * (out + np.swapaxes(out, -1, -2))
    return out[0] if size is None else out
