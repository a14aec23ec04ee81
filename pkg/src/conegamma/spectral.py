"""Directional measures alpha, scale functions beta, and reparametrisations.

A direction is either a unit vector of R^d under a declared norm (vector
mode) or a symmetric PSD d x d matrix with unit trace (cone mode). Measures
and scale functions are immutable once constructed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedError, ValidationError

VECTOR = "vector"
CONE = "cone"

EIG_TOL = 1e-10  # eigenvalue slack accepted for stored directions
INPUT_EIG_TOL = 1e-8  # slack accepted on raw input before clipping
QUAD_SEED = 20240611
DEFAULT_QUAD_SIZE = 1 << 17


# ---------------------------------------------------------------------------
# norms


class Norm:
    """Norm ``x -> ||T x||_p`` on R^d, or the trace norm on symmetric matrices.

    Parameters
    ----------
    name : {"l1", "l2", "linf", "trace"} or "lp:<p>"
    transform : array, optional
        Matrix ``T`` applied before the p-norm. Used to record the sphere of
        ``||A^{-1} . ||`` after a linear pushforward.
    """

    def __init__(self, name: str = "l2", transform=None):
        if name not in ("l1", "l2", "linf", "trace") and not name.startswith("lp:"):
            raise ValidationError(f"unknown norm {name!r}")
        if name.startswith("lp:"):
            p = float(name[3:])
            if not p >= 1:
                raise ValidationError("p-norm needs p >= 1")
        if name == "trace" and transform is not None:
            raise ValidationError("trace norm takes no transform")
        self.name = name
        self.transform = None if transform is None else np.array(transform, dtype=float)

    @property
    def p(self) -> float:
        return {"l1": 1.0, "l2": 2.0, "linf": math.inf}.get(
            self.name, float(self.name[3:]) if self.name.startswith("lp:") else math.nan
        )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.name == "trace":
            return np.trace(x, axis1=-2, axis2=-1)
        if self.transform is not None:
            x = x @ self.transform.T
        return np.linalg.norm(x, ord=self.p, axis=-1)

    def __eq__(self, other):
        if not isinstance(other, Norm) or other.name != self.name:
            return False
        if self.transform is None or other.transform is None:
            return self.transform is None and other.transform is None
        return self.transform.shape == other.transform.shape and np.array_equal(
            self.transform, other.transform
        )

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return f"Norm({self.name!r})" if self.transform is None else f"Norm({self.name!r}, T)"

    def to_json(self):
        if self.transform is None:
            return self.name
        return {"name": self.name, "transform": self.transform.tolist()}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, Norm):
            return obj
        if isinstance(obj, str):
            return cls(obj)
        return cls(obj["name"], obj.get("transform"))


def as_norm(norm) -> Norm:
    return Norm.from_json(norm)


# ---------------------------------------------------------------------------
# directions


def validate_direction(x, mode: str = VECTOR, norm="l2") -> np.ndarray:
    """Normalise ``x`` onto the unit sphere of the given mode and norm.

    Returns a new float array. Cone-mode input must be symmetric PSD up to
    an eigenvalue slack of 1e-8; the result is symmetrised and scaled to unit
    trace.
    """
    arr = np.array(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("direction has non-finite entries")
    if mode == VECTOR:
        if arr.ndim != 1:
            raise ValidationError("vector direction must be one-dimensional")
        n = float(as_norm(norm)(arr))
        if n == 0.0:
            raise ValidationError("zero vector has no direction")
        return arr / n
    if mode != CONE:
        raise ValidationError(f"unknown mode {mode!r}")
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError("cone direction must be a square matrix")
    if not np.allclose(arr, arr.T, atol=1e-12 * max(1.0, np.abs(arr).max())):
        raise ValidationError("cone direction must be symmetric")
    arr = 0.5 * (arr + arr.T)
    scale = max(1.0, float(np.abs(arr).max()))
    lam = np.linalg.eigvalsh(arr)
    if lam[0] < -INPUT_EIG_TOL * scale:
        raise ValidationError(f"matrix is not PSD (eigenvalue {lam[0]:.3g})")
    t = float(np.trace(arr))
    if t <= 0:
        raise ValidationError("zero matrix has no direction")
    return arr / t


def inner(u, z):
    """Pairing <u, z> over the trailing one (vector) or two (matrix) axes."""
    u = np.asarray(u)
    z = np.asarray(z)
    if z.ndim >= 2 and u.ndim >= 2 and u.shape[-2:] == z.shape[-2:] and z.shape[-1] == z.shape[-2]:
        return np.einsum("...ij,...ij->...", u, z)
    return u @ z


# ---------------------------------------------------------------------------
# sphere measures


class SphereMeasure:
    """Finite measure alpha on a unit sphere (abstract)."""

    mode: str
    d: int

    @property
    def total_mass(self) -> float:
        raise NotImplementedError

    @property
    def is_discrete(self) -> bool:
        return False

    @property
    def norm(self) -> Norm:
        return Norm("trace")

    def sample(self, rng, size=None):
        raise NotImplementedError

    def mean_direction(self):
        """Mean of the normalised measure alpha / alpha(S)."""
        dirs = self.quadrature()
        return dirs.mean(axis=0)

    def quadrature(self, n: int = DEFAULT_QUAD_SIZE) -> np.ndarray:
        """Fixed Monte-Carlo sample of directions used for sphere integrals.

        Drawn once from a fixed seed and cached on the instance, so repeated
        integrals over the same measure share nodes.
        """
        n = min(n, max(1 << 12, (1 << 24) // max(1, self.d) ** 2))
        cache = self.__dict__.setdefault("_quad_cache", {})
        if n not in cache:
            rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(QUAD_SEED)))
            cache[n] = self.sample(rng, n)
        return cache[n]

    def with_mass(self, mass: float) -> "SphereMeasure":
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class DiscreteMeasure(SphereMeasure):
    """Finitely many atoms with positive weights.

    Atoms are normalised on construction unless ``normalize=False``.
    """

    atoms: np.ndarray
    weights: np.ndarray
    mode: str = VECTOR
    norm_: Norm = field(default_factory=lambda: Norm("l2"))
    normalize: bool = True

    def __post_init__(self):
        norm = Norm("trace") if self.mode == CONE else as_norm(self.norm_)
        w = np.array(self.weights, dtype=float).reshape(-1)
        atoms = np.array(self.atoms, dtype=float)
        if atoms.size == 0:
            atoms = atoms.reshape((0,) + atoms.shape[1:]) if atoms.ndim > 1 else np.zeros((0, 0))
        if atoms.shape[0] != w.shape[0]:
            raise ValidationError("atoms and weights differ in length")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise ValidationError("atom weights must be finite and > 0")
        if w.size:
            if self.normalize:
                atoms = np.stack([validate_direction(a, self.mode, norm) for a in atoms])
            else:
                _check_on_sphere(atoms, self.mode, norm)
        atoms.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "norm_", norm)
        object.__setattr__(self, "normalize", False)

    @property
    def d(self) -> int:
        return int(self.atoms.shape[1]) if self.atoms.ndim > 1 else 0

    @property
    def norm(self) -> Norm:
        return self.norm_

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @property
    def is_discrete(self) -> bool:
        return True

    @property
    def size(self) -> int:
        return int(self.weights.size)

    def sample(self, rng, size=None):
        if self.size == 0:
            raise ValidationError("cannot sample from the zero measure")
        p = self.weights / self.weights.sum()
        idx = rng.choice(self.size, size=size, p=p)
        return self.atoms[idx]

    def sample_index(self, rng, size=None):
        p = self.weights / self.weights.sum()
        return rng.choice(self.size, size=size, p=p)

    def mean_direction(self):
        return np.tensordot(self.weights, self.atoms, axes=1) / self.total_mass

    def with_mass(self, mass):
        return DiscreteMeasure(self.atoms, self.weights * (mass / self.total_mass), self.mode, self.norm_, False)

    def scaled(self, t: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.atoms, self.weights * t, self.mode, self.norm_, False)


def _check_on_sphere(atoms, mode, norm):
    if mode == CONE:
        tr = np.trace(atoms, axis1=-2, axis2=-1)
        if np.any(np.abs(tr - 1) > 1e-12):
            raise ValidationError("cone atoms must have unit trace")
        if not np.allclose(atoms, np.swapaxes(atoms, -1, -2), atol=1e-12):
            raise ValidationError("cone atoms must be symmetric")
        if np.any(np.linalg.eigvalsh(atoms)[:, 0] < -EIG_TOL):
            raise ValidationError("cone atoms must be PSD")
    else:
        if np.any(np.abs(norm(atoms) - 1) > 1e-12):
            raise ValidationError("vector atoms must have unit norm")


@dataclass(frozen=True, eq=False)
class WishartInducedMeasure(SphereMeasure):
    """The family alpha_eta on the unit-trace PSD sphere, total mass omega.

    With ``sigma`` different from the identity this is the measure whose
    normalised version is the law of ``W / tr W`` for ``W ~ W_d(2 eta, sigma)``;
    that is the pushforward of alpha_eta under ``U -> C U C^T / tr(C U C^T)``
    for any C with ``C C^T = sigma``.
    """

    d: int
    eta: float
    omega: float
    sigma: np.ndarray | None = None
    mode: str = CONE

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValidationError("d must be a positive integer")
        if not self.eta > (self.d - 1) / 2:
            raise ValidationError(f"eta={self.eta} must exceed (d-1)/2")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValidationError("omega must be positive and finite")
        s = np.eye(self.d) if self.sigma is None else check_spd(self.sigma, self.d)
        # the direction law only sees Sigma up to scale; snap near-isotropic
        # input to the identity so equal laws share quadrature nodes
        if np.allclose(s, s[0, 0] * np.eye(self.d), rtol=0, atol=1e-12 * s[0, 0]):
            s = np.eye(self.d)
        s.setflags(write=False)
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "eta", float(self.eta))
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def total_mass(self):
        return self.omega

    @property
    def isotropic(self) -> bool:
        return bool(np.array_equal(self.sigma, np.eye(self.d)))

    def sample(self, rng, size=None):
        from .sampler import sample_wishart

        w = sample_wishart(self.d, 2.0 * self.eta, self.sigma, rng, size=size)
        return w / np.trace(w, axis1=-2, axis2=-1)[..., None, None]

    def mean_direction(self):
        if self.isotropic:
            return np.eye(self.d) / self.d
        return super().mean_direction()

    def with_mass(self, mass):
        return WishartInducedMeasure(self.d, self.eta, mass, self.sigma)


@dataclass(frozen=True, eq=False)
class RankQProjectorMeasure(SphereMeasure):
    """Directions ``V V^T`` with V a d x q matrix uniform on the Frobenius sphere.

    The default total mass is d.
    """

    d: int
    q: int
    mass: float | None = None
    mode: str = CONE

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValidationError("d must be a positive integer")
        if int(self.q) != self.q or not 1 <= self.q <= self.d:
            raise ValidationError("q must be an integer in 1..d")
        m = float(self.d) if self.mass is None else float(self.mass)
        if not (m > 0 and math.isfinite(m)):
            raise ValidationError("mass must be positive")
        object.__setattr__(self, "mass", m)
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "q", int(self.q))

    @property
    def total_mass(self):
        return self.mass

    def sample(self, rng, size=None):
        shape = (() if size is None else (size,)) + (self.d, self.q)
        v = rng.standard_normal(shape)
        u = v @ np.swapaxes(v, -1, -2)
        return u / np.trace(u, axis1=-2, axis2=-1)[..., None, None]

    def mean_direction(self):
        return np.eye(self.d) / self.d

    def with_mass(self, mass):
        return RankQProjectorMeasure(self.d, self.q, mass)


@dataclass(frozen=True, eq=False)
class ConjugatedMeasure(SphereMeasure):
    """Pushforward of a cone family under ``U -> C U C^T / tr(C U C^T)``."""

    base: SphereMeasure
    C: np.ndarray
    mode: str = CONE

    def __post_init__(self):
        c = np.array(self.C, dtype=float)
        if c.shape != (self.base.d, self.base.d):
            raise ValidationError("C has the wrong shape")
        c.setflags(write=False)
        object.__setattr__(self, "C", c)

    @property
    def d(self):
        return self.base.d

    @property
    def total_mass(self):
        return self.base.total_mass

    def sample(self, rng, size=None):
        u = self.base.sample(rng, size)
        v = self.C @ u @ self.C.T
        return v / np.trace(v, axis1=-2, axis2=-1)[..., None, None]

    def with_mass(self, mass):
        return ConjugatedMeasure(self.base.with_mass(mass), self.C)


# Infinite discrete fixtures on the circle: v_n = (sin(1/n), cos(1/n)).
# Each weight rule is described by its asymptotic profile
# n^power * exp(-rate n) * ln(n)^logpow, which decides convergence of any
# series of the form sum_n w_n * n^k * ln(1+n)^j.
SEQUENCE_RULES = {
    "exp_weights": "w_n = exp(-n)",
    "power_weights": "w_n = n^-(1+m)",
    "log_weights": "w_n = 1 / (ln(1+n)^3 (n+1))",
}


@dataclass(frozen=True, eq=False)
class SequenceMeasure(SphereMeasure):
    """Countable atoms ``v_n = (sin(1/n), cos(1/n))`` with closed-form weights."""

    rule: str
    m: float | None = None
    scale: float = 1.0
    mode: str = VECTOR

    def __post_init__(self):
        if self.rule not in SEQUENCE_RULES:
            raise ValidationError(f"unknown sequence rule {self.rule!r}")
        if self.rule == "power_weights" and not (self.m is not None and self.m > 0):
            raise ValidationError("power_weights needs m > 0")
        if not self.scale > 0:
            raise ValidationError("scale must be > 0")

    @property
    def d(self):
        return 2

    @property
    def norm(self):
        return Norm("l2")

    def weight(self, n):
        n = np.asarray(n, dtype=float)
        if self.rule == "exp_weights":
            w = np.exp(-n)
        elif self.rule == "power_weights":
            w = n ** (-(1.0 + self.m))
        else:
            w = 1.0 / (np.log1p(n) ** 3 * (n + 1.0))
        return self.scale * w

    def profile(self):
        """(power, rate, logpow) with w_n ~ n^power e^{-rate n} ln(n)^logpow."""
        if self.rule == "exp_weights":
            return 0.0, 1.0, 0.0
        if self.rule == "power_weights":
            return -(1.0 + self.m), 0.0, 0.0
        return -1.0, 0.0, -3.0

    @staticmethod
    def atom(n):
        n = np.asarray(n, dtype=float)
        return np.stack([np.sin(1.0 / n), np.cos(1.0 / n)], axis=-1)

    @property
    def total_mass(self):
        from .gamma_law import series_sum

        return series_sum(self, lambda n: self.weight(n), (0.0, 0.0))[1]

    def sample(self, rng, size=None):
        raise UnsupportedError("sampling from an infinite atomic fixture is not supported")

    def mean_direction(self):
        raise UnsupportedError("mean direction of a sequence fixture is not available")

    def with_mass(self, mass):
        raise UnsupportedError("sequence fixtures have fixed mass profiles")

    def scaled(self, t):
        return SequenceMeasure(self.rule, self.m, self.scale * t)


# ---------------------------------------------------------------------------
# scale functions


def check_spd(sigma, d=None) -> np.ndarray:
    s = np.array(sigma, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or (d is not None and s.shape[0] != d):
        raise ValidationError("Sigma must be a d x d matrix")
    if not np.allclose(s, s.T, atol=1e-12 * max(1.0, np.abs(s).max())):
        raise ValidationError("Sigma must be symmetric")
    s = 0.5 * (s + s.T)
    if np.linalg.eigvalsh(s)[0] <= 0:
        raise ValidationError("Sigma must be positive definite")
    return s


class ScaleFunction:
    """Rate function beta on the sphere (abstract)."""

    def at(self, dirs):
        raise NotImplementedError

    def lower_bound(self) -> float:
        """An exact lower bound for beta over the whole sphere."""
        raise NotImplementedError

    def scaled(self, c: float) -> "ScaleFunction":
        """beta / c."""
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class ConstantScale(ScaleFunction):
    beta0: float

    def __post_init__(self):
        if not (self.beta0 > 0 and math.isfinite(self.beta0)):
            raise ValidationError("beta0 must be positive and finite")
        object.__setattr__(self, "beta0", float(self.beta0))

    def at(self, dirs):
        dirs = np.asarray(dirs)
        return np.full(dirs.shape[0] if dirs.ndim > 1 else (), self.beta0)

    def lower_bound(self):
        return self.beta0

    def scaled(self, c):
        return ConstantScale(self.beta0 / c)


@dataclass(frozen=True, eq=False)
class PerAtomScale(ScaleFunction):
    """beta tabulated at the atoms of a discrete measure; zeros allowed here."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if np.any(~np.isfinite(v)) or np.any(v < 0):
            raise ValidationError("per-atom beta values must be finite and >= 0")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def at(self, dirs):
        raise UnsupportedError("per-atom beta is only defined on its atoms")

    def lower_bound(self):
        return float(self.values.min()) if self.values.size else math.inf

    def scaled(self, c):
        return PerAtomScale(self.values / c)


@dataclass(frozen=True, eq=False)
class SigmaTraceScale(ScaleFunction):
    """beta(U) = tr(Sigma^{-1} U)."""

    sigma: np.ndarray

    def __post_init__(self):
        s = check_spd(self.sigma)
        s.setflags(write=False)
        inv = np.linalg.inv(s)
        inv = 0.5 * (inv + inv.T)
        inv.setflags(write=False)
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "_inv", inv)

    @property
    def sigma_inv(self):
        return self._inv

    def at(self, dirs):
        return np.einsum("ij,...ji->...", self._inv, np.asarray(dirs))

    def lower_bound(self):
        # inf of tr(Sigma^{-1} U) over unit-trace PSD U is the smallest
        # eigenvalue of Sigma^{-1}
        return float(1.0 / np.linalg.eigvalsh(self.sigma)[-1])

    def scaled(self, c):
        return SigmaTraceScale(self.sigma * c)


@dataclass(frozen=True, eq=False)
class SequenceScale(ScaleFunction):
    """beta(v_n) = factor / n on the sequence fixtures."""

    factor: float = 1.0

    def at(self, dirs):
        raise UnsupportedError("sequence beta is indexed by n, not by direction")

    def value(self, n):
        return self.factor / np.asarray(n, dtype=float)

    def lower_bound(self):
        return 0.0

    def scaled(self, c):
        return SequenceScale(self.factor / c)


def atom_scale_values(beta: ScaleFunction, alpha: DiscreteMeasure) -> np.ndarray:
    """beta evaluated at each atom of a discrete measure."""
    if isinstance(beta, PerAtomScale):
        if beta.values.size != alpha.size:
            raise ValidationError(
                f"per-atom beta has {beta.values.size} entries for {alpha.size} atoms"
            )
        return np.array(beta.values)
    if alpha.size == 0:
        return np.zeros(0)
    return np.asarray(beta.at(alpha.atoms), dtype=float)


def scale_values_at(beta: ScaleFunction, alpha: SphereMeasure, dirs) -> np.ndarray:
    if isinstance(beta, PerAtomScale):
        return atom_scale_values(beta, alpha)
    return np.asarray(beta.at(dirs), dtype=float)


# ---------------------------------------------------------------------------
# reparametrisations


def norm_change(alpha, beta, from_norm, to_norm):
    """Re-express (alpha, beta) on the sphere of another norm.

    Atoms move to ``v / ||v||_b`` with unchanged weights and
    ``beta_b(v_b) = beta(v) / ||v||_b``. Only discrete vector-mode measures
    are accepted.
    """
    if not isinstance(alpha, DiscreteMeasure) or alpha.mode != VECTOR:
        raise UnsupportedError("norm change applies to discrete vector-mode measures only")
    a = as_norm(from_norm) if from_norm is not None else alpha.norm
    b = as_norm(to_norm)
    if not a == alpha.norm:
        raise ValidationError(f"measure is on the {alpha.norm!r} sphere, not {a!r}")
    vals = atom_scale_values(beta, alpha)
    if alpha.size == 0:
        return DiscreteMeasure(alpha.atoms, alpha.weights, VECTOR, b, False), PerAtomScale(vals)
    nb = b(alpha.atoms)
    atoms = alpha.atoms / nb[:, None]
    # exact unit norm up to rounding; renormalise to absorb it
    atoms = atoms / b(atoms)[:, None]
    return DiscreteMeasure(atoms, alpha.weights, VECTOR, b, False), PerAtomScale(vals / nb)


def _check_invertible(A, name):
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"{name} must be square")
    scale = max(1.0, float(np.abs(A).max())) ** A.shape[0]
    if abs(np.linalg.det(A)) < 1e-12 * scale:
        raise ValidationError(
            f"{name} is singular; the image of a Gamma law under a map with a "
            "kernel is in general not of this class"
        )
    return A


def pushforward_linear(alpha, beta, A, to_norm=None):
    """Parameters of ``A X`` for X with parameters (alpha, beta).

    Atoms ``v -> A v`` on the sphere of ``||A^{-1} . ||`` with the same weights and
    ``beta_A(A v) = beta(v)``. With ``to_norm`` the result is moved to that
    sphere by :func:`norm_change`.

    Returns
    -------
    alpha_A, beta_A, norm_A
    """
    if not isinstance(alpha, DiscreteMeasure) or alpha.mode != VECTOR:
        raise UnsupportedError("linear pushforward applies to discrete vector-mode measures")
    A = _check_invertible(A, "A")
    if A.shape[0] != alpha.d and alpha.size:
        raise ValidationError("A does not match the dimension")
    old = alpha.norm
    Ainv = np.linalg.inv(A)
    t = Ainv if old.transform is None else old.transform @ Ainv
    new_norm = Norm(old.name, t)
    vals = atom_scale_values(beta, alpha)
    atoms = alpha.atoms @ A.T if alpha.size else alpha.atoms
    alpha_a = DiscreteMeasure(atoms, alpha.weights, VECTOR, new_norm, False)
    beta_a = PerAtomScale(vals)
    if to_norm is not None:
        alpha_a, beta_a = norm_change(alpha_a, beta_a, new_norm, to_norm)
        new_norm = alpha_a.norm
    return alpha_a, beta_a, new_norm


def conjugation_pushforward(alpha, beta, C):
    """Parameters of ``C M C^T`` for a cone-mode law with parameters (alpha, beta).

    Atoms ``U -> C U C^T / t`` with ``t = tr(C U C^T)`` and weights unchanged;
    a jump ``r U`` becomes ``(r t) U'`` so the rate at ``U'`` is ``beta(U) / t``.
    Constant and SigmaTrace scales map to ``SigmaTrace(C S C^T)``.
    """
    C = _check_invertible(C, "C")
    if alpha.mode != CONE:
        raise UnsupportedError("conjugation applies to cone-mode measures")
    if C.shape[0] != alpha.d:
        raise ValidationError("C does not match the dimension")
    if np.array_equal(C, np.eye(C.shape[0])):
        return alpha, beta

    if isinstance(alpha, DiscreteMeasure):
        vals = atom_scale_values(beta, alpha)
        if alpha.size == 0:
            return alpha, PerAtomScale(vals)
        v = C @ alpha.atoms @ C.T
        t = np.trace(v, axis1=-2, axis2=-1)
        atoms = v / t[:, None, None]
        atoms = 0.5 * (atoms + np.swapaxes(atoms, -1, -2))
        atoms = atoms / np.trace(atoms, axis1=-2, axis2=-1)[:, None, None]
        new_alpha = DiscreteMeasure(atoms, alpha.weights, CONE, Norm("trace"), False)
        return new_alpha, PerAtomScale(vals / t)

    new_beta = _conjugate_scale(beta, C)
    if isinstance(alpha, WishartInducedMeasure):
        s = C @ alpha.sigma @ C.T
        return WishartInducedMeasure(alpha.d, alpha.eta, alpha.omega, 0.5 * (s + s.T)), new_beta
    if isinstance(alpha, RankQProjectorMeasure) and np.allclose(C @ C.T, np.eye(C.shape[0]), atol=1e-13):
        return alpha, new_beta
    if isinstance(alpha, ConjugatedMeasure):
        return ConjugatedMeasure(alpha.base, C @ alpha.C), new_beta
    return ConjugatedMeasure(alpha, C), new_beta


def _conjugate_scale(beta, C):
    if isinstance(beta, ConstantScale):
        s = C @ C.T / beta.beta0
    elif isinstance(beta, SigmaTraceScale):
        s = C @ beta.sigma @ C.T
    else:
        raise UnsupportedError(f"cannot conjugate a {type(beta).__name__} on a family measure")
    s = 0.5 * (s + s.T)
    if np.allclose(s, s[0, 0] * np.eye(s.shape[0]), rtol=1e-14, atol=0):
        return ConstantScale(1.0 / s[0, 0])
    return SigmaTraceScale(s)


def sample_direction(family: SphereMeasure, rng, size=None):
    """Draw directions from the normalised measure alpha / alpha(S)."""
    if not isinstance(family, SphereMeasure):
        raise ValidationError("not a sphere measure")
    return family.sample(rng, size)
