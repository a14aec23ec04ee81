"""Generalised Gamma convolutions and Wiener-Gamma integrals.

A Thorin measure ``u`` on (0, inf) defines the GGC with Laplace transform
``exp(-int log(1 + z/s) u(ds))``. Its Thorin function is
``h(s) = 1 / F^{-1}(s)`` with ``F(x) = u((0, x])`` and the infimum-convention
generalised inverse; conversely ``u`` is the image of Lebesgue measure under
``s -> 1/h(s)``.

A :class:`ThorinFunction` is built from a small set of rules with closed-form
image measures: piecewise-constant tables, power laws ``c s^-p`` (the
positive stable laws) and exponentials ``c exp(-lam s)``. In the cone case
``h(s, U)`` is either direction-free or ``beta(U) * h~(s)`` ("scaled"), and
may carry one rule per atom of a discrete base measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate, special

from .errors import DomainError, UnsupportedError, ValidationError
from .spectral import ConstantScale, DiscreteMeasure, atom_scale_values, inner

QUAD_TOL = 1e-10


# ---------------------------------------------------------------------------
# Thorin measures


@dataclass(frozen=True)
class PowerDensity:
    """Density ``coef * z^exponent`` on ``(lower, inf)``."""

    coef: float
    exponent: float
    lower: float = 0.0

    def __post_init__(self):
        if not (self.coef > 0 and math.isfinite(self.coef)):
            raise ValidationError("density coefficient must be positive")
        if not self.lower >= 0:
            raise ValidationError("lower limit must be >= 0")
        # int_1^inf z^(a-1) needs a < 0; int_0^1 |ln z| z^a needs a > -1
        if self.exponent >= 0:
            raise ValidationError("power density violates the integrability condition at infinity")
        if self.lower == 0 and self.exponent <= -1:
            raise ValidationError("power density violates the integrability condition at 0")

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        return np.where(z > self.lower, self.coef * np.power(np.maximum(z, 1e-300), self.exponent), 0.0)

    def cdf(self, x):
        """Mass of ``(lower, x]``; infinite near 0 when the exponent is <= -1."""
        x = np.asarray(x, dtype=float)
        a, lo = self.exponent, self.lower
        xx = np.maximum(x, lo)
        if a == -1:
            return self.coef * np.log(xx / lo)
        return self.coef * (xx ** (a + 1) - lo ** (a + 1)) / (a + 1)


@dataclass(frozen=True)
class TabulatedDensity:
    """Piecewise-linear density through ``(grid[i], values[i])``, zero outside."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.array(self.grid, dtype=float)
        v = np.array(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise ValidationError("tabulated density needs matching 1-d grid and values")
        if g[0] <= 0 or np.any(np.diff(g) <= 0) or not np.all(np.isfinite(g)):
            raise ValidationError("grid must be finite, increasing and inside (0, inf)")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValidationError("density values must be finite and >= 0")
        g.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def __call__(self, z):
        return np.interp(z, self.grid, self.values, left=0.0, right=0.0)

    def cdf(self, x):
        seg = 0.5 * (self.values[1:] + self.values[:-1]) * np.diff(self.grid)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        x = np.clip(np.asarray(x, dtype=float), self.grid[0], self.grid[-1])
        i = np.clip(np.searchsorted(self.grid, x, side="right") - 1, 0, self.grid.size - 2)
        dx = x - self.grid[i]
        slope = (self.values[i + 1] - self.values[i]) / (self.grid[i + 1] - self.grid[i])
        return cum[i] + self.values[i] * dx + 0.5 * slope * dx * dx


@dataclass(frozen=True, eq=False)
class ThorinMeasure:
    """Atoms at ``locations`` with ``masses`` plus an optional density."""

    locations: np.ndarray
    masses: np.ndarray
    density: PowerDensity | TabulatedDensity | None = None

    def __post_init__(self):
        loc = np.array(self.locations, dtype=float).reshape(-1)
        m = np.array(self.masses, dtype=float).reshape(-1)
        if loc.shape != m.shape:
            raise ValidationError("locations and masses differ in length")
        if np.any(~np.isfinite(loc)) or np.any(loc <= 0):
            raise ValidationError("Thorin atoms must sit in (0, inf)")
        if np.any(~np.isfinite(m)) or np.any(m <= 0):
            raise ValidationError("Thorin atom masses must be positive")
        order = np.argsort(loc, kind="stable")
        loc, m = loc[order], m[order]
        loc.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "masses", m)

    @classmethod
    def from_atoms(cls, locations, masses) -> "ThorinMeasure":
        """Atomic measure; repeated locations are merged."""
        loc = np.array(locations, dtype=float).reshape(-1)
        m = np.array(masses, dtype=float).reshape(-1)
        if loc.size:
            uniq, inv = np.unique(loc, return_inverse=True)
            m = np.bincount(inv, weights=m, minlength=uniq.size)
            loc = uniq
        return cls(loc, m)

    @classmethod
    def stable(cls, theta: float = 1.0, index: float = 0.5) -> "ThorinMeasure":
        """Thorin measure of the positive stable law with LT ``exp(-theta z^index)``.

        Density ``theta * index * sin(pi index) / pi * s^(index - 1)``.
        """
        if not 0 < index < 1:
            raise ValidationError("stable index must lie in (0, 1)")
        if not theta > 0:
            raise ValidationError("theta must be > 0")
        coef = theta * index * math.sin(math.pi * index) / math.pi
        return cls([], [], PowerDensity(coef, index - 1.0))

    @property
    def is_zero(self) -> bool:
        return self.locations.size == 0 and self.density is None

    @property
    def total_mass(self) -> float:
        m = float(self.masses.sum())
        if isinstance(self.density, PowerDensity):
            return math.inf
        if isinstance(self.density, TabulatedDensity):
            m += float(self.density.cdf(self.density.grid[-1]))
        return m

    def cdf(self, x):
        """``F(x) = u((0, x])``."""
        x = np.asarray(x, dtype=float)
        out = np.searchsorted(self.locations, x, side="right")
        cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        val = cum[out]
        if self.density is not None:
            val = val + self.density.cdf(x)
        return val

    def log_laplace(self, z) -> float:
        """``int log(1 + z/s) u(ds)``."""
        if not z >= 0:
            raise DomainError("z must be >= 0")
        z = float(z)
        if z == 0:
            return 0.0
        val = float(np.sum(self.masses * np.log1p(z / self.locations)))
        dens = self.density
        if isinstance(dens, PowerDensity):
            f = lambda s: math.log1p(z / s) * dens.coef * s**dens.exponent
            lo = dens.lower
            mid = max(lo, z)
            if mid > lo:
                v1, _ = integrate.quad(f, lo, mid, epsabs=QUAD_TOL, epsrel=1e-12, limit=200)
                val += v1
            v2, _ = integrate.quad(f, mid, np.inf, epsabs=QUAD_TOL, epsrel=1e-12, limit=200)
            val += v2
        elif isinstance(dens, TabulatedDensity):
            g = dens.grid
            f = lambda s: math.log1p(z / s) * float(dens(s))
            for a, b in zip(g[:-1], g[1:]):
                v, _ = integrate.quad(f, a, b, epsabs=QUAD_TOL, epsrel=1e-12)
                val += v
        return val


def ggc_laplace(thorin: ThorinMeasure, z) -> float:
    """Laplace transform ``exp(-int log(1 + z/s) u(ds))`` of the GGC."""
    if not isinstance(thorin, ThorinMeasure):
        raise ValidationError("expected a ThorinMeasure")
    return math.exp(-thorin.log_laplace(z))


# ---------------------------------------------------------------------------
# h rules


class Rule:
    """A nonnegative function ``h~(s)`` on (0, inf) with a closed-form image."""

    def __call__(self, s):
        raise NotImplementedError

    def integrable(self) -> bool:
        """Whether ``int log(1 + h~) ds`` is finite."""
        raise NotImplementedError

    def log_integral(self, c):
        """``J(c) = int_0^inf log(1 + c h~(s)) ds`` for c >= 0 (vectorised)."""
        raise NotImplementedError

    def mass_beyond(self, S: float) -> float:
        """``int_S^inf h~(s) ds``."""
        raise NotImplementedError

    def image_laplace(self, t: float) -> float:
        """``int_0^inf exp(-t / h~(s)) ds`` for t > 0, by quadrature."""
        raise NotImplementedError

    def thorin_measure(self) -> ThorinMeasure:
        """Image of Lebesgue measure under ``s -> 1/h~(s)``."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class PiecewiseConstantRule(Rule):
    """``h~(s) = values[i]`` on ``(edges[i], edges[i+1]]``, 0 beyond the last edge."""

    edges: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        e = np.array(self.edges, dtype=float).reshape(-1)
        v = np.array(self.values, dtype=float).reshape(-1)
        if e.size != v.size + 1 or e.size < 1:
            raise ValidationError("need len(edges) == len(values) + 1")
        if e[0] != 0 or np.any(np.diff(e) <= 0) or not np.all(np.isfinite(e)):
            raise ValidationError("edges must start at 0, increase and be finite")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValidationError("values must be finite and >= 0")
        e.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "values", v)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values > 0)

    @property
    def horizon(self) -> float:
        return float(self.edges[-1])

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        i = np.searchsorted(self.edges, s, side="left") - 1
        ok = (i >= 0) & (i < self.values.size)
        return np.where(ok, self.values[np.clip(i, 0, max(self.values.size - 1, 0))] if self.values.size else 0.0, 0.0)

    def integrable(self):
        return True

    def log_integral(self, c):
        c = np.asarray(c, dtype=float)
        lens = np.diff(self.edges)
        return np.log1p(c[..., None] * self.values) @ lens

    def mass_beyond(self, S):
        lens = np.clip(self.edges[1:], S, None) - np.clip(self.edges[:-1], S, None)
        return float(lens @ self.values)

    def image_laplace(self, t):
        lens = np.diff(self.edges)
        pos = self.values > 0
        return float(np.sum(lens[pos] * np.exp(-t / self.values[pos])))

    def thorin_measure(self):
        lens = np.diff(self.edges)
        pos = self.values > 0
        return ThorinMeasure.from_atoms(1.0 / self.values[pos], lens[pos])

    def to_json(self):
        return {"kind": "table", "edges": self.edges.tolist(), "values": self.values.tolist()}


@dataclass(frozen=True, eq=False)
class PowerLawRule(Rule):
    """``h~(s) = c s^-p``; integrable iff p > 1."""

    c: float
    p: float

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValidationError("c must be positive")
        if not (self.p > 0 and math.isfinite(self.p)):
            raise ValidationError("p must be positive")

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            return self.c * np.power(s, -self.p)

    def integrable(self):
        return self.p > 1

    @cached_property
    def _unit_integral(self):
        # I_p = int_0^inf log(1 + u^-p) du; J(c) = (c k)^(1/p) I_p by scaling
        p = self.p
        f = lambda u: math.log1p(u**-p) if u > 0 else math.inf
        a, _ = integrate.quad(lambda t: math.log1p(math.exp(-p * t)) * math.exp(t), -60.0, 0.0, epsabs=1e-13, epsrel=1e-13, limit=200)
        b, _ = integrate.quad(f, 1.0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=200)
        return a + b

    def log_integral(self, c):
        c = np.asarray(c, dtype=float)
        if not self.integrable():
            return np.where(c > 0, np.inf, 0.0)
        return np.power(c * self.c, 1.0 / self.p) * self._unit_integral

    def mass_beyond(self, S):
        if self.p <= 1:
            return math.inf
        if S <= 0:
            return math.inf
        return self.c * S ** (1 - self.p) / (self.p - 1)

    def image_laplace(self, t):
        # int exp(-t s^p / c) ds, substitute s = (c/t)^(1/p) u
        p = self.p
        scale = (self.c / t) ** (1.0 / p)
        v, _ = integrate.quad(lambda u: math.exp(-(u**p)), 0.0, np.inf, epsabs=1e-13, epsrel=1e-12)
        return scale * v

    def thorin_measure(self):
        # s -> z = s^p / c pushes Lebesgue to (c^(1/p)/p) z^(1/p - 1) dz
        p = self.p
        if p <= 1:
            raise UnsupportedError("h~ = c s^-p with p <= 1 is not a Thorin function")
        return ThorinMeasure([], [], PowerDensity(self.c ** (1.0 / p) / p, 1.0 / p - 1.0))

    def to_json(self):
        return {"kind": "power", "c": self.c, "p": self.p}


@dataclass(frozen=True, eq=False)
class ExponentialRule(Rule):
    """``h~(s) = c exp(-lam s)``."""

    c: float
    lam: float

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValidationError("c must be positive")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValidationError("lam must be positive")

    def __call__(self, s):
        return self.c * np.exp(-self.lam * np.asarray(s, dtype=float))

    def integrable(self):
        return True

    def log_integral(self, c):
        # int_0^inf log(1 + A e^{-lam s}) ds = -Li2(-A)/lam, Li2(x) = spence(1 - x)
        a = np.asarray(c, dtype=float) * self.c
        return _neg_li2_neg(a) / self.lam

    def mass_beyond(self, S):
        return self.c * math.exp(-self.lam * S) / self.lam

    def image_laplace(self, t):
        f = lambda s: math.exp(-t * math.exp(self.lam * s) / self.c)
        s_max = (math.log(self.c * 800.0 / t) / self.lam) if self.c * 800.0 > t else 0.0
        if s_max <= 0:
            return 0.0
        v, _ = integrate.quad(f, 0.0, s_max, epsabs=1e-14, epsrel=1e-12, limit=200)
        return v

    def thorin_measure(self):
        # z = e^{lam s}/c on (1/c, inf), ds = dz / (lam z)
        return ThorinMeasure([], [], PowerDensity(1.0 / self.lam, -1.0, 1.0 / self.c))

    def to_json(self):
        return {"kind": "exponential", "c": self.c, "lam": self.lam}


def _neg_li2_neg(a):
    """``-Li2(-a) = int_0^a log(1+x)/x dx`` for a >= 0."""
    # scipy's spence(z) is Li2(1 - z)
    return -special.spence(1.0 + np.asarray(a, dtype=float))


def stable_rule(theta: float = 1.0, index: float = 0.5) -> PowerLawRule:
    """Thorin function of the positive stable law with LT ``exp(-theta z^index)``.

    The power law ``c s^(-1/index)`` with ``c = (theta sin(pi index) / pi)^(1/index)``.
    For index 1/2 and ``theta = 2 sqrt(pi)`` it is ``4 / (pi s^2)``.
    """
    if not 0 < index < 1:
        raise ValidationError("stable index must lie in (0, 1)")
    if not theta > 0:
        raise ValidationError("theta must be > 0")
    # F(x) = theta sin(pi a)/pi x^a, so h(s) = 1/F^{-1}(s) = (theta sin(pi a)/pi)^(1/a) s^(-1/a)
    c = (theta * math.sin(math.pi * index) / math.pi) ** (1.0 / index)
    return PowerLawRule(c, 1.0 / index)


STABLE_HALF_THETA = 2.0 * math.sqrt(math.pi)  # theta giving h(s) = 4/(pi s^2)


@dataclass(frozen=True, eq=False)
class ThorinFunction:
    """``h(s, U)``: one rule, or one rule per atom of a discrete base.

    With ``scaled=True`` the function is ``h(s, U) = beta(U) h~(s)``;
    otherwise it does not depend on the base's beta.
    """

    rule: Rule | tuple
    scaled: bool = False

    def __post_init__(self):
        r = self.rule
        if isinstance(r, (list, tuple)):
            r = tuple(r)
            if not r or not all(isinstance(x, Rule) for x in r):
                raise ValidationError("per-atom rules must be a nonempty list of rules")
        elif not isinstance(r, Rule):
            raise ValidationError("rule must be a Rule")
        object.__setattr__(self, "rule", r)

    @property
    def per_atom(self) -> bool:
        return isinstance(self.rule, tuple)

    def rules(self, n_atoms: int | None = None):
        if self.per_atom:
            if n_atoms is not None and len(self.rule) != n_atoms:
                raise ValidationError(f"{len(self.rule)} rules for {n_atoms} atoms")
            return self.rule
        return (self.rule,) * (1 if n_atoms is None else n_atoms)

    def __call__(self, s, beta_u: float = 1.0, atom: int = 0):
        rule = self.rule[atom] if self.per_atom else self.rule
        val = rule(s)
        return beta_u * val if self.scaled else val

    def integrable(self) -> bool:
        return all(r.integrable() for r in self.rules())

    def to_json(self):
        if self.per_atom:
            return {"scaled": self.scaled, "rules": [r.to_json() for r in self.rule]}
        if not self.scaled:
            return self.rule.to_json()
        return {"scaled": True, "rule": self.rule.to_json()}

    @classmethod
    def from_json(cls, obj) -> "ThorinFunction":
        obj = dict(obj)
        if "rules" in obj:
            return cls(tuple(rule_from_json(r) for r in obj["rules"]), bool(obj.get("scaled", True)))
        if "rule" in obj:
            return cls(rule_from_json(obj["rule"]), bool(obj.get("scaled", False)))
        return cls(rule_from_json(obj), False)


def rule_from_json(obj) -> Rule:
    kind = obj.get("kind")
    if kind == "table":
        return PiecewiseConstantRule(obj["edges"], obj["values"])
    if kind == "power":
        return PowerLawRule(obj["c"], obj["p"])
    if kind == "exponential":
        return ExponentialRule(obj["c"], obj["lam"])
    if kind == "stable":
        return stable_rule(obj.get("theta", STABLE_HALF_THETA), obj.get("index", 0.5))
    if kind == "zero":
        return PiecewiseConstantRule([0.0], [])
    if kind == "thorin_atoms":
        pairs = np.asarray(obj["atoms"], dtype=float).reshape(-1, 2)
        return _thorin_rule(ThorinMeasure.from_atoms(pairs[:, 0], pairs[:, 1]))
    raise ValidationError(f"unknown h rule {kind!r}")


# ---------------------------------------------------------------------------
# Thorin measure <-> Thorin function

TABLE_CELLS = 4096


def thorin_to_h(thorin, scaled: bool | None = None) -> ThorinFunction:
    """Thorin function ``h(s) = 1 / F^{-1}(s)`` of a Thorin measure.

    Atomic measures give an exact step function; a power density on
    ``(0, inf)`` gives a power law, ``coef/z`` on ``(lower, inf)`` gives an
    exponential. Mixtures and tabulated densities are inverted on a grid of
    ``TABLE_CELLS`` cells (approximate). A list of Thorin measures, one per
    atom of a discrete base, gives the cone version ``h(s, U_j) = beta_j h~_j(s)``.
    """
    if isinstance(thorin, (list, tuple)):
        rules = tuple(_thorin_rule(t) for t in thorin)
        return ThorinFunction(rules, True if scaled is None else scaled)
    return ThorinFunction(_thorin_rule(thorin), bool(scaled))


def _thorin_rule(t: ThorinMeasure) -> Rule:
    if not isinstance(t, ThorinMeasure):
        raise ValidationError("expected a ThorinMeasure")
    dens = t.density
    if dens is None:
        if t.locations.size == 0:
            return PiecewiseConstantRule([0.0], [])
        edges = np.concatenate([[0.0], np.cumsum(t.masses)])
        return PiecewiseConstantRule(edges, 1.0 / t.locations)
    if isinstance(dens, PowerDensity) and t.locations.size == 0:
        a = dens.exponent
        if dens.lower == 0:
            # F(x) = k x^(a+1)/(a+1), F^{-1}(s) = ((a+1)s/k)^(1/(a+1))
            return PowerLawRule((dens.coef / (a + 1)) ** (1.0 / (a + 1)), 1.0 / (a + 1))
        if a == -1:
            # F(x) = k log(x/lower), F^{-1}(s) = lower e^{s/k}
            return ExponentialRule(1.0 / dens.lower, 1.0 / dens.coef)
    if isinstance(dens, PowerDensity):
        raise UnsupportedError("mixtures with an unbounded power density are not tabulated")
    return _tabulate_inverse(t)


def _tabulate_inverse(t: ThorinMeasure) -> PiecewiseConstantRule:
    dens = t.density
    grid = np.unique(np.concatenate([dens.grid, t.locations]))
    total = float(t.cdf(grid[-1]))
    s = np.linspace(0.0, total, TABLE_CELLS + 1)
    # F^{-1}(s) at the right end of each cell via bisection on the monotone cdf
    lo = np.full(TABLE_CELLS, grid[0] * 0.5)
    hi = np.full(TABLE_CELLS, grid[-1])
    target = s[1:]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        ge = t.cdf(mid) >= target
        hi = np.where(ge, mid, hi)
        lo = np.where(ge, lo, mid)
    return PiecewiseConstantRule(s, 1.0 / hi)


def h_to_thorin(h) -> ThorinMeasure | list:
    """Image of Lebesgue measure under ``s -> 1/h~(s)`` (per atom for lists)."""
    if isinstance(h, ThorinFunction):
        if h.per_atom:
            return [r.thorin_measure() for r in h.rule]
        return h.rule.thorin_measure()
    if isinstance(h, Rule):
        return h.thorin_measure()
    raise ValidationError("expected a ThorinFunction or Rule")


# ---------------------------------------------------------------------------
# Wiener-Gamma integrals Y^h = int int h(s, x/|x|) x N(ds, dx)


@dataclass(frozen=True)
class HCheck:
    ok: bool
    value: float


def _base_parts(h: ThorinFunction, base):
    """Atoms and rates of a discrete base, or None for a family base."""
    from .gamma_law import GammaLaw

    if not isinstance(base, GammaLaw):
        raise ValidationError("base must be a GammaLaw")
    if isinstance(base.alpha, DiscreteMeasure):
        b = atom_scale_values(base.beta, base.alpha)
        return base.alpha.atoms, base.alpha.weights, b, h.rules(base.alpha.size)
    if h.per_atom:
        raise ValidationError("per-atom rules need a discrete base")
    if not h.scaled and not isinstance(base.beta, ConstantScale):
        raise UnsupportedError("direction-free h over a non-constant beta family is not supported")
    return None


def h_integrability_check(h: ThorinFunction, base) -> HCheck:
    """Evaluate ``int int log(1 + h(s,U)/beta(U)) alpha(dU) ds`` and decide finiteness."""
    parts = _base_parts(h, base)
    if parts is None:
        rule = h.rule
        if not rule.integrable():
            return HCheck(False, math.inf)
        c = 1.0 if h.scaled else 1.0 / base.beta.beta0
        return HCheck(True, float(base.alpha.total_mass * rule.log_integral(c)))
    atoms, w, b, rules = parts
    total = 0.0
    for wj, bj, rule in zip(w, b, rules):
        if not rule.integrable():
            return HCheck(False, math.inf)
        if bj <= 0 and not h.scaled:
            return HCheck(False, math.inf)
        total += wj * float(rule.log_integral(1.0 if h.scaled else 1.0 / bj))
    return HCheck(bool(np.isfinite(total)), total)


def _require_integrable(h, base):
    chk = h_integrability_check(h, base)
    if not chk.ok:
        raise DomainError("h is not integrable against the base law")
    return chk


def yh_log_laplace(h: ThorinFunction, base, theta) -> float:
    """``log E exp(-<Y^h, Theta>)``.

    The radial integral is done in closed form,
    ``int (1 - e^{-c r}) e^{-b r} / r dr = log(1 + c/b)``, leaving
    ``int int log(1 + h(s,U) <Theta,U> / beta(U)) ds alpha(dU)``.
    """
    from .gamma_law import _check_dual

    _require_integrable(h, base)
    theta = _check_dual(base, theta)
    parts = _base_parts(h, base)
    if parts is None:
        dirs = base.alpha.quadrature()
        t = inner(dirs, theta)
        c = t if h.scaled else t / base.beta.beta0
        return -float(base.alpha.total_mass * np.mean(h.rule.log_integral(c)))
    atoms, w, b, rules = parts
    total = 0.0
    for atom, wj, bj, rule in zip(atoms, w, b, rules):
        t = float(inner(atom, theta))
        total += wj * float(rule.log_integral(t if h.scaled else t / bj))
    return -total


def yh_laplace(h: ThorinFunction, base, theta) -> float:
    """Laplace transform of the Wiener-Gamma integral ``Y^h``."""
    return math.exp(yh_log_laplace(h, base, theta))


def _beta_at(base, U):
    a, b = base.alpha, base.beta
    U = np.asarray(U, dtype=float)
    if isinstance(a, DiscreteMeasure):
        hit = [j for j in range(a.size) if np.allclose(a.atoms[j], U, atol=1e-12)]
        if not hit:
            raise ValidationError("U is not an atom of the base measure")
        return float(atom_scale_values(b, a)[hit[0]]), hit[0]
    return float(np.asarray(b.at(U[None]))[0]), 0


def yh_levy_density(h: ThorinFunction, base, U, r) -> float:
    """Radial Levy density ``k_U(r) / r`` of ``Y^h`` in direction U.

    ``k_U(r) = int exp(-r beta(U) / h(s, U)) ds`` is the Laplace transform
    of the image of Lebesgue measure under ``s -> beta(U) / h(s, U)``.
    """
    if not r > 0:
        raise DomainError("r must be > 0")
    _require_integrable(h, base)
    bu, j = _beta_at(base, U)
    rule = h.rules()[j] if h.per_atom else h.rule
    t = r if h.scaled else r * bu
    return rule.image_laplace(t) / r


def k_function(h: ThorinFunction, base, U, r) -> float:
    """``k_U(r)``; completely monotone in r."""
    return yh_levy_density(h, base, U, r) * r
