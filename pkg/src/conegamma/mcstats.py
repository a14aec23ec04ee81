"""Empirical moments, Kolmogorov-Smirnov tests and transform comparisons.

All checks report z-scores ``(empirical - target) / SE`` and pass when the
largest absolute z-score is at most a declared multiple (4 by default).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import special

from .errors import DomainError, ValidationError

DEFAULT_THRESHOLD = 4.0


@dataclass
class MomentReport:
    """Empirical values against targets with CLT standard errors."""

    n: int
    observed: np.ndarray
    target: np.ndarray
    stderr: np.ndarray
    z: np.ndarray
    threshold: float
    label: str = ""

    @property
    def max_abs_z(self) -> float:
        return float(np.max(np.abs(self.z))) if np.size(self.z) else 0.0

    @property
    def passed(self) -> bool:
        return self.max_abs_z <= self.threshold

    def to_json(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            out[k] = np.asarray(v).tolist() if isinstance(v, np.ndarray) else v
        out["max_abs_z"] = self.max_abs_z
        out["passed"] = self.passed
        return out


def _zscores(diff, se):
    diff = np.asarray(diff, dtype=float)
    se = np.asarray(se, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, diff / np.where(se > 0, se, 1.0), np.where(np.abs(diff) <= 1e-12, 0.0, np.inf))
    return z


def report(observed, target, stderr, n, threshold=DEFAULT_THRESHOLD, label="") -> MomentReport:
    observed = np.asarray(observed, dtype=float)
    target = np.asarray(target, dtype=float)
    stderr = np.asarray(stderr, dtype=float)
    return MomentReport(int(n), observed, target, stderr, _zscores(observed - target, stderr), float(threshold), label)


def _flat(samples):
    x = np.asarray(samples, dtype=float)
    if x.ndim == 0:
        raise ValidationError("need an array of samples")
    if np.any(~np.isfinite(x)):
        raise ValidationError("samples contain non-finite values")
    return x.reshape(x.shape[0], -1)


def mean_report(samples, target, threshold=DEFAULT_THRESHOLD) -> MomentReport:
    """Componentwise sample mean against ``target``."""
    x = _flat(samples)
    n = x.shape[0]
    se = x.std(axis=0, ddof=1) / math.sqrt(n)
    return report(x.mean(axis=0), np.asarray(target, dtype=float).reshape(-1), se, n, threshold, "mean")


def covariance_report(samples, target, threshold=DEFAULT_THRESHOLD) -> MomentReport:
    """Sample covariance entries against ``target``.

    The standard error of each entry ``C_ij`` is the SE of the mean of
    ``(x_i - m_i)(x_j - m_j)``.
    """
    x = _flat(samples)
    n = x.shape[0]
    c = x - x.mean(axis=0)
    prod = c[:, :, None] * c[:, None, :]
    cov = prod.sum(axis=0) / (n - 1)
    se = prod.std(axis=0, ddof=1) / math.sqrt(n)
    return report(cov.reshape(-1), np.asarray(target, dtype=float).reshape(-1), se.reshape(-1), n, threshold, "covariance")


def moment_report(samples, target_mean, target_cov=None, threshold=DEFAULT_THRESHOLD) -> MomentReport:
    """Mean (and optionally covariance) z-scores in one report."""
    m = mean_report(samples, target_mean, threshold)
    if target_cov is None:
        return m
    c = covariance_report(samples, target_cov, threshold)
    return MomentReport(
        m.n,
        np.concatenate([m.observed, c.observed]),
        np.concatenate([m.target, c.target]),
        np.concatenate([m.stderr, c.stderr]),
        np.concatenate([m.z, c.z]),
        float(threshold),
        "mean+covariance",
    )


def raw_moment_report(samples, targets, threshold=DEFAULT_THRESHOLD) -> MomentReport:
    """Raw moments ``E x^k`` for k = 1..len(targets) of a scalar sample."""
    x = np.asarray(samples, dtype=float).reshape(-1)
    n = x.size
    ks = np.arange(1, len(targets) + 1)
    pw = x[:, None] ** ks
    return report(pw.mean(axis=0), targets, pw.std(axis=0, ddof=1) / math.sqrt(n), n, threshold, "raw moments")


def gamma_cdf(x, shape: float, rate: float):
    """CDF of Gamma(shape, rate): the regularised lower incomplete gamma P(shape, rate x)."""
    if not (shape > 0 and rate > 0) or not (math.isfinite(shape) and math.isfinite(rate)):
        raise DomainError("shape and rate must be positive")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be >= 0")
    out = special.gammainc(shape, rate * x)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class KSResult:
    statistic: float
    p_value: float


def ks_test(samples, cdf) -> KSResult:
    """One-sample Kolmogorov-Smirnov test with the asymptotic p-value.

    The p-value is the Kolmogorov survival function at
    ``(sqrt(n) + 0.12 + 0.11/sqrt(n)) D``.
    """
    x = np.asarray(samples, dtype=float).reshape(-1)
    if np.any(np.isnan(x)):
        raise ValidationError("samples contain NaN")
    n = x.size
    if n < 10:
        raise ValidationError("KS test needs at least 10 samples")
    x = np.sort(x)
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
    d = min(max(d, 0.0), 1.0)
    sn = math.sqrt(n)
    p = float(special.kolmogorov((sn + 0.12 + 0.11 / sn) * d))
    return KSResult(d, min(max(p, 0.0), 1.0))


@dataclass
class TransformReport(MomentReport):
    grid: np.ndarray | None = None


def compare_transform(samples, analytic, grid, kind: str = "laplace", threshold=DEFAULT_THRESHOLD) -> TransformReport:
    """Empirical Laplace or characteristic function against ``analytic`` on a grid.

    ``grid`` holds arguments z of the same shape as one sample (or scalars
    for scalar samples). ``kind="laplace"`` compares ``mean exp(-<x, z>)``;
    ``kind="cf"`` compares ``mean exp(i <x, z>)`` on real and imaginary parts.
    """
    pts = list(grid)
    if not pts:
        raise ValidationError("grid must be nonempty")
    x = _flat(samples)
    n = x.shape[0]
    obs, tgt, se = [], [], []
    for z in pts:
        zf = np.asarray(z, dtype=float).reshape(-1)
        t = x @ zf if zf.size == x.shape[1] else x[:, 0] * float(zf[0])
        target = analytic(z)
        if kind == "laplace":
            v = np.exp(-t)
            obs.append(v.mean())
            se.append(v.std(ddof=1) / math.sqrt(n))
            tgt.append(float(np.real(target)))
        elif kind == "cf":
            c, s = np.cos(t), np.sin(t)
            obs += [c.mean(), s.mean()]
            se += [c.std(ddof=1) / math.sqrt(n), s.std(ddof=1) / math.sqrt(n)]
            tgt += [float(np.real(target)), float(np.imag(target))]
        else:
            raise ValidationError(f"unknown transform kind {kind!r}")
    r = report(obs, tgt, se, n, threshold, kind)
    return TransformReport(r.n, r.observed, r.target, r.stderr, r.z, r.threshold, r.label, np.asarray(pts, dtype=float))
