"""Command-line interface.

Subcommands: check, sample, path, transform, agamma-moments, mp, verify.
Everything runs offline against the library; randomness comes only from
``--seed`` and ``--stream``.

Exit codes: 0 ok, 2 usage or schema error, 3 domain error (the law is
invalid or a computation is undefined), 4 verification failure.

CSV layout: vectors use columns ``x1..xd``; symmetric matrices use the upper
triangle in row-major order, ``m11, m12, .., m1d, m22, ..`` with d(d+1)/2
columns; Gamma-Normal draws use the full d x q matrix in row-major order,
``y11, y12, .., y1q, y21, ..``. Numbers are written with 17 significant
digits so files round-trip exactly.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import gamma_law as gl
from . import matrix_gamma as mg
from . import sampler as sm
from . import wiener_gamma as wg
from .errors import ConeGammaError, DomainError, UnsupportedError
from .lawspec import SchemaError, load_spec
from .specfun import mp_moment
from .spectral import CONE

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VERIFY = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    return x


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# CSV layout


def columns(shape, kind: str) -> list[str]:
    """Column names for draws of the given ambient shape."""
    if len(shape) == 1:
        return [f"x{i + 1}" for i in range(shape[0])]
    d, q = shape
    if kind == "symmetric":
        return [f"m{i + 1}{j + 1}" if d < 10 else f"m{i + 1}_{j + 1}" for i in range(d) for j in range(i, d)]
    return [f"y{i + 1}{j + 1}" if max(d, q) < 10 else f"y{i + 1}_{j + 1}" for i in range(d) for j in range(q)]


def flatten(x, kind: str) -> np.ndarray:
    """Rows of the CSV layout from an array of draws ``(n,) + shape``."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if x.ndim == 2:
        return x
    if kind == "symmetric":
        iu = np.triu_indices(x.shape[1])
        return x[:, iu[0], iu[1]]
    return x.reshape(n, -1)


def unflatten(rows, d: int, kind: str, q: int | None = None) -> np.ndarray:
    """Inverse of :func:`flatten`."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if kind == "vector":
        return rows
    if kind == "symmetric":
        iu = np.triu_indices(d)
        out = np.zeros((rows.shape[0], d, d))
        out[:, iu[0], iu[1]] = rows
        out[:, iu[1], iu[0]] = rows
        return out
    return rows.reshape(rows.shape[0], d, q)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def sidecar_path(path):
    """``out.csv`` gets ``out.csv.json``, which never collides with a spec file."""
    return path + ".json"


def _write_sidecar(path, meta):
    text = _dump(meta) + "\n"
    if path is None:
        sys.stderr.write(text)
    else:
        with open(sidecar_path(path), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _layout(spec):
    law = spec.law
    if spec.q is not None:
        return "matrix", (law.d, spec.q), "full d x q matrix, row-major"
    if law.mode == CONE:
        return "symmetric", law.ambient_shape, "upper triangle, row-major"
    return "vector", law.ambient_shape, "vector components"


# ---------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    try:
        spec = load_spec(args.spec)
    except DomainError as exc:
        print(_dump({"exists": False, "reason": str(exc)}))
        return EXIT_DOMAIN
    law = spec.law
    ex = gl.existence_check(law.alpha, law.beta)
    fl = gl.fourier_laplace_exists(law)
    out = {
        "kind": spec.kind,
        "exists": ex.finite,
        "log_integral": ex.value,
        "fourier_laplace": {"exists": fl.exists, "radius": fl.radius},
        "moments": {},
    }
    for k in (1, 2, 4):
        v = gl.moment_order_check(law, k)
        out["moments"][str(k)] = {"finite": v.finite, "integral": v.value}
    if out["moments"]["1"]["finite"]:
        try:
            out["mean"] = gl.mean(law)
        except UnsupportedError as exc:
            out["mean"] = f"unavailable: {exc}"
    if out["moments"]["2"]["finite"]:
        try:
            out["covariance"] = gl.covariance(law)
        except UnsupportedError as exc:
            out["covariance"] = f"unavailable: {exc}"
    if spec.h is not None:
        hc = wg.h_integrability_check(spec.h, law)
        out["h_integrable"] = {"ok": hc.ok, "value": hc.value}
        if not hc.ok:
            print(_dump(out))
            return EXIT_DOMAIN
    print(_dump(out))
    return EXIT_OK


def _draws(spec, n, rs, eps):
    """Draws ``i`` from replicate stream ``i``, so a longer run extends a shorter one."""
    law = spec.law
    if spec.h is not None:
        one = lambda g: sm.simulate_wiener_gamma(spec.h, law, eps=eps, rng=g)
        variant = "wiener-gamma-series"
        comp = None
    elif spec.q is not None:
        one = lambda g: sm.sample_gamma_normal(law, spec.q, g, eps=eps)
        variant = sm.sampler_variant(law)
        comp = None if variant == sm.DISCRETE else sm.compensation(law, eps)
    else:
        variant = sm.sampler_variant(law)
        one = lambda g: sm.sample_one(law, g, eps, variant)
        comp = None if variant == sm.DISCRETE else sm.compensation(law, eps)
    shape = (law.d, spec.q) if spec.q is not None else law.ambient_shape
    x = np.stack([one(rs.generator(i)) for i in range(n)]) if n else np.zeros((0,) + shape)
    return x, variant, comp


def cmd_sample(args) -> int:
    spec = load_spec(args.spec)
    if args.n < 0:
        raise _UsageError("-n must be >= 0")
    rs = sm.RngSpec(args.seed, args.stream)
    x, variant, comp = _draws(spec, args.n, rs, args.eps)
    kind, shape, desc = _layout(spec)
    header = columns(shape, kind)
    _write_csv(args.out, header, flatten(x, kind))
    meta = {
        "command": "sample",
        "spec": json.loads(spec.canonical()),
        "seed": args.seed,
        "stream": args.stream,
        "n": args.n,
        "eps": args.eps,
        "sampler_variant": variant,
        "compensation": None if comp is None else np.asarray(comp),
        "layout": desc,
        "columns": header,
        "rng": "Philox, one child stream per draw",
    }
    _write_sidecar(args.out, meta)
    return EXIT_OK


def cmd_path(args) -> int:
    spec = load_spec(args.spec)
    if spec.h is not None or spec.q is not None:
        raise UnsupportedError("path simulation takes a plain law spec (no h or q)")
    law = spec.law
    variant = sm.sampler_variant(law)
    if variant == sm.DISCRETE:
        # the path sampler is series-based for every law
        variant = sm.HOMOGENEOUS if isinstance(law.beta, gl.ConstantScale) else sm.THINNED
    rng = sm.RngSpec(args.seed, args.stream).generator()
    p = sm.simulate_path(law, args.T, args.eps, args.grid, rng)
    kind, shape, desc = _layout(spec)
    header = ["t"] + columns(shape, kind)
    rows = np.column_stack([p.times, flatten(p.values, kind)])
    _write_csv(args.out, header, rows)
    meta = {
        "command": "path",
        "spec": json.loads(spec.canonical()),
        "seed": args.seed,
        "stream": args.stream,
        "T": args.T,
        "grid": args.grid,
        "eps": args.eps,
        "sampler_variant": variant,
        "jumps": p.jumps.count,
        "compensation": np.asarray(p.jumps.compensation),
        "layout": "t, then " + desc,
        "columns": header,
    }
    _write_sidecar(args.out, meta)
    return EXIT_OK


def _read_points(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        rows = [r for r in text.splitlines() if r.strip() and not r.lstrip().startswith("#")]
        doc = []
        for r in rows:
            try:
                doc.append([float(v) for v in r.split(",")])
            except ValueError:
                continue  # header
    if isinstance(doc, dict):
        doc = doc.get("points", [])
    return [np.asarray(p, dtype=float) for p in doc]


def _shape_point(p, spec):
    law = spec.law
    if spec.q is not None:
        return p.reshape(law.d, spec.q)
    if law.mode == CONE and p.ndim == 1:
        d = law.d
        if p.size == d * (d + 1) // 2:
            return unflatten(p, d, "symmetric")[0]
        return p.reshape(d, d)
    return p.reshape(law.ambient_shape)


def cmd_transform(args) -> int:
    spec = load_spec(args.spec)
    law = spec.law
    results = []
    for p in _read_points(args.points):
        z = _shape_point(p, spec)
        row = {"point": z}
        if spec.q is not None:
            row["cf"] = [mg.gamma_normal_cf(mg.GammaNormalParams(law, spec.q), z), 0.0]
        elif spec.h is not None:
            try:
                row["laplace"] = wg.yh_laplace(spec.h, law, z)
            except DomainError as exc:
                row["laplace"] = None
                row["laplace_note"] = str(exc)
        else:
            cf = gl.char_fn(law, z)
            row["cf"] = [cf.real, cf.imag]
            try:
                row["laplace"] = gl.laplace_transform(law, z)
            except DomainError as exc:
                row["laplace"] = None
                row["laplace_note"] = str(exc)
        results.append(row)
    print(_dump({"spec": json.loads(spec.canonical()), "kind": spec.kind, "values": results}))
    return EXIT_OK


def _parse_omega(s):
    return s if s in mg.OMEGA_PRESETS else float(s)


def cmd_agamma_moments(args) -> int:
    sigma = None if args.sigma is None else json.loads(args.sigma)
    params = mg.AGammaParams(args.d, args.eta, sigma, _parse_omega(args.omega))
    out = {
        "d": params.d,
        "eta": params.eta,
        "omega": params.omega,
        "sigma": params.sigma,
        "mean": mg.agamma_mean(params),
        "cov_vec": mg.agamma_cov(params),
        "vec_convention": "column-major",
    }
    if args.p is not None:
        rng = sm.RngSpec(args.seed).generator()
        est = mg.levy_moment_integral(params, args.p, "power", rng)
        out["levy_power_moment"] = {"p": args.p, "value": est.value, "stderr": est.stderr}
        if args.p > (params.d - 1) / 2:
            out["levy_det_moment"] = {"p": args.p, "value": mg.levy_moment_integral(params, args.p, "det").value}
    print(_dump(out))
    return EXIT_OK


def cmd_mp(args) -> int:
    if args.table:
        ds = [int(v) for v in args.table.split(",") if v.strip()]
        rng = sm.RngSpec(args.seed).generator()
        header = ["d", "eta", "exact", "asymptotic", "ratio", "exact_stderr"]
        rows = []
        for d in ds:
            eta = args.lam * d
            r = mg.mp_trace_asymptotics(d, eta, args.omega if args.omega in mg.OMEGA_PRESETS else float(args.omega),
                                        args.p, args.epsilon, rng)
            rows.append([d, eta, r["exact"], r["asymptotic"], r["ratio"], r["exact_stderr"]])
        _write_csv(None, header, rows)
        return EXIT_OK
    v = mp_moment(args.p, args.lam)
    print(v if isinstance(v, int) else _fmt(v))
    return EXIT_OK


def cmd_verify(args) -> int:
    from . import verify

    numbers = None
    if args.criteria:
        numbers = [int(v) for v in args.criteria.split(",") if v.strip()]
        bad = [n for n in numbers if n not in {c[0] for c in verify.CRITERIA}]
        if bad:
            raise _UsageError(f"unknown criteria {bad}")
    elif args.suite not in verify.SUITES:
        raise _UsageError(f"unknown suite {args.suite!r}; choose from {sorted(verify.SUITES)}")
    echo = (lambda s: print(s, file=sys.stderr, flush=True)) if not args.silent else None
    results = verify.run_suite(args.suite, numbers, echo)
    report = {
        "suite": args.suite if numbers is None else "selection",
        "passed": all(r.passed for r in results),
        "criteria": [r.to_json() for r in results],
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser


def _positive_float(s):
    v = float(s)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"{s} must be a positive number")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="conegamma", description="Multivariate and matrix Gamma laws on cones.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="existence, transform radius and moment verdicts")
    c.add_argument("spec")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("sample", help="independent draws as CSV with a JSON sidecar")
    s.add_argument("spec")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--stream", type=int, default=0)
    s.add_argument("--eps", type=_positive_float, default=sm.DEFAULT_EPS)
    s.add_argument("--out", help="CSV path; metadata goes to the same path plus .json")
    s.set_defaults(func=cmd_sample)

    pa = sub.add_parser("path", help="Levy subordinator path on a uniform grid")
    pa.add_argument("spec")
    pa.add_argument("-T", type=_positive_float, required=True)
    pa.add_argument("--grid", type=int, default=100)
    pa.add_argument("--seed", type=int, required=True)
    pa.add_argument("--stream", type=int, default=0)
    pa.add_argument("--eps", type=_positive_float, default=sm.DEFAULT_EPS)
    pa.add_argument("--out")
    pa.set_defaults(func=cmd_path)

    t = sub.add_parser("transform", help="characteristic function and Laplace transform at given points")
    t.add_argument("spec")
    t.add_argument("--points", required=True, help="JSON list of points, or CSV rows in the sample layout")
    t.set_defaults(func=cmd_transform)

    a = sub.add_parser("agamma-moments", help="AGamma mean, covariance and Levy moment integrals")
    a.add_argument("-d", type=int, required=True)
    a.add_argument("-eta", type=float, required=True)
    a.add_argument("-omega", default="d_eta", help="number or one of d_eta, d, one")
    a.add_argument("-p", type=int)
    a.add_argument("--sigma", help="JSON matrix; identity by default")
    a.add_argument("--seed", type=int, default=0, help="seed for Monte-Carlo Wishart moments (p >= 3)")
    a.set_defaults(func=cmd_agamma_moments)

    m = sub.add_parser("mp", help="Marchenko-Pastur moments and trace asymptotics")
    m.add_argument("-p", type=int, required=True)
    m.add_argument("-lambda", dest="lam", type=_positive_float, required=True)
    m.add_argument("--table", help="comma-separated dimensions d; uses eta = lambda * d")
    m.add_argument("-omega", default="d_eta")
    m.add_argument("--epsilon", type=float, default=0.0)
    m.add_argument("--seed", type=int, default=0)
    m.set_defaults(func=cmd_mp)

    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("suite", nargs="?", default="quick")
    v.add_argument("--criteria", help="comma-separated criterion numbers")
    v.add_argument("--out")
    v.add_argument("--silent", action="store_true", help="no progress lines on stderr")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConeGammaError as exc:
        # invalid parameters, nonexistent laws, undefined computations
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
