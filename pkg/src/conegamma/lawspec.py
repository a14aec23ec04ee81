"""JSON law specifications.

A spec document is validated against ``lawspec.schema.json`` and turned into
a :class:`GammaLaw` (plus an optional Thorin function ``h`` or Gaussian
column count ``q``). :func:`canonical_json` writes the normalised document
with sorted keys; parsing it again gives the same law.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import jsonschema
import numpy as np

from .errors import ValidationError
from .gamma_law import GammaLaw
from .matrix_gamma import AGammaParams, BGammaParams, agamma_law, bgamma_law
from .spectral import (
    CONE,
    VECTOR,
    ConstantScale,
    DiscreteMeasure,
    Norm,
    PerAtomScale,
    RankQProjectorMeasure,
    SequenceMeasure,
    SequenceScale,
    SigmaTraceScale,
    WishartInducedMeasure,
)
from .wiener_gamma import ThorinFunction


class SchemaError(ValidationError):
    """The document does not match the law-spec schema."""


_SCHEMA = None


def schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        text = resources.files("conegamma").joinpath("lawspec.schema.json").read_text()
        _SCHEMA = json.loads(text)
    return _SCHEMA


@dataclass(frozen=True, eq=False)
class LawSpec:
    """A parsed spec: the law, optional h and q, and the canonical document."""

    law: GammaLaw
    doc: dict
    h: ThorinFunction | None = None
    q: int | None = None

    @property
    def kind(self) -> str:
        if self.h is not None:
            return "wiener_gamma"
        if self.q is not None:
            return "gamma_normal"
        return "law"

    def canonical(self) -> str:
        return canonical_json(self.doc)


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _floats(x):
    return np.asarray(x, dtype=float).tolist()


def validate_document(doc) -> None:
    try:
        jsonschema.validate(doc, schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise SchemaError(f"spec does not match the schema at '{path}': {exc.message}") from None


def parse_spec(doc) -> LawSpec:
    """Validate a spec document and build the law."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    validate_document(doc)
    mode, d = doc["mode"], int(doc["d"])
    a = doc["alpha"]
    out = {"mode": mode, "d": d, "alpha": None}
    family = a.get("family")
    beta_doc = doc.get("beta")
    norm = Norm(doc.get("norm", "l2")) if mode == VECTOR else Norm("trace")
    if mode == VECTOR and "norm" in doc:
        out["norm"] = doc["norm"]

    if family in ("agamma", "bgamma"):
        if mode != CONE:
            raise SchemaError(f"{family} is a cone-mode family")
        if beta_doc is not None:
            raise SchemaError(f"{family} fixes beta; remove the beta entry")
        if family == "agamma":
            p = AGammaParams(d, a["eta"], a.get("sigma"), a.get("omega", "d_eta"))
            law = agamma_law(p)
            out["alpha"] = {"family": "agamma", "eta": float(p.eta), "omega": float(p.omega), "sigma": _floats(p.sigma)}
        else:
            p = BGammaParams(d, a["q"], a.get("beta0", 1.0))
            law = bgamma_law(p)
            out["alpha"] = {"family": "bgamma", "q": int(p.q), "beta0": float(p.beta0)}
        alpha, beta = law.alpha, law.beta
    else:
        if beta_doc is None:
            raise SchemaError("beta is required for this alpha")
        if family is None:
            atoms = np.asarray(a["atoms"], dtype=float)
            if len(a["atoms"]) != len(a["weights"]):
                raise SchemaError("atoms and weights differ in length")
            shape = (d, d) if mode == CONE else (d,)
            atoms = atoms.reshape((len(a["weights"]),) + shape) if atoms.size or a["weights"] else np.zeros((0,) + shape)
            alpha = DiscreteMeasure(atoms, a["weights"], mode, norm)
            # keep the raw atoms so a re-parse repeats the same normalisation
            out["alpha"] = {"atoms": _floats(atoms), "weights": _floats(alpha.weights)}
        elif family == "wishart_induced":
            alpha = WishartInducedMeasure(d, a["eta"], a["omega"], a.get("sigma"))
            out["alpha"] = {"family": family, "eta": float(alpha.eta), "omega": float(alpha.omega), "sigma": _floats(alpha.sigma)}
        elif family == "rank_q":
            alpha = RankQProjectorMeasure(d, a["q"], a.get("mass"))
            out["alpha"] = {"family": family, "q": int(alpha.q), "mass": float(alpha.mass)}
        else:
            if mode != VECTOR or d != 2:
                raise SchemaError("sequence fixtures live in vector mode with d = 2")
            alpha = SequenceMeasure(a["rule"], a.get("m"), a.get("scale", 1.0))
            out["alpha"] = {"family": family, "rule": alpha.rule, "scale": float(alpha.scale)}
            if alpha.m is not None:
                out["alpha"]["m"] = float(alpha.m)
        if family in ("wishart_induced", "rank_q") and mode != CONE:
            raise SchemaError(f"{family} is a cone-mode family")
        kind = beta_doc["kind"]
        if kind == "constant":
            beta = ConstantScale(beta_doc["beta0"])
            out["beta"] = {"kind": kind, "beta0": beta.beta0}
        elif kind == "per_atom":
            beta = PerAtomScale(beta_doc["values"])
            out["beta"] = {"kind": kind, "values": _floats(beta.values)}
        elif kind == "sigma_trace":
            beta = SigmaTraceScale(beta_doc["sigma"])
            out["beta"] = {"kind": kind, "sigma": _floats(beta.sigma)}
        else:
            beta = SequenceScale(beta_doc.get("factor", 1.0))
            out["beta"] = {"kind": kind, "factor": float(beta.factor)}
    if alpha.d != d and not (isinstance(alpha, DiscreteMeasure) and alpha.size == 0):
        raise SchemaError(f"alpha has dimension {alpha.d}, spec says d = {d}")
    drift = doc.get("drift")
    law = GammaLaw(alpha, beta, drift)
    if drift is not None:
        out["drift"] = _floats(law.drift)
    h = q = None
    if "h" in doc:
        h = ThorinFunction.from_json(doc["h"])
        out["h"] = h.to_json()
    if "q" in doc:
        if mode != CONE:
            raise SchemaError("a Gamma-Normal spec needs a cone-mode mixing law")
        q = int(doc["q"])
        out["q"] = q
    if h is not None and q is not None:
        raise SchemaError("h and q cannot be combined")
    return LawSpec(law, out, h, q)


def load_spec(path) -> LawSpec:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_spec(text)
