import json

import numpy as np
import pytest

from conegamma import gamma_law as gl
from conegamma.lawspec import SchemaError, canonical_json, load_spec, parse_spec
from conegamma.wiener_gamma import ThorinFunction

DOCS = [
    {"mode": "cone", "d": 2, "alpha": {"family": "agamma", "eta": 3, "omega": 2}},
    {"mode": "cone", "d": 2, "alpha": {"family": "agamma", "eta": 2.5, "sigma": [[2, 0.5], [0.5, 1]]}},
    {"mode": "cone", "d": 3, "alpha": {"family": "bgamma", "q": 2}},
    {"mode": "cone", "d": 2, "alpha": {"family": "rank_q", "q": 1, "mass": 2}, "beta": {"kind": "constant", "beta0": 1}},
    {"mode": "cone", "d": 2, "alpha": {"family": "wishart_induced", "eta": 2, "omega": 1},
     "beta": {"kind": "sigma_trace", "sigma": [[1, 0], [0, 2]]}},
    {"mode": "vector", "d": 2, "norm": "l1", "alpha": {"atoms": [[1, 1], [0, 3]], "weights": [1, 2]},
     "beta": {"kind": "per_atom", "values": [1, 0.5]}, "drift": [0.1, 0]},
    {"mode": "vector", "d": 2, "alpha": {"family": "sequence", "rule": "power_weights", "m": 2}, "beta": {"kind": "sequence"}},
    {"mode": "vector", "d": 1, "alpha": {"atoms": [[1]], "weights": [1]}, "beta": {"kind": "constant", "beta0": 1},
     "h": {"kind": "stable", "theta": 3.5449077018110318, "index": 0.5}},
    {"mode": "cone", "d": 2, "alpha": {"family": "agamma", "eta": 3}, "q": 3},
]


@pytest.mark.parametrize("doc", DOCS)
def test_canonical_round_trip(doc):
    a = parse_spec(doc)
    b = parse_spec(a.canonical())
    assert a.canonical() == b.canonical()
    z = np.eye(a.law.d) * 0.3 if a.law.mode == "cone" else np.full(a.law.d, 0.3)
    if a.law.alpha.__class__.__name__ != "SequenceMeasure":
        assert gl.laplace_transform(a.law, z) == gl.laplace_transform(b.law, z)


def test_kinds():
    assert parse_spec(DOCS[0]).kind == "law"
    assert parse_spec(DOCS[-2]).kind == "wiener_gamma"
    assert isinstance(parse_spec(DOCS[-2]).h, ThorinFunction)
    assert parse_spec(DOCS[-1]).kind == "gamma_normal" and parse_spec(DOCS[-1]).q == 3


def test_sorted_keys():
    text = parse_spec(DOCS[1]).canonical()
    assert text == canonical_json(json.loads(text))
    assert list(json.loads(text)) == sorted(json.loads(text))


def test_load(tmp_path):
    p = tmp_path / "law.json"
    p.write_text(json.dumps(DOCS[0]))
    assert load_spec(p).canonical() == parse_spec(DOCS[0]).canonical()


@pytest.mark.parametrize(
    "doc",
    [
        "{not json",
        {"mode": "cone", "d": 2},
        {"mode": "ring", "d": 2, "alpha": {"family": "agamma", "eta": 3}},
        {"mode": "cone", "d": 0, "alpha": {"family": "agamma", "eta": 3}},
        {"mode": "cone", "d": 2, "alpha": {"family": "agamma", "eta": 3}, "extra": 1},
        {"mode": "cone", "d": 2, "alpha": {"family": "agamma", "eta": 3}, "beta": {"kind": "constant", "beta0": 1}},
        {"mode": "vector", "d": 2, "alpha": {"family": "agamma", "eta": 3}},
        {"mode": "vector", "d": 2, "alpha": {"atoms": [[1, 0]], "weights": [1]}},
        {"mode": "vector", "d": 2, "alpha": {"atoms": [[1, 0]], "weights": [1, 2]}, "beta": {"kind": "constant", "beta0": 1}},
        {"mode": "vector", "d": 2, "alpha": {"atoms": [[1, 0]], "weights": [1]}, "beta": {"kind": "constant", "beta0": -1}},
        {"mode": "vector", "d": 2, "alpha": {"atoms": [[1, 0]], "weights": [1]}, "beta": {"kind": "constant", "beta0": 1}, "q": 2},
    ],
)
def test_schema_errors(doc):
    with pytest.raises(SchemaError):
        parse_spec(doc)
