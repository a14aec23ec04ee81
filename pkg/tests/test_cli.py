import json

import numpy as np
import pytest

from conegamma import cli

AG = {"mode": "cone", "d": 2, "alpha": {"family": "agamma", "eta": 3, "omega": 2}}
EXP_WEIGHTS = {"mode": "vector", "d": 2, "alpha": {"family": "sequence", "rule": "exp_weights"}, "beta": {"kind": "sequence"}}
ONE_DIM = {"mode": "vector", "d": 1, "alpha": {"atoms": [[1]], "weights": [2]}, "beta": {"kind": "constant", "beta0": 1}}


@pytest.fixture
def spec(tmp_path):
    def write(doc, name="law.json"):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)

    return write


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    return code, capsys.readouterr().out


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


class TestCheck:
    def test_agamma(self, capsys, spec):
        code, out = run(capsys, "check", spec(AG))
        rep = json.loads(out)
        assert code == 0 and rep["exists"]
        assert rep["fourier_laplace"]["radius"] == 1.0
        np.testing.assert_allclose(rep["mean"], np.eye(2))

    def test_exp_weights(self, capsys, spec):
        code, out = run(capsys, "check", spec(EXP_WEIGHTS))
        rep = json.loads(out)
        assert code == 0 and rep["exists"]
        assert rep["fourier_laplace"]["radius"] == 0.0
        assert all(v["finite"] for v in rep["moments"].values())

    def test_nonexistent(self, capsys, spec):
        doc = dict(ONE_DIM, beta={"kind": "per_atom", "values": [0.0]})
        code, out = run(capsys, "check", spec(doc))
        assert code == cli.EXIT_DOMAIN and json.loads(out)["exists"] is False

    def test_schema_error(self, capsys, spec):
        code, _ = run(capsys, "check", spec({"mode": "cone"}))
        assert code == cli.EXIT_USAGE

    def test_missing_file(self, capsys, tmp_path):
        code, _ = run(capsys, "check", tmp_path / "absent.json")
        assert code != 0


class TestSample:
    def test_bit_identical(self, capsys, spec, tmp_path):
        s = spec(AG)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(capsys, "sample", s, "-n", 10, "--seed", 3, "--out", a)[0] == 0
        assert run(capsys, "sample", s, "-n", 10, "--seed", 3, "--out", b)[0] == 0
        assert a.read_bytes() == b.read_bytes()
        header, rows = read_csv(a)
        assert header == ["m11", "m12", "m22"] and rows.shape == (10, 3)
        meta = json.loads((tmp_path / "a.csv.json").read_text())
        assert meta["seed"] == 3 and meta["n"] == 10
        assert json.loads(open(s).read()) == AG  # spec untouched

    def test_prefix(self, capsys, spec, tmp_path):
        s = spec(AG)
        run(capsys, "sample", s, "-n", 7, "--seed", 1, "--out", tmp_path / "long.csv")
        run(capsys, "sample", s, "-n", 3, "--seed", 1, "--out", tmp_path / "short.csv")
        assert np.array_equal(read_csv(tmp_path / "long.csv")[1][:3], read_csv(tmp_path / "short.csv")[1])

    def test_stream_changes_draws(self, capsys, spec, tmp_path):
        s = spec(ONE_DIM)
        run(capsys, "sample", s, "-n", 5, "--seed", 1, "--out", tmp_path / "a.csv")
        run(capsys, "sample", s, "-n", 5, "--seed", 1, "--stream", 2, "--out", tmp_path / "b.csv")
        assert read_csv(tmp_path / "a.csv")[0] == ["x1"]
        assert not np.array_equal(read_csv(tmp_path / "a.csv")[1], read_csv(tmp_path / "b.csv")[1])

    def test_bad_n(self, capsys, spec):
        assert run(capsys, "sample", spec(AG), "-n", "x", "--seed", 1)[0] == cli.EXIT_USAGE


class TestOther:
    def test_path(self, capsys, spec, tmp_path):
        out = tmp_path / "p.csv"
        assert run(capsys, "path", spec(AG), "-T", 2, "--grid", 20, "--seed", 1, "--out", out)[0] == 0
        _, rows = read_csv(out)
        assert rows.shape[0] == 21

    def test_transform(self, capsys, spec, tmp_path):
        pts = tmp_path / "pts.json"
        pts.write_text("[[1.0], [0.5]]")
        code, out = run(capsys, "transform", spec(ONE_DIM), "--points", pts)
        vals = json.loads(out)["values"]
        assert code == 0
        assert vals[0]["laplace"] == pytest.approx(0.25, rel=1e-14)
        cf = complex(*vals[1]["cf"])
        assert cf == pytest.approx((1 - 0.5j) ** -2, rel=1e-14)

    def test_transform_csv_points(self, capsys, spec, tmp_path):
        pts = tmp_path / "pts.csv"
        pts.write_text("m11,m12,m22\n0.5,0,0.5\n")
        code, out = run(capsys, "transform", spec(AG), "--points", pts)
        # AGamma(eta, I) at t I has Laplace transform (1 + t)^{-omega}
        assert code == 0 and json.loads(out)["values"][0]["laplace"] == pytest.approx(1.5**-2, rel=1e-12)

    def test_mp(self, capsys):
        code, out = run(capsys, "mp", "-p", 3, "-lambda", 1)
        assert code == 0 and float(out) == 5.0

    def test_mp_table(self, capsys):
        code, out = run(capsys, "mp", "-p", 2, "-lambda", 1, "--table", "16,64")
        assert code == 0 and out.strip()

    def test_agamma_moments(self, capsys):
        code, out = run(capsys, "agamma-moments", "-d", 2, "-eta", 3, "-omega", 2)
        rep = json.loads(out)
        assert code == 0
        np.testing.assert_allclose(rep["mean"], np.eye(2), rtol=1e-14)
        assert np.allclose(rep["cov_vec"], np.array(rep["cov_vec"]).T)

    def test_verify_selection(self, capsys, tmp_path):
        out = tmp_path / "v.json"
        code, _ = run(capsys, "verify", "--criteria", "1,8", "--silent", "--out", out)
        rep = json.loads(out.read_text())
        assert code == 0 and rep["passed"]
        assert [c["number"] for c in rep["criteria"]] == [1, 8]

    def test_verify_unknown(self, capsys):
        assert run(capsys, "verify", "--criteria", "99", "--silent")[0] == cli.EXIT_USAGE

    def test_no_command(self, capsys):
        assert run(capsys)[0] == cli.EXIT_USAGE
