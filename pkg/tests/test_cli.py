import csv
import json

import pytest

from _oracles import triangle
from gammalab.cli import SWEEP_HEADER, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def mats(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)

    return {
        "tri": write("tri.json", {"n": 3, "field": "real", "re": triangle().tolist()}),
        "eye": write("eye.json", {"n": 3, "field": "real", "re": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}),
        "bad": write("bad.json", {"n": 2, "field": "real", "re": [[1, 2], [2, 1]]}),
        "schema": write("schema.json", {"n": 2, "re": [[1, 0], [0, 1]]}),
        "phase": write("phase.json", {"n": 2, "field": "complex", "re": [[1, 0], [0, 1]], "im": [[0, 1], [-1, 0]]}),
        "garbage": write("garbage.json", "not json at all"[:5]),
    }


class TestGauge:
    def test_euclidean(self, capsys):
        assert run(capsys, "gauge", "pq:2,2", "--vec", "3,4")[:2] == (0, "5.000000000000\n")

    def test_dual(self, capsys):
        assert run(capsys, "gauge", "linf:2", "--dual", "--vec", "1,1")[:2] == (0, "2.000000000000\n")

    def test_complex_vector(self, capsys):
        code, out, _ = run(capsys, "gauge", "pq:2,2", "--vec", "3j,4")
        assert code == 0 and out == "5.000000000000\n"

    def test_bad_p(self, capsys):
        code, _, err = run(capsys, "gauge", "pq:0.5,2", "--vec", "1,1")
        assert code == 2 and "p must be >= 1" in err and "0.5" in err

    @pytest.mark.parametrize(
        "argv",
        [
            ["gauge", "pq:2,2", "--vec", "1,x"],
            ["gauge", "pq:2,2", "--vec", "1,2,3"],
            ["gauge", "pq:2,2"],
            ["gauge", "box:2", "--vec", "1,1"],
            ["frobnicate"],
            [],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_json(self, capsys):
        code, out, _ = run(capsys, "gauge", "l1:3", "--vec", "1,-2,3", "--json")
        assert code == 0 and json.loads(out)["value"] == 6.0


class TestGamma:
    def test_euclidean(self, capsys):
        code, out, _ = run(capsys, "gamma", "pq:2,2", "--seed", "7", "--json", "--restarts", "8")
        rep = json.loads(out)
        assert code == 0
        assert rep["value"] == pytest.approx(2.0, abs=1e-3)
        assert rep["witness_A"]["n"] == 2

    def test_sup_norm(self, capsys):
        code, out, _ = run(capsys, "gamma", "linf:2", "--field", "real", "--restarts", "8")
        assert code == 0
        value = float(next(l for l in out.splitlines() if l.startswith("value:")).split()[1])
        assert value == pytest.approx(1.0, abs=1e-3)

    def test_json_byte_identical(self, capsys):
        argv = ["gamma", "pq:2,2", "--seed", "7", "--json", "--restarts", "4"]
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]

    def test_disagreement_exit(self, capsys):
        code, out, _ = run(capsys, "gamma", "pq:1.5,8", "--restarts", "6", "--tol", "1e-15")
        assert code == 3 and "converged: false" in out

    def test_bad_restarts(self, capsys):
        assert run(capsys, "gamma", "pq:2,2", "--restarts", "0")[0] == 2

    def test_complex_direct(self, capsys):
        code, out, _ = run(capsys, "gamma", "pq:2,2", "--field", "complex", "--direct", "--restarts", "4", "--json")
        rep = json.loads(out)
        assert rep["route"] == "complex-direct" and rep["value"] == pytest.approx(2.0, abs=2e-3)


class TestBeta:
    def test_identity(self, capsys, mats):
        code, out, _ = run(capsys, "beta", mats["eye"])
        assert code == 0
        assert "beta: 3.000000000000" in out and "gap: 0.000000000000" in out

    def test_triangle_real(self, capsys, mats):
        code, out, _ = run(capsys, "beta", mats["tri"], "--field", "real", "--json")
        rep = json.loads(out)
        assert code == 0
        assert rep["value"] == pytest.approx(4.5, abs=1e-3)
        assert rep["rank1_value"] == 4.0
        assert rep["gap"] == pytest.approx(0.5, abs=1e-3)

    def test_triangle_complex(self, capsys, mats):
        code, out, _ = run(capsys, "beta", mats["tri"], "--field", "complex", "--json")
        assert code == 0 and json.loads(out)["gap"] <= 2e-3

    def test_rank1_only(self, capsys, mats):
        assert run(capsys, "beta", mats["tri"], "--rank1")[1] == "rank1: 4.000000000000\n"

    def test_non_psd(self, capsys, mats):
        code, _, err = run(capsys, "beta", mats["bad"])
        assert code == 4 and "min eigenvalue -1" in err

    @pytest.mark.parametrize("key", ["schema", "garbage"])
    def test_schema(self, capsys, mats, key):
        assert run(capsys, "beta", mats[key])[0] == 2

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "beta", str(tmp_path / "nope.json"))[0] == 2


class TestOpnorm:
    def test_phase_matrix(self, capsys, mats):
        assert run(capsys, "opnorm", mats["phase"], "linf:2")[:2] == (0, "4.000000000000\n")
        code, out, _ = run(capsys, "opnorm", mats["phase"], "linf:2", "--direct")
        assert code == 0 and float(out) == pytest.approx(4.0, rel=1e-9)

    def test_sides(self, capsys, mats):
        assert float(run(capsys, "opnorm", mats["tri"], "l1:3", "--side", "dual")[1]) == pytest.approx(4.0)
        assert float(run(capsys, "opnorm", mats["tri"], "l1:3", "--side", "primal")[1]) == 1.0

    def test_non_psd(self, capsys, mats):
        assert run(capsys, "opnorm", mats["bad"], "pq:2,2")[0] == 4

    def test_dimension_mismatch(self, capsys, mats):
        assert run(capsys, "opnorm", mats["tri"], "pq:2,2")[0] == 2


class TestVerify:
    def test_lemmas(self, capsys):
        code, out, _ = run(capsys, "verify", "lemmas", "--count", "14", "--seed", "1")
        assert code == 0
        assert out.count("PASS") == 4 and "all 4 checks passed" in out

    def test_lemmas_json(self, capsys):
        code, out, _ = run(capsys, "verify", "lemmas", "--count", "7", "--json")
        rep = json.loads(out)
        assert code == 0 and rep["passed"] and len(rep["checks"]) == 4

    def test_failure_names_check(self, capsys):
        # a negative tolerance cannot be met
        code, out, _ = run(capsys, "verify", "theorem1", "--restarts", "2", "--tol", "-1")
        assert code == 1 and "first failing check: theorem1 p=1 q=2" in out

    def test_bad_count(self, capsys):
        assert run(capsys, "verify", "lemmas", "--count", "0")[0] == 2

    def test_unknown_suite(self, capsys):
        assert run(capsys, "verify", "everything")[0] == 2


class TestSweep:
    def test_grid(self, capsys, tmp_path):
        out = tmp_path / "sweep.csv"
        code, _, _ = run(capsys, "sweep", "1:4", "1:4", "--steps", "4", "--restarts", "8", "--out", str(out))
        assert code == 0
        raw = out.read_bytes()
        assert b"\r" not in raw
        lines = raw.decode().splitlines()
        assert lines[0] == SWEEP_HEADER
        rows = list(csv.DictReader(lines))
        assert len(rows) == 16
        assert [(float(r["p"]), float(r["q"])) for r in rows] == [(p, q) for p in (1, 2, 3, 4) for q in (1, 2, 3, 4)]
        assert all(r["pass"] == "true" for r in rows)
        two = next(r for r in rows if float(r["p"]) == 2 and float(r["q"]) == 2)
        assert float(two["gamma_real"]) == pytest.approx(2.0, abs=1e-3)
        assert all(r["wall_ms"] == "0" and r["seed"] == "42" and r["restarts"] == "8" for r in rows)

    def test_rerun_identical(self, capsys, tmp_path):
        files = []
        for k in range(2):
            path = tmp_path / f"s{k}.csv"
            assert run(capsys, "sweep", "1:2", "2:3", "--steps", "2", "--restarts", "2", "--seed", "3", "--out", str(path))[0] == 0
            files.append(path.read_bytes())
        assert files[0] == files[1]

    def test_timing(self, capsys):
        code, out, _ = run(capsys, "sweep", "2:2", "2:2", "--steps", "2", "--restarts", "1", "--timing")
        assert code == 0
        assert all(int(r["wall_ms"]) > 0 for r in csv.DictReader(out.splitlines()))

    @pytest.mark.parametrize(
        "argv",
        [
            ["sweep", "0.5:4", "1:4"],
            ["sweep", "1:65", "1:4"],
            ["sweep", "1-4", "1:4"],
            ["sweep", "1:4", "1:4", "--steps", "1"],
        ],
    )
    def test_bad_ranges(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_unwritable(self, capsys, tmp_path):
        target = tmp_path / "missing" / "x.csv"
        assert run(capsys, "sweep", "2:2", "2:2", "--steps", "2", "--restarts", "1", "--out", str(target))[0] == 2
