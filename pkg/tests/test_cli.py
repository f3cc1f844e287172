import json

import pytest

from booleq.cli import run
from booleq.cumulants import CumulantSpec
from booleq.definetti import boolean_iid_moment_vector, moment_vectors_to_json


def out_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_haar_example(capsys):
    assert run(["haar", "--category", "s", "--n", "3", "--word", "p;11,22;p"]) == 0
    assert out_json(capsys) == {"value": "1/6"}


def test_haar_verify(capsys):
    assert run(["haar", "--category", "h", "--n", "3", "--word", "p;11,11;p;12,12;p", "--verify"]) == 0
    assert out_json(capsys)["value"] == "1/9"


def test_enumerate_example(capsys):
    assert run(["enumerate", "--category", "h", "--k", "4"]) == 0
    assert out_json(capsys) == [[[1, 2, 3, 4]], [[1, 2], [3, 4]]]


def test_matrices(capsys):
    assert run(["gram", "--category", "s", "--k", "2", "--n", "3"]) == 0
    assert out_json(capsys) == {"labels": ["{12}", "{1}{2}"], "matrix": [["3/1", "3/1"], ["3/1", "9/1"]]}
    assert run(["weingarten", "--category", "o", "--k", "2", "--n", "4", "--format", "csv"]) == 0
    assert capsys.readouterr().out == ",{12}\n{12},1/4\n"
    assert run(["mobius", "--k", "2"]) == 0
    assert out_json(capsys)["matrix"] == [["1/1", "0/1"], ["-1/1", "1/1"]]


def test_projection(capsys):
    assert run(["projection", "--category", "s", "--k", "2", "--n", "4", "--i", "1,1", "--j", "2,2",
                "--verify"]) == 0
    assert out_json(capsys) == {"i": [1, 1], "j": [2, 2], "value": "1/4", "oracle_agrees": True}
    assert run(["projection", "--category", "b", "--k", "2", "--n", "3"]) == 0
    assert "table" in out_json(capsys)


def test_wein_residual(capsys):
    assert run(["wein-residual", "--k", "2", "--n", "8,16"]) == 0
    rows = out_json(capsys)
    assert {r["residual"] for r in rows if r["n"] == 8} == {"1/7"}


def test_rep_check(capsys):
    assert run(["rep-check", "--category", "o", "--k", "2", "--n", "3"]) == 0
    assert all(out_json(capsys).values())
    assert run(["rep-check", "--category", "o", "--k", "3", "--n", "3"]) == 2
    assert run(["rep-check", "--category", "b", "--k", "2", "--n", "3"]) == 2


def test_cumulants_and_bernoulli(capsys):
    assert run(["bernoulli", "--mu", "1", "--var", "2", "--m", "5"]) == 0
    assert out_json(capsys)["moments"] == ["1/1", "3/1", "5/1", "11/1", "21/1"]
    assert run(["cumulants", "--category", "b", "--moments", "1,3,5,11"]) == 0
    assert out_json(capsys)["kappa"] == {"1": "1/1", "2": "2/1", "3": "0/1", "4": "0/1"}
    assert run(["cumulants", "--category", "o", "--moments", "1,1,1"]) == 1
    assert out_json(capsys)["violations"] == [1]


def test_definetti(capsys):
    assert run(["definetti", "--category", "s", "--kappa", "1:1,2:1", "--k", "3", "--n", "2..5"]) == 0
    rows = out_json(capsys)["rows"]
    assert [r["n"] for r in rows] == [2, 3, 4, 5] and {r["residual"] for r in rows} == {"0/1"}
    assert run(["definetti", "--category", "o", "--kappa", "1:1", "--k", "2", "--n", "3"]) == 2


def test_definetti_recover(tmp_path, capsys):
    spec = CumulantSpec("s", {1: 1, 2: 2})
    vecs = [boolean_iid_moment_vector(spec, k, n) for k in (1, 2, 3) for n in (2, 3)]
    good = tmp_path / "good.json"
    good.write_text(json.dumps(moment_vectors_to_json("s", vecs)))
    assert run(["definetti-recover", "--moments", str(good)]) == 0
    assert out_json(capsys)["kappa"] == {"1": "1/1", "2": "2/1"}
    vecs[-1].values[-1] += 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(moment_vectors_to_json("s", vecs)))
    assert run(["definetti-recover", "--moments", str(bad)]) == 1
    assert "error" in out_json(capsys)
    assert run(["definetti-recover", "--moments", str(tmp_path / "missing.json")]) == 2


def test_verify_small_grid(capsys):
    assert run(["verify", "--all", "--max-k", "3", "--max-n", "4"]) == 0
    report = out_json(capsys)
    assert report["passed"] and len(report["criteria"]) == 11


def test_usage_errors(capsys, monkeypatch):
    assert run(["gram", "--k", "7", "--n", "2"]) == 2
    assert run(["gram", "--k", "2", "--n", "9"]) == 2
    assert run(["weingarten", "--k", "2", "--n", "1"]) == 2  # singular Gram matrix
    assert run(["haar", "--n", "3", "--word", "p;1x;p"]) == 2
    assert run(["nonsense"]) == 2
    assert run(["enumerate", "--category", "q", "--k", "2"]) == 2
    assert run(["verify"]) == 2
    monkeypatch.setenv("BW_MAX_CELLS", "10")
    assert run(["projection", "--k", "3", "--n", "3"]) == 2
    err = capsys.readouterr().err
    assert "BW_MAX_CELLS" in err


@pytest.mark.parametrize("argv", [["enumerate", "--category", "b", "--k", "5"],
                                  ["weingarten", "--category", "h", "--k", "4", "--n", "3"]])
def test_deterministic(capsys, argv):
    run(argv)
    first = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == first
