import json

import pytest

from nmetric.cli import main, render
from nmetric.hypergraph import example_hypergraph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def example_file(tmp_path):
    p = tmp_path / "h.json"
    p.write_text(json.dumps(example_hypergraph().to_dict()))
    return str(p)


def _points_file(tmp_path, doc):
    p = tmp_path / "pts.json"
    p.write_text(json.dumps(doc))
    return str(p)


def test_eval_vandermonde(capsys, tmp_path):
    f = _points_file(tmp_path, {"points": [[0, 0], [1, 0], [0, 1]]})
    code, out, _ = run(capsys, "eval", "--metric", "vandermonde", "--input", f)
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(2**0.5, rel=1e-15)
    code, out, _ = run(capsys, "eval", "--metric", "vandermonde", "--input", f, "--format", "text")
    assert "value: 1.4142135623730951" in out


def test_eval_hyper(capsys, example_file):
    code, out, _ = run(capsys, "eval", "--metric", "hyper", "--input", example_file, "--tuple", "1,2,3")
    assert code == 0 and json.loads(out)["value"] == 2


def test_eval_sphere_duplicate_point(capsys, tmp_path):
    f = _points_file(tmp_path, {"dim": 3, "points": [[1, 0, 0], [0, 1, 0], [1, 0, 0]]})
    code, out, _ = run(capsys, "eval", "--metric", "sphere", "--input", f)
    assert code == 0 and json.loads(out)["value"] == 0.0


def test_check_sphere_passes(capsys):
    code, out, _ = run(capsys, "check", "--metric", "sphere", "--n", "3", "--dim", "5", "--trials", "500", "--seed", "42")
    rep = json.loads(out)
    assert code == 0 and rep["violation_count"] == 0 and rep["seed"] == 42


def test_check_norm_product_finds_violation(capsys):
    code, out, _ = run(capsys, "check", "--metric", "norm-product", "--n", "4", "--dim", "3", "--trials", "200")
    rep = json.loads(out)
    assert code == 1 and rep["violation_count"] > 0
    assert rep["violations"][0]["witness"] is not None
    assert len(rep["violations"]) <= 5


def test_check_experimental_is_labeled(capsys):
    code, out, _ = run(capsys, "check", "--metric", "grassmann-quotient-n3", "--trials", "5")
    assert code in (0, 1) and json.loads(out)["experimental"] is True


def test_check_hyper_exhaustive(capsys, example_file):
    code, out, _ = run(capsys, "check", "--metric", "hyper", "--input", example_file)
    assert code == 0 and json.loads(out)["mode"] == "exhaustive"


def test_counterexamples(capsys):
    code, out, _ = run(capsys, "counterexample", "tetrahedron")
    rep = json.loads(out)
    assert code == 1
    assert rep["lhs"] == pytest.approx((8 / 3) ** 3, abs=1e-12)
    assert rep["rhs"] == pytest.approx(4 * (8 / 3) ** 1.5, abs=1e-12)
    assert rep["margin"] < 0
    code, out, _ = run(capsys, "counterexample", "hausdorff", "--N", "2")
    assert code == 1
    assert json.loads(out)["summary"] == "3-metric verified; d_H violation margin -1"
    code, _, err = run(capsys, "counterexample", "hausdorff", "--N", "1")
    assert code == 2 and "N" in err


def test_family(capsys):
    code, out, _ = run(capsys, "family", "--q", "1", "--s", "2")
    rep = json.loads(out)
    assert code == 0 and rep["residual"] <= 1e-12
    code, out, _ = run(capsys, "family", "--q", "2", "--s", "1")
    assert json.loads(out)["residual"] <= 1e-12
    code, _, _ = run(capsys, "family", "--q", "-1", "--s", "1")
    assert code == 2


def test_hyper_command(capsys, example_file):
    code, out, _ = run(capsys, "hyper", "--input", example_file, "--tuple", "1,2,3", "--y", "4")
    rep = json.loads(out)
    assert code == 0 and rep["connected"] and rep["value"] == 2 and rep["sharper_margin"] == 0
    code, out, _ = run(capsys, "hyper", "--input", example_file)
    assert [d["value"] for d in json.loads(out)["distances"]] == [2, 1, 1, 1]


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "--metric", "nope"],
        ["check"],
        ["eval", "--metric", "sphere"],
        ["eval", "--metric", "sphere", "--input", "/nonexistent.json"],
        ["bogus"],
        ["check", "--metric", "sphere", "--seed", "-3"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("nmetric:")


def test_bad_json_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(capsys, "hyper", "--input", str(p))[0] == 2


def test_output_file_and_round_trip(capsys, tmp_path):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "counterexample", "hausdorff", "--N", "2", "--output", str(dest))
    assert code == 1 and out == ""
    rep = json.loads(dest.read_text())
    assert json.loads(render(rep, "json")) == rep


def test_text_mirrors_json(capsys):
    _, js, _ = run(capsys, "counterexample", "tetrahedron")
    _, txt, _ = run(capsys, "counterexample", "tetrahedron", "--format", "text")
    rep = json.loads(js)
    assert f"lhs: {format(rep['lhs'], '.17g')}" in txt
    assert f"margin: {format(rep['margin'], '.17g')}" in txt


def test_deterministic(capsys):
    a = run(capsys, "check", "--metric", "simplex", "--trials", "50", "--seed", "9")[1]
    b = run(capsys, "check", "--metric", "simplex", "--trials", "50", "--seed", "9")[1]
    assert a == b
