import json

import pytest

from kappanull.cli import run
from kappanull.cli.parser import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION
from kappanull.services import NullitySolverService


def invoke(capsys, *argv):
    args = list(argv) if "--help" in argv else list(argv) + ["--log-level", "ERROR"]
    code = run(args)
    out = capsys.readouterr().out
    return code, out


def test_radon_hurwitz(capsys):
    code, out = invoke(capsys, "radon-hurwitz", "--m", "16")
    assert code == EXIT_OK
    assert json.loads(out) == {"m": 16, "rho": 9}


def test_radon_hurwitz_obstruction(capsys):
    code, out = invoke(capsys, "radon-hurwitz", "--m", "4", "--n", "4", "--d", "2")
    assert code == EXIT_OK
    assert json.loads(out)["obstruction"]["allowed"] is False


def test_example5(capsys):
    code, out = invoke(capsys, "example5")
    assert code == EXIT_OK
    assert json.loads(out)["alpha"] == pytest.approx(0.308331705259228, abs=1e-12)


def test_nul1_group(capsys):
    code, out = invoke(capsys, "nul1-group", "--m", "4")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["nullity_ok"] is True
    assert report["witness_matches"] is True


def test_nul1_group_wrong_nullity(capsys, monkeypatch):
    original = NullitySolverService.nullity_index
    monkeypatch.setattr(
        NullitySolverService, "nullity_index", lambda self, curv, kappa, tol=None: original(self, curv, 0.5, tol)
    )
    code, out = invoke(capsys, "nul1-group", "--m", "4")
    assert code == EXIT_VALIDATION
    assert json.loads(out)["nullity_ok"] is False


def test_milnor_with_table_check(capsys):
    code, out = invoke(capsys, "milnor", "--lambda", "2,1,1", "--table-check", "T1F1:1")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["group"] == "SU(2)"
    assert report["table_check"]["passed"] is True


def test_milnor_triple_mismatch(capsys):
    code, _ = invoke(capsys, "milnor", "--lambda", "2,2,2", "--table-check", "T1F1:1")
    assert code == EXIT_VALIDATION


def test_table_check(capsys):
    code, out = invoke(capsys, "table-check", "--row", "t2:0.5")
    assert code == EXIT_OK
    assert json.loads(out)["group"] == "SL(2,R)~"


def test_nullity_from_catalog(capsys):
    code, out = invoke(capsys, "nullity", "--catalog", "e11", "--kappa", "-1")
    assert code == EXIT_OK
    assert json.loads(out)["index"] == 1


def test_curvature_from_file(capsys, tmp_path):
    path = tmp_path / "su2.json"
    path.write_text(json.dumps({
        "dim": 3,
        "brackets": [{"i": 0, "j": 1, "coeffs": [0, 0, 2]}, {"i": 1, "j": 2, "coeffs": [2, 0, 0]},
                     {"i": 2, "j": 0, "coeffs": [0, 2, 0]}],
    }))
    code, out = invoke(capsys, "curvature", "--input", str(path))
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["scal"] == pytest.approx(6.0)
    assert report["sectional"]["K01"] == pytest.approx(1.0)


def test_lattice_check(capsys, tmp_path):
    path = tmp_path / "a.json"
    path.write_text(json.dumps({"m": 2, "A": [[1, 0], [0, -1]]}))
    code, out = invoke(capsys, "lattice", "--input", str(path), "--lambda", "0.9624236501192069")
    assert code == EXIT_OK
    assert json.loads(out)["coefficients"] == [1, -3, 1]


@pytest.mark.parametrize("argv", [["frobnicate"], ["radon-hurwitz"], ["nullity-scan", "--catalog", "e11", "--range", "x"]])
def test_usage_errors(capsys, argv):
    code, _ = invoke(capsys, *argv)
    assert code == EXIT_USAGE


def test_help(capsys):
    code, out = invoke(capsys, "--help")
    assert code == EXIT_OK
    assert "radon-hurwitz" in out


def test_missing_input(capsys, tmp_path):
    code, out = invoke(capsys, "validate", "--input", str(tmp_path / "missing.json"))
    assert code == EXIT_VALIDATION
    assert out == ""


def test_invalid_json(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _ = invoke(capsys, "aa", "--input", str(path))
    assert code == EXIT_VALIDATION


def test_singular_splitting(capsys, tmp_path):
    path = tmp_path / "state.json"
    path.write_text(json.dumps({"kappa": 0, "C0": [[2.0]]}))
    code, _ = invoke(capsys, "splitting", "--input", str(path), "--range", "0:1:3")
    assert code == EXIT_NUMERICAL


def test_splitting_csv(capsys, tmp_path):
    state = tmp_path / "state.json"
    state.write_text(json.dumps({"kappa": -1, "C0": [[1.0, 0.0], [0.0, -1.0]]}))
    target = tmp_path / "out" / "trace.csv"
    code, out = invoke(capsys, "splitting", "--input", str(state), "--csv", str(target), "--kd0", "1")
    assert code == EXIT_OK
    assert json.loads(out)["csv"] == str(target)
    header = target.read_text().splitlines()[0]
    assert header.startswith("t,")
    assert header.endswith("KD")
    assert len(target.read_text().splitlines()) == 12


def test_splitting_from_catalog(capsys):
    code, out = invoke(capsys, "splitting", "--catalog", "e11", "--kappa", "-1", "--range", "0:1:5")
    assert code == EXIT_OK
    report = json.loads(out)
    assert len(report["rows"]) == 5
    assert report["trace_limits"]["identity_residual"] <= 1e-8


def test_output_is_deterministic(capsys):
    _, first = invoke(capsys, "table-check", "--row", "T1F2:-1")
    _, second = invoke(capsys, "table-check", "--row", "T1F2:-1")
    assert first == second
