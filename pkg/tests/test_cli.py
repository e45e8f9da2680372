import csv
import io
import json

import pytest

from partnersym.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


def call_json(*argv):
    code, text = call(*argv)
    return code, (json.loads(text) if text else None)


def test_classify_example():
    code, doc = call_json("classify", "--coeffs", "a6=1,b1=1,b4=1")
    assert code == EXIT_PASS and doc["case"] == "SecondHeavenly"


def test_residual_example():
    code, doc = call_json("residual", "--eq", "mixed", "--eps", "1", "--potential", "t*y + x*z",
                          "--points", "10", "--seed", "7")
    assert code == EXIT_PASS
    assert doc["max_residual"] == "0" and doc["mode"] == "exact" and doc["pass"] is True


def test_residual_failure_exit_code():
    code, doc = call_json("residual", "--eq", "mixed", "--eps", "-1", "--potential", "t*y + x*z")
    assert code == EXIT_FAIL and doc["pass"] is False and doc["max_residual"] == "2"


def test_residual_float_mode():
    code, doc = call_json("residual", "--eq", "husain", "--potential", "t*z + p*y - (t^2 + p^2)/4",
                          "--mode", "float", "--points", "5")
    assert code == EXIT_PASS and doc["mode"] == "float"


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    [],
    ["residual", "--eq", "mixed", "--potential", "t*y +* x"],
    ["residual", "--eq", "mixed", "--potential", "p*q"],
    ["residual", "--eq", "mixed", "--potential", "t*y", "--points", "0"],
    ["residual", "--eq", "mixed", "--potential", "t*y", "--tol", "0"],
    ["classify", "--coeffs", "a9=1"],
    ["ricci", "--family", "legmix", "--modes", "/nonexistent/modes.json"],
    ["ricci", "--family", "legmix", "--poly", "g=1", "--potential", "t*y"],
    ["lift-poly", "--poly", "g=1", "--mode", "exact", "--eps", "1"],
    ["residual", "--eq", "mixed", "--potential", "exp(t)", "--mode", "exact"],
    ["recursion"],
])
def test_usage_errors(argv, capsys):
    code, text = call(*argv)
    assert code == EXIT_USAGE and text == ""


def test_ricci_examples():
    # the bare quartic mode has delta identically zero, so every point is degenerate
    code, doc = call_json("ricci", "--family", "legmix", "--eps", "1", "--poly", "D=1",
                          "--points", "20", "--mode", "exact")
    assert code == EXIT_FAIL and doc["kind"] == "DegeneratePotentialError"
    code, doc = call_json("ricci", "--family", "legmix", "--eps", "1", "--poly", "g=1,D=1",
                          "--points", "20", "--mode", "exact")
    assert code == EXIT_PASS and doc["max_ricci"] == "0" and doc["npoints"] == 20


def test_ricci_modes_file(tmp_path):
    modes = tmp_path / "modes.json"
    modes.write_text(json.dumps([{"alpha": 2, "beta": 1}, {"alpha": 3, "beta": -1, "A": 0.5}]))
    code, doc = call_json("ricci", "--family", "legmix", "--modes", str(modes), "--points", "10")
    assert code == EXIT_PASS and doc["mode"] == "float"
    code, _ = call_json("ricci", "--family", "legmix", "--modes", str(modes), "--mode", "exact")
    assert code == EXIT_USAGE


def test_ricci_nonsolution():
    pot = "t*y + x*z + t^2*x^2/10"
    code, doc = call_json("ricci", "--family", "mixedsym", "--potential", pot, "--points", "3")
    assert code == EXIT_FAIL and doc["kind"] == "PreconditionError"
    code, doc = call_json("ricci", "--family", "mixedsym", "--potential", pot, "--points", "3",
                          "--allow-nonsolution")
    assert code in (EXIT_PASS, EXIT_FAIL) and "max_ricci" in doc


def test_grid_csv_and_json():
    code, text = call("grid", "--family", "mixedsym", "--potential", "t*y + x*z", "--points", "3")
    rows = list(csv.reader(io.StringIO(text)))
    assert code == EXIT_PASS and len(rows) == 4
    assert rows[0][:4] == ["t", "x", "y", "z"] and rows[0][-3:] == ["max_ricci", "det_g", "Delta"]
    code, doc = call_json("grid", "--family", "mixedsym", "--potential", "t*y + x*z", "--points", "3",
                          "--format", "json")
    assert code == EXIT_PASS and len(doc["samples"]) == 3


def test_out_file(tmp_path):
    out = tmp_path / "r.json"
    code, text = call("classify", "--coeffs", "a1=1,b0=-1", "--out", str(out))
    assert code == EXIT_PASS and text == ""
    assert json.loads(out.read_text())["case"] == "FirstHeavenly"


def test_recursion_commands():
    code, doc = call_json("recursion", "--eq", "second")
    assert code == EXIT_PASS and "omega0" in doc["psi_t"]
    code, doc = call_json("recursion", "--eq", "mixed", "--potential", "t*y + x*z", "--phi", "x + z")
    assert code == EXIT_PASS and doc["psi"] == "-t" and doc["defect"] == "0"
    code, doc = call_json("recursion", "--eq", "mixed", "--potential", "t*y + x*z", "--phi", "x*z")
    assert code == EXIT_FAIL and doc["kind"] == "PreconditionError"


def test_lift_and_constraints(tmp_path):
    code, doc = call_json("lift-poly", "--poly", "k=1", "--points", "3")
    assert code == EXIT_PASS and doc["linear_identically_zero"] is True
    modes = tmp_path / "m.json"
    modes.write_text(json.dumps({"alpha": 2, "beta": 1, "sign": "-"}))
    code, doc = call_json("lift-exp", "--modes", str(modes), "--points", "5")
    assert code == EXIT_PASS and doc["modes"][0]["sign"] == "-"
    code, doc = call_json("constraints", "--poly", "g=1", "--points", "3")
    assert code == EXIT_PASS and doc["identically_zero"] is True
    code, doc = call_json("constraints", "--potential", "t^3*q + p*y", "--points", "3")
    assert code == EXIT_FAIL


def test_legendre_commands():
    code, doc = call_json("legendre", "--potential", "t*y + x*z + x^2/2", "--points", "2")
    assert code == EXIT_PASS and doc["transformed"] == "t*y - p*q + 1/2*q^2" and doc["involution"]
    code, doc = call_json("legendre", "--bridge", "--potential", "t*z + p*y - (t^2 + p^2)/4", "--points", "5")
    assert code == EXIT_PASS and doc["max_mixed_residual"] == "0"
    code, doc = call_json("legendre", "--potential", "t*y + x^2", "--points", "2")
    assert code == EXIT_FAIL


@pytest.mark.parametrize("argv", [
    ["residual", "--eq", "mixed", "--potential", "t*y + x*z + sin(t)/10", "--points", "5", "--seed", "3"],
    ["ricci", "--family", "legmix", "--poly", "g=1,D=1", "--points", "4", "--seed", "9"],
    ["grid", "--family", "husain", "--potential", "t*z + p*y - (t^2 + p^2)/4", "--points", "4"],
    ["legendre", "--potential", "t*y + x*z + x^2/2 + z^2", "--points", "4", "--mode", "float"],
])
def test_reports_are_deterministic(argv):
    first = call(*argv)
    assert first == call(*argv)
