import io
import json
import math
import subprocess
import sys

import jsonschema
import pytest

from companion_quad.cli import main
from companion_quad.oracle import RTOL_ENV_VAR
from companion_quad.report import load_schema


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), stdout=buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    report = json.loads(text)
    jsonschema.validate(report, load_schema(argv[0]))
    return code, report


def test_bounds_worked_case():
    code, rep = run_json("bounds", "--f", "t^2", "--a", "0", "--b", "1", "--x", "0.25")
    assert code == 0
    res = rep["results"]
    assert res["lhs"] == pytest.approx(1 / 48, abs=1e-12)
    assert res["tightest"] == "th23"
    assert res["rhs"]["th23"] == pytest.approx(1 / 12, abs=1e-12)
    assert rep["inputs"] == {"f": "t^2", "a": 0.0, "b": 1.0, "x": 0.25, "p": 2.0}


def test_bounds_linear_function():
    code, rep = run_json("bounds", "--f", "t", "--a", "0", "--b", "1", "--x", "0.3")
    assert code == 0
    res = rep["results"]
    assert res["lhs"] == 0.0
    for bid in ("th21g", "th21G", "th22", "th23", "alomari"):
        assert res["rhs"][bid] == 0.0
    # the older baselines are in terms of ||f'|| and stay positive
    assert res["rhs"]["dragomir_inf"] == pytest.approx(0.13)


@pytest.mark.parametrize(
    "argv, code",
    [
        (["bounds", "--f", "t^2", "--a", "0", "--b", "1", "--x", "0.6"], 2),
        (["bounds", "--f", "sin(", "--a", "0", "--b", "1", "--x", "0.2"], 2),
        (["bounds", "--f", "tan(t)", "--a", "0", "--b", "1", "--x", "0.2"], 2),
        (["bounds", "--f", "t", "--a", "0", "--b", "1", "--x", "0.2", "--csv"], 2),
        (["bounds", "--f", "t", "--a", "0", "--b", "1"], 2),
        (["bounds", "--f", "log(t)", "--a", "0", "--b", "1", "--x", "0.2"], 3),
        (["integrate", "--f", "t", "--a", "0", "--b", "1"], 2),
        (["integrate", "--f", "t", "--a", "1", "--b", "0", "--n", "2"], 2),
        (["integrate", "--f", "t", "--a", "0", "--b", "1", "--nonuniform", "0.5,0.5"], 2),
        (["prob", "--pdf", "0-t", "--a", "0", "--b", "1", "--x", "0.25"], 3),
        (["prob", "--pdf", "5", "--a", "0", "--b", "1", "--x", "0.25"], 3),
        (["prob", "--pdf", "2*t", "--a", "0", "--b", "1", "--x", "0.25", "--gamma", "1.5"], 3),
        (["sharpness", "--eps", "1e-3", "--x", "0.2"], 2),
        (["sharpness", "--eps", "0.3", "--x", "0.25"], 2),
        (["sharpness", "--eps", "abc"], 2),
        (["convergence", "--f", "t", "--a", "0", "--b", "1", "--n-list", "4,2"], 2),
        (["verify", "--seed", "1", "--trials", "0"], 2),
        (["nope"], 2),
        ([], 2),
    ],
)
def test_exit_codes(argv, code, capsys):
    assert run(*argv)[0] == code
    assert capsys.readouterr().err


def test_integrate_examples():
    code, rep = run_json("integrate", "--f", "t^2", "--a", "0", "--b", "1", "--n", "2", "--reference")
    res = rep["results"]
    assert code == 0
    assert res["estimate"] == 0.328125
    assert res["true_error"] == pytest.approx(0.00520833333, abs=1e-10)
    assert res["bound32"] == pytest.approx(0.022972, abs=1e-6)
    assert res["bound33"] == pytest.approx(0.0416667, abs=1e-7)

    code, rep = run_json("integrate", "--f", "t", "--a", "0", "--b", "1", "--n", "1")
    res = rep["results"]
    assert res["estimate"] == 0.5
    assert [res[k] for k in ("bound31g", "bound31G", "bound32", "bound33")] == [0.0] * 4

    code, rep = run_json("integrate", "--f", "t^3", "--a", "0", "--b", "1", "--nonuniform", "0.2,0.7", "--reference")
    assert code == 0 and rep["results"]["bound32"] is None and rep["warnings"]


def test_integrate_adaptive():
    code, rep = run_json("integrate", "--f", "exp(4*t)", "--a", "0", "--b", "1", "--target", "1e-4", "--reference")
    res = rep["results"]
    assert code == 0 and res["mode"] == "adaptive"
    assert res["certified_bound"] <= 1e-4
    assert abs(res["true_error"]) <= res["certified_bound"]


def test_verify_single_trial_is_reproducible():
    first = run("verify", "--seed", "42", "--trials", "1")
    second = run("verify", "--seed", "42", "--trials", "1")
    assert first == second and first[0] == 0
    jsonschema.validate(json.loads(first[1]), load_schema("verify"))


def test_verify_mutation_smoke(monkeypatch, capsys):
    from companion_quad import kernel

    monkeypatch.setattr(kernel, "KERNEL_L2_CONSTANT", 1 / 96)
    code, rep = run_json("verify", "--seed", "42", "--trials", "100")
    assert code == 1
    assert rep["results"]["violations"] > 0
    assert rep["results"]["violation_records"][0]["check"] in ("th23", "th43", "th22", "th42", "th32", "th33")


def test_sharpness_json_and_csv():
    code, rep = run_json("sharpness", "--eps", "1e-2,1e-3", "--x", "0.5")
    ratios = [r["ratio"] for r in rep["results"]["rows"]]
    assert ratios == pytest.approx([0.9899, 0.998999], abs=1e-6)
    assert ratios[0] < ratios[1]
    code, text = run("sharpness", "--eps", "1e-3", "--x", "0.25", "--csv")
    header, row = text.strip().splitlines()
    assert header == "epsilon,lhs,rhs,ratio,predicted"
    assert float(row.split(",")[3]) == pytest.approx(0.997998, abs=1e-6)


def test_prob_examples():
    code, rep = run_json("prob", "--pdf", "2*t", "--a", "0", "--b", "1", "--x", "0.25", "--gamma", "0", "--Gamma", "2")
    res = rep["results"]
    assert code == 0
    assert res["lhs"] == pytest.approx(1 / 48, abs=1e-12)
    assert (res["th41g"], res["th41G"]) == (0.25, 0.25)
    assert res["th42"] == pytest.approx(0.0918881, abs=1e-7)
    assert res["th43"] == pytest.approx(0.0833333, abs=1e-7)

    code, rep = run_json("prob", "--pdf", "1", "--a", "0", "--b", "1", "--x", "0.3")
    res = rep["results"]
    assert res["lhs"] == pytest.approx(0.0, abs=1e-15)
    assert res["gamma"] == pytest.approx(1.0) and res["Gamma"] == pytest.approx(1.0)
    for key in ("th41g", "th41G", "th42", "th43"):
        assert res[key] == pytest.approx(0.0, abs=1e-8)

    code, rep = run_json("prob", "--pdf", "t", "--a", "0", "--b", "1", "--x", "0.25", "--gamma", "-1")
    assert code == 0 and rep["results"]["normalized"] and len(rep["warnings"]) == 2


def test_convergence_json_and_csv():
    code, rep = run_json("convergence", "--f", "t^2", "--a", "0", "--b", "1", "--n-list", "1,2,4")
    rows = rep["results"]["rows"]
    assert rows[0]["order"] == pytest.approx(2.0, abs=1e-9) and rows[-1]["order"] is None
    code, text = run("convergence", "--f", "t", "--a", "0", "--b", "1", "--n-list", "1,2", "--csv")
    assert text.splitlines()[1].endswith(",exact")


def test_bad_tolerance_environment(monkeypatch):
    monkeypatch.setenv(RTOL_ENV_VAR, "not-a-number")
    assert run("bounds", "--f", "t", "--a", "0", "--b", "1", "--x", "0.2")[0] == 2
    assert run("verify", "--seed", "1", "--trials", "2")[0] == 2
    monkeypatch.setenv(RTOL_ENV_VAR, "1e-9")
    code, rep = run_json("bounds", "--f", "exp(t)", "--a", "0", "--b", "1", "--x", "0.2")
    assert rep["results"]["mean"] == pytest.approx(math.e - 1, rel=1e-9)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "companion_quad", "sharpness", "--eps", "1e-2"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "sharpness"
    proc = subprocess.run([sys.executable, "-m", "companion_quad", "bounds"], capture_output=True, text=True)
    assert proc.returncode == 2
