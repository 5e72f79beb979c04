import json
import math

import numpy as np
import pytest

from relkern import dataio
from relkern.cli import main

GAUSS = {"variant": "scalar_times_identity", "m": 1, "base": {"name": "gaussian", "gamma": 1.0}}
NEGDIST = {"variant": "scalar_times_identity", "m": 1, "base": {"name": "negative_distance"}}


@pytest.fixture
def files(tmp_path):
    def write(name, content):
        path = tmp_path / name
        path.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(path)

    write.dir = tmp_path
    return write


def run(*argv):
    return main([str(a) for a in argv])


def test_check_psd_gaussian(files, capsys):
    pts = files("pts.csv", "x_1\n" + "\n".join(str(v) for v in np.linspace(-2, 2, 10)) + "\n")
    assert run("check-psd", "--kernel", files("k.json", GAUSS), "--data", pts) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["is_psd"] and report["n"] == 10


def test_check_psd_negative_distance(files, capsys):
    pts = files("pts.csv", "x_1\n0\n1\n2\n")
    assert run("check-psd", "--kernel", files("k.json", NEGDIST), "--data", pts) == 3
    # Gram of -|t - x| on {0, 1, 2} has eigenvalues 1 +- sqrt(3) and -2
    assert json.loads(capsys.readouterr().out)["min_eigenvalue"] == pytest.approx(-1 - math.sqrt(3))


def test_missing_file_is_input_error(files, capsys):
    assert run("check-psd", "--kernel", files("k.json", GAUSS), "--data", files.dir / "nope.csv") == 2
    assert "cannot read" in capsys.readouterr().err


def test_missing_flag_is_input_error(capsys):
    assert run("fit-values", "--data", "x.csv") == 2


def test_fit_differences_single(files, capsys):
    data = files("d.csv", "x_1,y_1,d_1\n0,1,1\n")
    out = files.dir / "model.json"
    assert run("fit-differences", "--kernel", files("k.json", GAUSS), "--data", data, "--out", out) == 0
    model = json.loads(out.read_text())
    assert model["kind"] == "differences" and model["gauge"] == "H_M"
    c = model["coefficients"][0][0]
    assert c == pytest.approx(1 / (2 - 2 * math.exp(-1)), rel=1e-8)
    assert c == pytest.approx(0.790988, abs=1e-6)


def test_fit_differences_inconsistent_cycle(files, capsys):
    data = files("d.csv", "x_1,y_1,d_1\n0,1,1\n1,2,1\n0,2,1\n")
    assert run("fit-differences", "--kernel", files("k.json", GAUSS), "--data", data) == 4
    captured = capsys.readouterr()
    assert "least-squares residual" in captured.err
    # the model is still written
    assert json.loads(captured.out)["residual"] > 0.1


def test_fit_differences_empty_csv(files):
    assert run("fit-differences", "--kernel", files("k.json", GAUSS), "--data", files("d.csv", "")) == 2
    assert run("fit-differences", "--kernel", files("k.json", GAUSS), "--data", files("e.csv", "x_1,y_1,d_1\n")) == 2


def test_fit_values_then_eval(files, capsys):
    kernel = files("k.json", GAUSS)
    model = files.dir / "m.json"
    assert run("fit-values", "--kernel", kernel, "--data", files("v.csv", "x_1,v_1\n0,1\n1,2+1i\n"),
               "--ridge", 0, "--out", model) == 0
    assert run("eval", "--model", model, "--data", files("p.csv", "x_1\n0\n1\n")) == 0
    values = json.loads(capsys.readouterr().out)["values"]
    assert values[0][0] == pytest.approx(1.0, abs=1e-10)
    assert values[1][0] == pytest.approx([2.0, 1.0], abs=1e-10)


def test_fit_values_inconsistent_duplicate(files):
    data = files("v.csv", "x_1,v_1\n0,1\n0,2\n")
    assert run("fit-values", "--kernel", files("k.json", GAUSS), "--data", data, "--ridge", 0) == 4


def test_anchor_sets_level(files, capsys):
    kernel = files("k.json", GAUSS)
    model = files.dir / "m.json"
    data = files("d.csv", "x_1,y_1,d_1\n0,1,1\n")
    assert run("fit-differences", "--kernel", kernel, "--data", data, "--anchor", "0:5", "--out", model) == 0
    assert json.loads(model.read_text())["gauge"] == "anchored"
    assert run("eval", "--model", model, "--data", files("p.csv", "x_1\n0\n1\n")) == 0
    values = json.loads(capsys.readouterr().out)["values"]
    assert values[0][0] == pytest.approx(5.0, abs=1e-9)
    assert values[1][0] == pytest.approx(6.0, abs=1e-9)


def test_bad_anchor(files):
    data = files("d.csv", "x_1,y_1,d_1\n0,1,1\n")
    assert run("fit-differences", "--kernel", files("k.json", GAUSS), "--data", data, "--anchor", "zero") == 2


def test_verify_deterministic(files):
    a, b = files.dir / "a.json", files.dir / "b.json"
    assert run("verify", "--seed", 3, "--trials", 10, "--out", a) == 0
    assert run("verify", "--seed", 3, "--trials", 10, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["passed"] is True


def test_verify_fault_injection(capsys):
    assert run("verify", "--trials", 5, "--inject-fault", "asymmetry") == 5
    assert "psd" in capsys.readouterr().err


@pytest.mark.parametrize("p", [1.5, 2, 4])
def test_sip_check(p, capsys):
    assert run("sip-check", "--p", p, "--trials", 200) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_sip_check_rejects_bad_exponent():
    assert run("sip-check", "--p", 1) == 2


@pytest.mark.parametrize(
    "content",
    [
        "x_1,x_3\n0,1\n",  # gap in numbering
        "x_1,z_1\n0,1\n",  # unknown prefix
        "x_1\nabc\n",
        "x_1\nnan\n",
        "x_1\n1+2i\n",  # complex coordinate
        "x_1,x_2\n0\n",  # ragged row
    ],
)
def test_points_csv_rejects(files, content):
    with pytest.raises(dataio.InputError):
        dataio.read_points_csv(files("p.csv", content))


def test_csv_complex_values(files):
    pts, vals = dataio.read_values_csv(files("v.csv", "x_1,x_2,v_1,v_2\n0,1,1-2i,3\n"))
    np.testing.assert_array_equal(pts, [[0.0, 1.0]])
    np.testing.assert_array_equal(vals, [[1 - 2j, 3]])


def test_bad_kernel_spec(files):
    pts = files("p.csv", "x_1\n0\n")
    assert run("check-psd", "--kernel", files("k.json", {"variant": "mystery"}), "--data", pts) == 2
    assert run("check-psd", "--kernel", files("k2.json", "{not json"), "--data", pts) == 2


def test_model_round_trip(files):
    data = files("d.csv", "x_1,x_2,y_1,y_2,d_1\n0,0,1,0,1\n0,1,1,1,-0.5\n")
    out = files.dir / "m.json"
    assert run("fit-differences", "--kernel", files("k.json", GAUSS), "--data", data, "--out", out) == 0
    g = dataio.load_model(json.loads(out.read_text()))
    np.testing.assert_allclose(g([1, 0]) - g([0, 0]), [1.0], atol=1e-9)
    np.testing.assert_allclose(g([1, 1]) - g([0, 1]), [-0.5], atol=1e-9)


def test_only_documented_exit_codes(files):
    kernel = files("k.json", GAUSS)
    codes = {
        run("check-psd", "--kernel", kernel, "--data", files("a.csv", "x_1\n0\n")),
        run("check-psd", "--kernel", kernel, "--data", files("b.csv", "bogus\n1\n")),
        run("eval", "--model", kernel, "--data", files("c.csv", "x_1\n0\n")),
        run("fit-differences", "--kernel", kernel, "--data", files("d.csv", "x_1,y_1,d_1\n0,0,1\n")),
    }
    assert codes <= {0, 2, 3, 4, 5}
