"""Command-line behaviour: outputs, exit codes, determinism."""

import json

import pytest

from apholo.ap_core import BasisSet, TrigPolynomial
from apholo.as_functions import ASFunction
from apholo.cli import main
from apholo.sap_circle import APProfile


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def two_freq(tmp_path):
    p = TrigPolynomial(BasisSet((1.0, 2 ** 0.5)), [(0, 1), (1, 0)], [2.0, 1.0])
    return _write(tmp_path / "f.json", p.to_dict())


@pytest.fixture
def sap_files(tmp_path):
    b = BasisSet((1.0,))
    e = TrigPolynomial(b, [(1,)], [1.0])
    z = TrigPolynomial.zero(b)
    good = APProfile(0.0, e, z, 0.5).to_dict()
    bad = APProfile(0.0, z, z, 0.5).to_dict()
    base = {"singular": [0.0], "profiles": [good]}
    return (_write(tmp_path / "good.json", dict(base, candidates=[good])),
            _write(tmp_path / "bad.json", dict(base, candidates=[bad])))


def test_spectrum_csv(two_freq, capsys):
    assert main(["spectrum", "--input", two_freq]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "lambda,norm"
    rows = [tuple(float(x) for x in ln.split(",")) for ln in lines[1:]]
    assert rows == [pytest.approx((1.0, 1.0)), pytest.approx((2 ** 0.5, 2.0))]


def test_spectrum_json_echoes_config(two_freq, tmp_path):
    out = str(tmp_path / "s.json")
    assert main(["spectrum", "--input", two_freq, "--out", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["config"]["input"] == two_freq
    assert [r["norm"] for r in rep["spectrum"]] == pytest.approx([1.0, 2.0])


def test_bad_json_reports_position(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"basis": [1.0],\n  "terms": [}')
    assert main(["spectrum", "--input", str(path)]) == 1
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err


def test_missing_file_and_epsilon(two_freq, tmp_path):
    assert main(["spectrum", "--input", str(tmp_path / "nope.json")]) == 1
    assert main(["kernel", "--input", two_freq]) == 1
    assert main(["kernel", "--input", two_freq, "--epsilon", "-0.5"]) == 1
    assert main(["kernel", "--input", two_freq, "--epsilon", "0.5", "--step", "0"]) == 1


def test_unknown_option_is_input_error(two_freq):
    assert main(["spectrum", "--input", two_freq, "--bogus"]) == 1


def test_sap_verify_exit_codes(sap_files, tmp_path):
    good, bad = sap_files
    out = str(tmp_path / "v.json")
    assert main(["sap-verify", "--input", good, "--epsilon", "0.01", "--out", out]) == 0
    assert json.loads(open(out).read())["pass"] is True
    assert main(["sap-verify", "--input", bad, "--epsilon", "0.01", "--out", out]) == 2
    rep = json.loads(open(out).read())
    assert rep["pass"] is False and len(rep["points"]) == 1


def test_kernel_report(two_freq, tmp_path):
    out = str(tmp_path / "k.json")
    code = main(["kernel", "--input", two_freq, "--epsilon", "0.5", "--window", "50", "--out", out])
    rep = json.loads(open(out).read())
    assert code == 0 and rep["pass"]
    assert rep["grid_sup_error"] <= rep["certified_error"] + 1e-12 <= 0.5 + 1e-12


def test_repeated_runs_byte_identical(two_freq, tmp_path):
    out = str(tmp_path / "k.json")
    args = ["kernel", "--input", two_freq, "--epsilon", "0.5", "--window", "20", "--out", out]
    main(args)
    first = open(out, "rb").read()
    main(args)
    assert open(out, "rb").read() == first


def test_pipeline_polynomial_is_deterministic(tmp_path):
    f = _write(tmp_path / "p.json", ASFunction.polynomial([0.5, 1.0]).to_dict())
    out = str(tmp_path / "r.json")
    args = ["pipeline", "--input", f, "--epsilon", "0.1", "--out", out]
    assert main(args) == 0
    first = open(out, "rb").read()
    rep = json.loads(first)
    assert rep["config"]["epsilon"] == 0.1 and "glue" in rep["config"]
    assert "timings" not in first.decode()
    main(args)
    assert open(out, "rb").read() == first


def test_extend_closed_form_gap(tmp_path):
    b = BasisSet((1.0,))
    bottom = TrigPolynomial(b, [(1,)], [1.0])
    f = _write(tmp_path / "e.json", {"bottom": bottom.to_dict(), "points": [[0.3, 1.0], [-2.0, 2.5]],
                                      "method": "quadrature"})
    out = str(tmp_path / "x.json")
    assert main(["extend", "--input", f, "--out", out]) == 0
    rep = json.loads(open(out).read())
    assert rep["closed_form_gap"] is not None and rep["closed_form_gap"] < 1e-6
