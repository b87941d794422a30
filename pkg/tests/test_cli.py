import json

import numpy as np
import pytest

from jordan_minors import cli


@pytest.fixture
def zfile(tmp_path):
    def make(matrix, name="z.json"):
        path = tmp_path / name
        path.write_text(json.dumps(matrix))
        return str(path)

    return make


def run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_minor_worked_examples(capsys, zfile):
    z = zfile([[1, 2], [3, 4]])
    code, out, _ = run(capsys, ["minor", "--z", z, "--rows", "1", "--cols", "2"])
    assert code == 0
    assert out.splitlines() == ["generalized 2", "classical   2", "difference  0.000e+00"]
    code, out, _ = run(capsys, ["minor", "--z", z, "--rows", "1,2", "--cols", "1,2"])
    assert code == 0 and "generalized -2" in out and "classical   -2" in out
    code, out, _ = run(capsys, ["minor", "--z", z])
    assert code == 0 and "generalized 1" in out and "classical   1" in out


def test_minor_json_and_complex_input(capsys, zfile):
    z = zfile({"rows": 2, "cols": 2, "re": [[1, 0], [0, 1]], "im": [[0, 1], [1, 0]]})
    code, out, _ = run(capsys, ["minor", "--z", z, "--rows", "1,2", "--cols", "1,2", "--format", "json"])
    report = json.loads(out)
    assert code == 0
    assert report["generalized"] == pytest.approx({"re": 2.0, "im": 0.0})


@pytest.mark.parametrize(
    "argv",
    [
        ["minor", "--rows", "3", "--cols", "1"],
        ["minor", "--rows", "1", "--cols", "1,2"],
        ["minor", "--rows", "x", "--cols", "1"],
        ["minor", "--rows", "2,1", "--cols", "1,2"],
    ],
)
def test_minor_usage_errors(capsys, zfile, argv):
    code, _, err = run(capsys, argv[:1] + ["--z", zfile([[1, 2], [3, 4]])] + argv[1:])
    assert code == 2 and err


def test_missing_or_bad_file(capsys, tmp_path):
    assert run(capsys, ["minor", "--z", str(tmp_path / "missing.json")])[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, ["growth", "--z", str(bad), "--m", "1"])[0] == 2


def test_unknown_command_and_bad_samples(capsys):
    assert run(capsys, ["frobnicate"])[0] == 2
    assert run(capsys, ["identities", "--samples", "0"])[0] == 2
    assert run(capsys, ["identities", "--tol", "nosuch=1"])[0] == 2


def test_maximize_diagonal(capsys, zfile):
    code, out, _ = run(capsys, ["maximize", "--z", zfile([[3, 0], [0, 1]]), "--k", "1"])
    assert code == 0
    lines = out.splitlines()
    assert lines[:3] == ["value 3.000000", "bound 3.000000", "ratio 1.000000"]


def test_maximize_csv_trace(capsys, zfile):
    code, out, _ = run(capsys, ["maximize", "--z", zfile([[1, 2, 0], [3, 4, 1]]), "--k", "2", "--format", "csv", "--restarts", "2"])
    rows = out.splitlines()
    assert code == 0 and rows[0] == "restart,iter,f,grad_norm,p1_residual" and len(rows) > 2


def test_maximize_symmetric_file(capsys, zfile):
    z = zfile({"rows": 2, "cols": 2, "re": [[2, 0.5], [0.5, 1]], "im": [[0, 1], [1, 0]]})
    code, out, _ = run(capsys, ["maximize", "--z", z, "--k", "1", "--pair", "sym-complex", "--format", "json"])
    report = json.loads(out)
    assert code == 0 and report["ratio"] == pytest.approx(1, abs=1e-6)


def test_growth_examples(capsys, zfile):
    code, out, _ = run(capsys, ["growth", "--z", zfile([[0, 0], [0, 0]]), "--m", "1,0"])
    assert code == 0 and out.splitlines() == ["bound 0.000000", "value 0.000000", "pass"]
    code, out, _ = run(capsys, ["growth", "--z", zfile([[3, 0], [0, 1]]), "--m", "2,1", "--format", "json"])
    report = json.loads(out)
    assert code == 0 and report["bound"] == pytest.approx(9) and report["aligned_ratio"] == pytest.approx(1)
    assert run(capsys, ["growth", "--z", zfile([[3, 0], [0, 1]]), "--m", "1,2"])[0] == 2


def test_identities_default_passes(capsys):
    code, out, _ = run(capsys, ["identities", "--samples", "10"])
    report = json.loads(out)
    assert code == 0 and report["passed"]
    assert all(s["max_residual"] < 1e-8 for s in report["suites"] if not s["negative"])


def test_identities_injected_fault_flags_minor_suite(capsys):
    code, out, _ = run(capsys, ["identities", "--samples", "3", "--inject-fault", "pair-determinant-sign"])
    report = json.loads(out)
    assert code == 1
    failed = {s["name"]: s for s in report["suites"] if not s["passed"]}
    assert "minor-vs-submatrix" in failed
    replay = failed["minor-vs-submatrix"]["failure"]
    assert {"descriptor", "seed", "sample", "inputs"} <= set(replay)


def test_single_sample_report_is_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        assert cli.main(["identities", "--samples", "1", "--seed", "3", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_verify_rect_real(capsys):
    code, out, _ = run(capsys, ["verify", "--pair", "rect-real", "--r", "3", "--s", "4", "--samples", "20", "--tripotents", "10"])
    assert code == 0 and json.loads(out)["suites"][0]["passed"]


def test_derivative_csv(capsys):
    code, out, _ = run(capsys, ["derivative", "--pair", "sym-complex", "--n", "3", "--samples", "10", "--format", "csv"])
    assert code == 0 and out.splitlines()[1].startswith("derivative-vs-finite-differences,sym-complex,10,")


def test_tolerance_override_can_fail(capsys):
    code, out, _ = run(capsys, ["derivative", "--samples", "3", "--tol", "derivative-vs-finite-differences=1e-30"])
    assert code == 1


def test_bad_descriptor_is_usage_error(capsys):
    assert run(capsys, ["identities", "--pair", "rect-real", "--r", "0", "--s", "2"])[0] == 2
