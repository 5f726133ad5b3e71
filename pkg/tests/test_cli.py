import io
import math
from pathlib import Path

import numpy as np
import pytest

from basicfactor.cli import main
from basicfactor.report import Report

FIXTURES = Path(__file__).parent / "fixtures"

# (fixture, command, extra arguments)
GOOD = [
    ("pauli_x.mat", "factor", []),
    ("pauli_y.mat", "factor", []),
    ("pauli_z.mat", "factor", []),
    ("hadamard.mat", "factor", []),
    ("hadamard_unnormalized.mat", "factor", []),
    ("phase_pi5.mat", "factor", []),
    ("rotation_pi4.mat", "factor", []),
    ("rotation_pi3.mat", "power", ["--m", "3"]),
    ("swap.mat", "factor", []),
    ("cnot.mat", "roots", ["--n", "2"]),
    ("bell.mat", "factor", []),
    ("sqrt_not.mat", "classify", []),
    ("pauli_x.mat", "roots", ["--n", "2"]),
    ("swap.mat", "roots", ["--n", "2"]),
    ("hadamard4.mat", "pinv", []),
    ("half_projector.mat", "pinv", []),
    ("idem_example1.mat", "idem-decompose", []),
    ("idem_example2.mat", "idem-decompose", []),
    ("density_mixed.mat", "density", []),
    ("frame_example.mat", "build-frame", []),
]


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def verify(tmp_path, report_text, name="report.txt"):
    path = tmp_path / name
    path.write_text(report_text)
    return run("verify", "--input", str(path))


@pytest.mark.parametrize("fmt", ["text", "tsv"])
@pytest.mark.parametrize("fixture, command, extra", GOOD, ids=[f"{c}-{f}" for f, c, _ in GOOD])
def test_fixture_round_trip(tmp_path, fixture, command, extra, fmt):
    code, out, err = run(command, "--input", str(FIXTURES / fixture), "--format", fmt, *extra)
    assert code == 0, err
    assert Report.parse(out).command == command
    vcode, vout, verr = verify(tmp_path, out)
    assert vcode == 0, vout + verr
    lines = [l for l in vout.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert lines and all(l.startswith("PASS") for l in lines)


@pytest.mark.parametrize(
    "gate, theta",
    [("hadamard", None), ("pauli_y", None), ("phase", math.pi / 5), ("rotation", math.pi / 4),
     ("sqrt_not", None), ("sqrt_swap", None), ("bell", None), ("cnot", None)],
)
def test_gate_round_trip(tmp_path, gate, theta):
    argv = ["gate", "--gate", gate] + (["--theta", str(theta)] if theta is not None else [])
    code, out, err = run(*argv)
    assert code == 0, err
    vcode, vout, _ = verify(tmp_path, out)
    assert vcode == 0, vout


@pytest.mark.parametrize(
    "fixture, command, status",
    [
        ("bad_header.mat", "factor", 1),
        ("bad_token.mat", "factor", 1),
        ("count_mismatch.mat", "factor", 1),
        ("jordan.mat", "factor", 2),
        ("not_idempotent.mat", "idem-decompose", 2),
        ("pauli_x.mat", "density", 2),
        ("pauli_x.mat", "build-frame", 2),
    ],
)
def test_malformed_exit_codes(fixture, command, status):
    code, out, err = run(command, "--input", str(FIXTURES / fixture))
    assert code == status
    assert out == "" and err.startswith("error:")


def test_bad_token_message_has_position():
    _, _, err = run("factor", "--input", str(FIXTURES / "bad_token.mat"))
    assert "BadToken" in err and "3" in err


def test_missing_file():
    code, _, err = run("factor", "--input", "/nonexistent/file.mat")
    assert code == 1 and "error" in err


def test_missing_input_flag():
    assert run("factor")[0] == 1


def test_gate_errors():
    assert run("gate", "--gate", "toffoli")[0] == 2
    assert run("gate", "--gate", "phase")[0] == 2


def test_too_many_roots(tmp_path):
    path = tmp_path / "diag.mat"
    path.write_text("4 4\n2 0 0 0\n0 3 0 0\n0 0 4 0\n0 0 0 5\n")
    code, _, err = run("roots", "--input", str(path), "--n", "3", "--max-roots", "10")
    assert code == 2 and "81" in err


def test_bad_tolerances():
    assert run("factor", "--input", str(FIXTURES / "pauli_x.mat"), "--tol-struct", "1e-3", "--tol-cluster", "1e-5")[0] == 2


def test_deterministic_output():
    argv = ("roots", "--input", str(FIXTURES / "cnot.mat"), "--n", "2")
    assert run(*argv)[1] == run(*argv)[1]


def test_factor_report_contents():
    _, out, _ = run("factor", "--input", str(FIXTURES / "pauli_x.mat"))
    rep = Report.parse(out)
    assert rep.scalar("factor_count") == ["1"]
    F = rep.factorization()
    assert F.eigenvalues == [-1]
    np.testing.assert_allclose(F.factors[0].idempotent.matrix, 0.5 * np.array([[1, -1], [-1, 1]]), atol=1e-15)


def test_tampered_report_fails_verify(tmp_path):
    _, out, _ = run("factor", "--input", str(FIXTURES / "pauli_z.mat"))
    tampered = out.replace("input 1 0 0 -1 0", "input 1 0 0 -2 0")
    assert tampered != out
    code, vout, _ = verify(tmp_path, tampered)
    assert code == 2
    assert any(l.startswith("FAIL") for l in vout.splitlines())


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "basicfactor", "classify", "--input", str(FIXTURES / "hadamard.mat")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "flag hermitian 1" in proc.stdout
