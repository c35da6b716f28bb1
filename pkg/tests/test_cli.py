import json
import subprocess
import sys

import pytest

from banach2d.cli import (EXIT_FAILS, EXIT_HYPOTHESIS, EXIT_OK, EXIT_PARSE, EXIT_UNDETERMINED,
                          main)


def run(capsys, *argv):
    code = main(list(argv) + ["--json"])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.mark.parametrize("argv, bj, iso", [
    (["--space", "lp:4:2", "--x", "1,0", "--y", "0,1"], True, True),
    (["--space", "lp:4:2", "--x", "0.8409,0.8409", "--y", "1,-1"], True, True),
    (["--space", "linf:2", "--x", "1,1", "--y", "1,-1"], True, True),
    (["--space", "l2:2", "--x", "1,0", "--y", "1,1"], False, False),
])
def test_check_orth(capsys, argv, bj, iso):
    code, rep = run(capsys, "check-orth", *argv)
    assert code == EXIT_OK
    assert rep["result"]["bj"] is bj and rep["result"]["isosceles"] is iso


@pytest.mark.parametrize("argv, code_want, verdict", [
    (["--kind", "cpp", "--dom", "linf:2", "--cod", "linf:2", "--x", "1,1", "--y", "1,-1"],
     EXIT_FAILS, "CertifiedFails"),
    (["--kind", "weak", "--dom", "linf:2", "--cod", "linf:2", "--x", "1,1", "--y", "1,-1"],
     EXIT_OK, "CertifiedHolds"),
    (["--kind", "cpp", "--space", "l2:2", "--x", "0.6,0.8", "--y=-1,0.3"],
     EXIT_OK, "CertifiedHolds"),
    (["--kind", "mu", "--space", "l2:2", "--x", "1,0", "--y", "1,0", "--z", "0,1", "--w", "0,1",
      "--r", "0.5", "--mu", "1"], EXIT_OK, "CertifiedHolds"),
])
def test_check_cpp(capsys, argv, code_want, verdict):
    code, rep = run(capsys, "check-cpp", *argv)
    assert code == code_want and rep["result"]["verdict"] == verdict


def test_check_cpp_hilbert_mu_one(capsys):
    _, rep = run(capsys, "check-cpp", "--space", "l2:2", "--x", "0.6,0.8", "--y", "0,1")
    assert rep["result"]["mu"] == 1.0


def test_check_cpp_file_input(capsys, tmp_path):
    f = tmp_path / "pair.json"
    f.write_text(json.dumps({"x": [1, 1], "y": [1, -1], "domain": "linf:2",
                             "codomain": "linf:2"}))
    code, rep = run(capsys, "check-cpp", "--kind", "weak", "--file", str(f))
    assert code == EXIT_OK and rep["result"]["verdict"] == "CertifiedHolds"


@pytest.mark.parametrize("argv, code_want, verdict", [
    (["--matrix", "0.8408964152537145,0;0.8408964152537145,0"], EXIT_OK, "Extreme"),
    (["--matrix", "1,0;0,0.5"], EXIT_OK, "NotExtreme"),
    (["--matrix", "2,0;0,1"], EXIT_HYPOTHESIS, None),
    (["--matrix", "1,0;0,1", "--space", "linf:2"], EXIT_HYPOTHESIS, None),
])
def test_classify(capsys, argv, code_want, verdict):
    code, rep = run(capsys, "classify", *argv)
    assert code == code_want
    if verdict:
        assert rep["result"]["classification"]["verdict"] == verdict


def test_classify_with_oracle_reports_agreement(capsys):
    code, rep = run(capsys, "classify", "--matrix", "1,0;0,0.5", "--oracle")
    res = rep["result"]
    assert code == EXIT_OK and res["agreement"] is True and res["witness_verified"] is True
    assert res["oracle"]["verdict"] == "NotExtreme"
    w = res["classification"]["witness"]
    assert w["T1"][1][1] > 0.5 > w["T2"][1][1]


@pytest.mark.parametrize("cmd, argv", [
    ("check-orth", ["--space", "lp:x:2", "--x", "1,0", "--y", "0,1"]),
    ("check-orth", ["--space", "lp:4:2", "--x", "1,a", "--y", "0,1"]),
    ("check-orth", ["--space", "lp:4:2", "--x", "0,0", "--y", "0,1"]),
    ("check-cpp", ["--space", "lp:4:2", "--x", "1,0"]),
    ("classify", ["--matrix", "1,0;0"]),
])
def test_malformed_input_exits_2(capsys, cmd, argv):
    assert main([cmd] + argv) == EXIT_PARSE
    assert "error" in capsys.readouterr().err


def test_undetermined_exit_code_is_distinct():
    assert len({EXIT_OK, EXIT_FAILS, EXIT_PARSE, EXIT_UNDETERMINED, EXIT_HYPOTHESIS}) == 5


def test_verify_theorems_filter(capsys):
    code = main(["verify-theorems", "--only", "example"])
    out = capsys.readouterr().out
    assert code == EXIT_OK and "PASS" in out and "FAIL" not in out


def test_json_byte_identical_across_runs():
    argv = [sys.executable, "-m", "banach2d.cli", "classify", "--matrix", "1,0;0,0.5",
            "--oracle", "--json", "--seed", "3"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["seed"] == 3


def test_timing_is_opt_in(capsys):
    _, rep = run(capsys, "check-orth", "--space", "l2:2", "--x", "1,0", "--y", "0,1")
    assert "elapsed_ms" not in rep
    main(["check-orth", "--space", "l2:2", "--x", "1,0", "--y", "0,1", "--json", "--timing"])
    assert "elapsed_ms" in json.loads(capsys.readouterr().out)
