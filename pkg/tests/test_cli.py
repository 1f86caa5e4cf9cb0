import json
import os
import subprocess
import sys

import pytest

from simplex_approx.cli import build_parser, main, parse_rational, parse_real
from simplex_approx.expansion import CoeffTable


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_numbers():
    assert parse_real("-1/2") == -0.5
    assert parse_real("0.25") == 0.25
    assert str(parse_rational("6/4")) == "3/2"
    with pytest.raises(Exception):
        parse_rational("2/0")


def test_orthogonality_passes(capsys):
    code, out, _ = run(capsys, "orthogonality", "--n-max", "8", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["pass"] and doc["schema"] == "simplex-approx/orthogonality"
    assert doc["max_offdiag_abs"] <= 1e-10 and doc["max_diag_rel"] <= 1e-10


def test_orthogonality_singular_weight_with_negative_rationals(capsys):
    code, out, _ = run(capsys, "orthogonality", "--alpha", "-1/2", "--beta=-1/2", "--gamma", "-0.5")
    assert code == 0
    assert out.splitlines()[0] == "# simplex-approx orthogonality schema v1"


def test_orthogonality_degree_zero(capsys):
    code, out, _ = run(capsys, "orthogonality", "--n-max", "0", "--format", "json")
    assert code == 0 and json.loads(out)["max_offdiag_abs"] == 0.0


@pytest.mark.parametrize("argv", [
    ["orthogonality", "--alpha", "-1"],
    ["det-verify", "--s1", "2/0", "--s2", "1"],
    ["orthogonality", "--bogus"],
    ["approx", "--experiment", "theorem31"],
    ["approx", "--experiment", "theorem31", "--f", "exp_x2y", "--r", "2", "--n-min", "3"],
    ["coeffs", "--f", "no_such_function"],
    ["approx", "--experiment", "theorem31", "--f", "mode:1,3", "--n-max", "5", "--dps", "40"],
    ["approx", "--experiment", "theorem31", "--f", "exp_x2y", "--n-max", "5", "--dps", "5"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_det_verify_explicit_case(capsys):
    code, out, _ = run(capsys, "det-verify", "--r1", "1", "--r2", "1", "--s1", "2", "--s2", "3")
    header, rec = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and header["records"] == 1
    assert rec["lhs"] == rec["rhs"] == "-1/6" and rec["equal"]


def test_det_verify_family_sweep(capsys):
    code, out, _ = run(capsys, "det-verify", "--suite", "family", "--r-max", "3", "--seeds", "10")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 1 + 9 * 10
    assert all(json.loads(line)["equal"] for line in lines[1:])


def test_det_verify_is_deterministic(capsys):
    _, a, _ = run(capsys, "det-verify", "--suite", "sum", "--r-max", "2", "--seeds", "3", "--seed", "9")
    _, b, _ = run(capsys, "det-verify", "--suite", "sum", "--r-max", "2", "--seeds", "3", "--seed", "9")
    assert a == b


def test_diffrel_passes(capsys):
    code, out, _ = run(capsys, "diffrel", "--n-max", "4", "--points", "10", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["max_residual"] <= 1e-9 and doc["max_fd_gap"] <= 1e-7


def test_approx_main_estimate(capsys):
    code, out, _ = run(capsys, "approx", "--experiment", "theorem31", "--f", "exp_x2y", "--r", "1",
                       "--n-min", "6", "--n-max", "24")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "# simplex-approx approx/theorem31 schema v1"
    assert "trend_pass=True" in lines[1]
    assert lines[2] == "n,lhs,rhs,ratio,flags"
    assert len(lines) == 3 + 19


def test_approx_main_estimate_extended_precision(capsys):
    code, out, _ = run(capsys, "approx", "--experiment", "theorem31", "--f", "cos_pi_sum", "--r", "1",
                       "--n-min", "20", "--n-max", "23", "--dps", "50", "--format", "json")
    rep = json.loads(out)["reports"][0]
    assert code == 0 and rep["params"]["dps"] == 50
    assert all(not row["flags"] and 0 < row["ratio"] < 1 for row in rep["rows"])


def test_approx_bernstein_constant(capsys):
    code, out, _ = run(capsys, "approx", "--experiment", "bernstein", "--f", "const", "--n-max", "3")
    rows = out.splitlines()[3:]
    assert code == 0 and all(row.split(",")[3] == "0" for row in rows)


def test_approx_endecay_polynomial(capsys):
    code, out, _ = run(capsys, "approx", "--experiment", "endecay", "--f", "poly5", "--n-min", "1",
                       "--n-max", "10", "--format", "json")
    (rep,) = json.loads(out)["reports"]
    assert code == 0
    for row in rep["rows"]:
        assert (row["lhs"] == 0) == (row["n"] >= 5)


@pytest.mark.parametrize("exp", ["corollary", "jackson", "inverse", "kequiv"])
def test_approx_other_experiments(exp, capsys):
    code, out, _ = run(capsys, "approx", "--experiment", exp, "--f", "exp_xy", "--n-max", "12",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["experiment"] == exp and doc["reports"]


def test_approx_bernstein_ensemble(capsys):
    code, out, _ = run(capsys, "approx", "--experiment", "bernstein", "--r", "2", "--direction", "3",
                       "--n-max", "10", "--samples", "20")
    assert code == 0 and "trend_pass=True" in out.splitlines()[1]


def test_coeffs_roundtrip(tmp_path, capsys):
    path = tmp_path / "coeffs.json"
    code, _, _ = run(capsys, "coeffs", "--f", "exp_x2y", "--n-max", "6", "--alpha", "1/2",
                     "--format", "json", "--out", str(path))
    text = path.read_text()
    doc = json.loads(text)
    tab = CoeffTable.from_json(text)
    assert code == 0 and doc["version"] == 1 and tab.max_degree == 6 and tab.params.alpha == 0.5
    assert not [p for p in os.listdir(tmp_path) if p != "coeffs.json"]


def test_coeffs_csv(capsys):
    code, out, _ = run(capsys, "coeffs", "--f", "mode:1,2", "--n-max", "2")
    lines = out.splitlines()
    assert code == 0 and lines[1] == "k,m,coefficient,norm_sq" and len(lines) == 2 + 6


def test_every_subcommand_has_help():
    parser = build_parser()
    for name in ("orthogonality", "diffrel", "det-verify", "approx", "coeffs"):
        with pytest.raises(SystemExit) as exc:
            parser.parse_args([name, "--help"])
        assert exc.value.code == 0


def test_console_entry_point_and_module():
    for cmd in (["simplex-approx"], [sys.executable, "-m", "simplex_approx"]):
        proc = subprocess.run(cmd + ["det-verify", "--r1", "2", "--r2", "1", "--s1", "1/2", "--s2", "3"],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0, proc.stderr
        assert json.loads(proc.stdout.splitlines()[1])["equal"]
