import csv
import json

import numpy as np
import pytest

from admmcert import PolyhedralSet, SplitProblem, validate
from admmcert.cli import RunManifest, cmd_gen, cmd_solve, main
from admmcert.engine import SolverConfig
from admmcert.problem import problem_from_dict, problem_to_dict


def _write(tmp_path, prob, name="prob.json"):
    path = tmp_path / name
    path.write_text(json.dumps(problem_to_dict(prob)))
    return str(path)


def test_validate_p1(tmp_path, p1, capsys):
    assert main(["validate", _write(tmp_path, p1)]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 4  # structure and assumptions 1, 2, 4; 3 is deferred


def test_validate_non_psd(tmp_path, p1, capsys):
    obj = problem_to_dict(p1)
    obj["f"]["P"] = [[-1.0]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(obj))
    assert main(["validate", str(path)]) == 1
    assert "assumption 1: FAIL" in capsys.readouterr().out


def test_validate_truncated(tmp_path, p1):
    path = tmp_path / "cut.json"
    path.write_text(json.dumps(problem_to_dict(p1))[:25])
    assert main(["validate", str(path)]) == 2


def test_missing_file_and_bad_args(tmp_path):
    assert main(["validate", str(tmp_path / "none.json")]) == 2
    assert main(["solve"]) == 2
    assert main(["frobnicate"]) == 2


def _solve(tmp_path, path, *extra):
    out = tmp_path / "out"
    code = main(["solve", path, "--out", str(out), *extra])
    return code, out


def test_solve_p1_writes_report_and_trace(tmp_path, p1):
    code, out = _solve(tmp_path, _write(tmp_path, p1), "--reference", "oracle", "--certificates", "full")
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "converged"
    assert abs(report["final"]["p"] - 0.5) <= 1e-6
    assert report["reference"]["objective_gap"] <= 1e-6
    with open(out / "trace.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == (
        "k", "r_norm", "p_k", "dual_residual", "V_k", "ineq1_slack",
        "ineq2_slack", "lyap_slack", "inner_product", "dual_gap",
    )
    assert len(rows) - 1 == report["iterations"]
    assert [int(r[0]) for r in rows[1:]] == list(range(1, report["iterations"] + 1))
    for r in rows[1:]:
        for col in ("ineq1_slack", "ineq2_slack"):
            assert float(r[rows[0].index(col)]) >= -1e-8


def test_solve_p2(tmp_path, p2):
    code, out = _solve(tmp_path, _write(tmp_path, p2))
    assert code == 0
    assert abs(json.loads((out / "report.json").read_text())["final"]["p"] - 1.0) <= 1e-6


def test_cheap_mode_leaves_reference_cells_empty(tmp_path, p1):
    code, out = _solve(tmp_path, _write(tmp_path, p1))
    rows = list(csv.reader(open(out / "trace.csv")))
    assert code == 0
    assert rows[1][4] == "" and rows[1][9] == ""
    assert rows[1][8] != ""


def test_full_without_reference_is_usage_error(tmp_path, p1):
    code, _ = _solve(tmp_path, _write(tmp_path, p1), "--certificates", "full")
    assert code == 2


def test_solve_infeasible_exits_one(tmp_path, p1):
    bad = SplitProblem(p1.f, p1.g, p1.A, p1.B, p1.c, Y=PolyhedralSet(1, G=[[1.0], [-1.0]], h=[-1.0, -1.0]))
    code, out = _solve(tmp_path, _write(tmp_path, bad))
    assert code == 1
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "subproblem_error" and report["failed_iteration"] == 0


def test_oracle_command(tmp_path, p1, p2, capsys):
    assert main(["oracle", _write(tmp_path, p1)]) == 0
    ref = json.loads(capsys.readouterr().out)
    assert ref["x_star"] == pytest.approx([1.5]) and ref["lambda_star"] == pytest.approx([-1.0])
    assert ref["p_star"] == pytest.approx(0.5)
    assert main(["oracle", _write(tmp_path, p2, "p2.json")]) == 0
    ref = json.loads(capsys.readouterr().out)
    assert ref["lambda_star"] == pytest.approx([-2.0]) and ref["p_star"] == pytest.approx(1.0)


def test_oracle_over_capacity(tmp_path, p1):
    many = PolyhedralSet(1, G=np.ones((21, 1)), h=np.arange(21.0) + 1)
    prob = SplitProblem(p1.f, p1.g, p1.A, p1.B, p1.c, X=many)
    path = _write(tmp_path, prob)
    assert main(["oracle", path]) == 3
    code, _ = _solve(tmp_path, path, "--reference", "oracle")
    assert code == 3


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen", "random-qp", "--seed", "1", "--out", str(a)]) == 0
    assert main(["gen", "random-qp", "--seed", "1", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_instances_validate(tmp_path):
    path = tmp_path / "g.json"
    for seed in range(100):
        cmd_gen("random-qp", seed, str(path))
        assert validate(problem_from_dict(json.loads(path.read_text()))).ok


def test_gen_consensus_structure(tmp_path):
    path = tmp_path / "c.json"
    assert main(["gen", "consensus", "--seed", "3", "--N", "2", "--n", "2", "--out", str(path)]) == 0
    prob = problem_from_dict(json.loads(path.read_text()))
    np.testing.assert_array_equal(prob.B, np.vstack([-np.eye(2), -np.eye(2)]))
    np.testing.assert_array_equal(prob.A, np.eye(4))


def test_cmd_solve_with_manifest(tmp_path, p1):
    m = RunManifest(_write(tmp_path, p1), SolverConfig(certificate_mode="off"), str(tmp_path / "m"))
    assert cmd_solve(m) == 0
    rows = (tmp_path / "m" / "trace.csv").read_text().splitlines()
    assert len(rows) == 1  # header only when certificates are off
