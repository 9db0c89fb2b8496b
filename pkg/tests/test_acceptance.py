"""Acceptance criteria, one test and one printed PASS/FAIL line each.

Instances for criteria 1 to 6 are the 200 files written by ``admmcert gen
random-qp --seed s`` for s = 0..199.
"""
import json
import time

import numpy as np
import pytest

from admmcert import SolverConfig, solve, solve_qp, solve_qp_bruteforce, solve_split_bruteforce, step
from admmcert.certificates import check_dual_attainment, descent_partial_sums, hat_lambda, lyapunov
from admmcert.cli import RunManifest, cmd_gen, cmd_solve, cmd_validate
from admmcert.engine import initial_state
from admmcert.generate import random_qp, random_split_problem, rank_deficient_b_problem
from admmcert.problem import problem_from_dict, problem_to_dict

from .conftest import ACCEPTANCE_LINES, make_p1

N_INSTANCES = 200
TOL_SLACK = 1e-8


def report(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def instance_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("instances")
    for seed in range(N_INSTANCES):
        cmd_gen("random-qp", seed, str(d / f"{seed}.json"))
    return d


@pytest.fixture(scope="module")
def instances(instance_dir):
    out = []
    for seed in range(N_INSTANCES):
        prob = problem_from_dict(json.loads((instance_dir / f"{seed}.json").read_text()))
        out.append((prob, solve_split_bruteforce(prob)))
    return out


@pytest.fixture(scope="module")
def full_runs(instances):
    cfg = SolverConfig(rho=1.0, max_iters=20000, eps_primal=1e-8, eps_dual=1e-8, certificate_mode="full")
    return [solve(prob, cfg, reference=ref) for prob, ref in instances]


def test_criterion_01_oracle_equivalence(instance_dir, tmp_path):
    cfg = SolverConfig(rho=1.0, max_iters=20000, eps_primal=1e-8, eps_dual=1e-8, certificate_mode="off")
    t0 = time.perf_counter()
    codes, p_gap, xy_err, n_unique = [], 0.0, 0.0, 0
    for seed in range(N_INSTANCES):
        out = tmp_path / str(seed)
        codes.append(cmd_solve(RunManifest(str(instance_dir / f"{seed}.json"), cfg, str(out), "oracle", seed)))
        rep = json.loads((out / "report.json").read_text())
        ref = rep["reference"]
        p_gap = max(p_gap, ref["objective_gap"])
        if ref["unique"]:
            n_unique += 1
            xy_err = max(xy_err, ref["x_error"], ref["y_error"])
    elapsed = time.perf_counter() - t0
    converged = sum(c == 0 for c in codes)
    ok = converged == N_INSTANCES and p_gap <= 1e-6 and xy_err <= 1e-5
    report(1, ok, f"{converged}/{N_INSTANCES} converged, max |p - p*| = {p_gap:.2e} (<= 1e-6), "
                  f"max (x, y) error on {n_unique} unique = {xy_err:.2e} (<= 1e-5), {elapsed:.0f} s")


def test_criterion_02_lyapunov_descent(instances, full_runs):
    # covered transitions k -> k+1 with k >= 1; see the first-transition test below
    worst_slack, worst_rise = np.inf, -np.inf
    for (prob, ref), rep in zip(instances, full_runs):
        slacks = [r.lyapunov_descent_slack for r in rep.trace if r.prev_from_update]
        V = [r.V_k for r in rep.trace]
        worst_slack = min(worst_slack, min(slacks, default=np.inf))
        worst_rise = max(worst_rise, np.diff(V).max(initial=-np.inf))
    ok = worst_slack >= -TOL_SLACK and worst_rise <= TOL_SLACK
    report(2, ok, f"min lyap_slack over k >= 1 = {worst_slack:.2e} (>= -1e-8), "
                  f"max V^(k+1) - V^k = {worst_rise:.2e}")


def test_criterion_02_first_transition_weak_bound(instances, full_runs):
    # from an arbitrary start only V^0 - V^1 >= rho |r^1 - B(y^1 - y^0)|^2 is available
    worst = np.inf
    for (prob, ref), rep in zip(instances, full_runs):
        s0, s1 = rep.history[0], rep.history[1]
        d = s1.r - prob.B @ (s1.y - s0.y)
        worst = min(worst, lyapunov(prob, 1.0, s0, ref) - lyapunov(prob, 1.0, s1, ref) - d @ d)
    report("2b", worst >= -TOL_SLACK, f"first transition, min V^0 - V^1 - |r^1 - B dy^1|^2 = {worst:.2e}")


@pytest.mark.xfail(strict=True, reason="descent at k = 0 needs y^0 to be a y-update output")
def test_criterion_02_literal_first_transition(instances, full_runs):
    bad = sum(rep.trace[0].lyapunov_descent_slack < -TOL_SLACK for rep in full_runs)
    print(f"instances with lyap_slack < -1e-8 on the first transition: {bad}/{N_INSTANCES}")
    assert bad == 0


def test_criterion_03_summability(instances, full_runs):
    worst = -np.inf
    for (prob, ref), rep in zip(instances, full_runs):
        sums = descent_partial_sums(prob, 1.0, rep.history[1:])
        if sums.size:
            worst = max(worst, sums.max() - lyapunov(prob, 1.0, rep.history[1], ref))
    report(3, worst <= 1e-6, f"max over runs of sum_(k>=1) - V^1 = {worst:.2e} (<= 1e-6)")


@pytest.mark.xfail(strict=True, reason="the bound by V^0 relies on descent at k = 0")
def test_criterion_03_literal_bound_by_v0(instances, full_runs):
    bad = 0
    for (prob, ref), rep in zip(instances, full_runs):
        total = descent_partial_sums(prob, 1.0, rep.history)[-1]
        bad += total > lyapunov(prob, 1.0, rep.history[0], ref) + 1e-6
    print(f"runs with sum_(k>=0) > V^0 + 1e-6: {bad}/{N_INSTANCES}")
    assert bad == 0


def test_criterion_04_sandwich(full_runs):
    lo1 = min(r.ineq1_slack for rep in full_runs for r in rep.trace)
    lo2 = min(r.ineq2_slack for rep in full_runs for r in rep.trace)
    ok = lo1 >= -TOL_SLACK and lo2 >= -TOL_SLACK
    report(4, ok, f"min ineq1_slack = {lo1:.2e}, min ineq2_slack = {lo2:.2e} (>= -1e-8)")


def test_criterion_05_inner_product(full_runs):
    hi = max(r.inner_product_value for rep in full_runs for r in rep.trace if r.prev_from_update)
    report(5, hi <= TOL_SLACK, f"max (B dy)'r over k >= 1 = {hi:.2e} (<= 1e-8)")


@pytest.mark.xfail(strict=True, reason="the sign condition at k = 0 needs y^0 to be a y-update output")
def test_criterion_05_literal_first_transition(full_runs):
    p1 = make_p1()
    first = solve(p1, SolverConfig(max_iters=1)).trace[0].inner_product_value
    bad = sum(rep.trace[0].inner_product_value > TOL_SLACK for rep in full_runs)
    print(f"P1 first transition (B dy)'r = {first:.6f} (112/81 = {112 / 81:.6f}); "
          f"random instances violating at k = 0: {bad}/{N_INSTANCES}")
    assert first <= TOL_SLACK and bad == 0


def test_criterion_06_dual_optimality(full_runs):
    done = [rep for rep in full_runs if rep.converged]
    gap = max(rep.trace[-1].dual_gap for rep in done)
    abs_gap = max(abs(rep.trace[-1].dual_gap) for rep in done)
    shift = max(np.linalg.norm(rep.trace[-1].hat_lambda - rep.final.lam) for rep in done)
    ok = len(done) == len(full_runs) and gap <= 1e-5 and shift <= 1e-6
    report(6, ok, f"{len(done)} converged runs, max final dual_gap = {gap:.2e} (|.| max {abs_gap:.2e}, <= 1e-5), "
                  f"max final |hat_lambda - lambda| = {shift:.2e} (<= 1e-6)")


def test_criterion_07_dual_attainment():
    rng = np.random.default_rng(7007)
    worst, count = -np.inf, 0
    for i in range(20):
        prob = random_split_problem(rng)
        hist = solve(prob, SolverConfig(max_iters=200)).history[1:]
        for k in rng.choice(len(hist), size=min(len(hist), 3 if i < 10 else 2), replace=False):
            s = hist[k]
            fs, gs = check_dual_attainment(prob, s, hat_lambda(prob, 1.0, s))
            worst = max(worst, fs, gs)
            count += 1
    report(7, count == 50 and worst <= 1e-8, f"{count} iterates on 20 instances, max slack = {worst:.2e} (<= 1e-8)")


def test_criterion_08_fixed_point():
    rng = np.random.default_rng(8008)
    worst = 0.0
    for _ in range(50):
        prob = random_split_problem(rng)
        ref = solve_split_bruteforce(prob)
        s = step(prob, SolverConfig(), initial_state(prob, ref.y_star, ref.lambda_star))
        move = np.concatenate([s.x - ref.x_star, s.y - ref.y_star, s.lam - ref.lambda_star])
        worst = max(worst, np.abs(move).max())
    report(8, worst <= 1e-7, f"50 instances, max coordinate move = {worst:.2e} (<= 1e-7)")


def test_criterion_09_hand_trace():
    p1 = make_p1()
    ref = solve_split_bruteforce(p1)
    s0 = initial_state(p1)
    s1 = step(p1, SolverConfig(rho=1.0), s0)
    err = max(
        abs(s1.x[0] - 2 / 3),
        abs(s1.y[0] - 14 / 9),
        abs(s1.lam[0] + 8 / 9),
        abs(lyapunov(p1, 1.0, s0, ref) - 3.25),
        abs(lyapunov(p1, 1.0, s1, ref) - 5 / 324),
    )
    report(9, err <= 1e-12, f"max deviation from (2/3, 14/9, -8/9), V^0 = 3.25, V^1 = 5/324: {err:.2e}")


def test_criterion_10_rank_deficient_b(tmp_path, capsys):
    rng = np.random.default_rng(1010)
    path = tmp_path / "rd.json"
    rejected, worst_r, worst_p, converged = 0, 0.0, 0.0, 0
    for _ in range(20):
        prob = rank_deficient_b_problem(rng)
        path.write_text(json.dumps(problem_to_dict(prob)))
        code = cmd_validate(str(path))
        out = capsys.readouterr().out
        rejected += code == 1 and "assumption 4: FAIL" in out and "B is not full column rank" in out
        ref = solve_split_bruteforce(prob)
        rep = solve(prob, SolverConfig(max_iters=20000, certificate_mode="off"))
        converged += rep.converged
        worst_r = max(worst_r, np.linalg.norm(rep.final.r))
        worst_p = max(worst_p, abs(rep.final.p - ref.p_star))
    ok = rejected == 20 and worst_r <= 1e-8 and worst_p <= 1e-6
    report(10, ok, f"validate rejected {rejected}/20 with the rank message; forced solves: max |r| = {worst_r:.2e}, "
                   f"max |p - p*| = {worst_p:.2e} ({converged}/20 met the stopping rule)")


def test_criterion_11_subsolver_oracle():
    rng = np.random.default_rng(1111)
    worst = 0.0
    for _ in range(500):
        sub = random_qp(rng)
        worst = max(worst, np.abs(solve_qp(sub).z - solve_qp_bruteforce(sub).z).max())
    report(11, worst <= 1e-7, f"500 QPs, max coordinate difference = {worst:.2e} (<= 1e-7)")
