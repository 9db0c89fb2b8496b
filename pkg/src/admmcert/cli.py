"""Command-line front end: ``admmcert {validate,solve,oracle,gen}``.

Exit codes: 0 success, 1 assumption failure or unsuccessful solve,
2 malformed input or usage error, 3 oracle over capacity.
"""
import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass

import numpy as np

from . import generate
from .certificates import CertificateRecord
from .engine import CERTIFICATE_MODES, SolverConfig, solve
from .errors import AdmmError, CapacityError, DimensionError, InfeasibleError, UnboundedError
from .oracle import solve_split_bruteforce
from .problem import problem_from_dict, problem_to_dict, validate

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3


@dataclass(frozen=True)
class RunManifest:
    problem_path: str
    config: SolverConfig
    output_path: str
    reference_mode: str = "none"
    seed: int = 0


class InputError(Exception):
    pass


def load_problem(path):
    try:
        with open(path) as fh:
            return problem_from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, DimensionError, ValueError) as exc:
        raise InputError(f"cannot read problem {path}: {exc}") from exc


def atomic_write(path, text):
    path = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trace_csv(trace):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CertificateRecord.CSV_COLUMNS)
    for rec in trace:
        w.writerow(rec.csv_row())
    return buf.getvalue()


def _floats(v):
    return None if v is None else [float(t) for t in np.asarray(v).ravel()]


def _max_abs(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)), initial=0.0))


def cmd_validate(problem_path, out=None):
    out = out or sys.stdout
    try:
        prob = load_problem(problem_path)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = validate(prob)
    for line in report.lines():
        print(line, file=out)
    return EXIT_OK if report.ok else EXIT_FAIL


def run_solve(manifest):
    """Run one solve and return ``(exit_code, report_dict, trace)``."""
    prob = load_problem(manifest.problem_path)
    ref = None
    if manifest.reference_mode == "oracle":
        try:
            ref = solve_split_bruteforce(prob)
        except CapacityError as exc:
            return EXIT_CAPACITY, {"status": "oracle_capacity", "message": str(exc)}, []
        except (InfeasibleError, UnboundedError) as exc:
            return EXIT_FAIL, {"status": "oracle_failed", "message": str(exc)}, []
    result = solve(prob, manifest.config, reference=ref)
    report = {
        "status": result.status,
        "iterations": result.iterations,
        "failed_iteration": result.failed_iteration,
        "message": result.message,
        "config": asdict(manifest.config),
        "seed": manifest.seed,
        "final": result.final.to_dict(),
    }
    if ref is not None:
        comparison = {
            "p_star": float(ref.p_star),
            "x_star": _floats(ref.x_star),
            "y_star": _floats(ref.y_star),
            "lambda_star": _floats(ref.lambda_star),
            "unique": bool(ref.unique),
        }
        if result.final.x is not None:
            comparison.update(
                objective_gap=abs(float(result.final.p) - float(ref.p_star)),
                x_error=_max_abs(result.final.x, ref.x_star),
                y_error=_max_abs(result.final.y, ref.y_star),
                lambda_error=_max_abs(result.final.lam, ref.lambda_star),
            )
        report["reference"] = comparison
    code = EXIT_OK if result.converged else EXIT_FAIL
    return code, report, result.trace


def cmd_solve(manifest):
    try:
        code, report, trace = run_solve(manifest)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = manifest.output_path
    os.makedirs(out, exist_ok=True)
    atomic_write(os.path.join(out, "trace.csv"), trace_csv(trace))
    atomic_write(os.path.join(out, "report.json"), json.dumps(report, indent=2) + "\n")
    print(f"{report['status']} after {report.get('iterations', 0)} iterations")
    return code


def cmd_oracle(problem_path, out=None):
    out = out or sys.stdout
    try:
        prob = load_problem(problem_path)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        ref = solve_split_bruteforce(prob)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InfeasibleError, UnboundedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(json.dumps(ref.to_dict(), indent=2), file=out)
    return EXIT_OK


def cmd_gen(kind, seed, out_path, **size):
    rng = np.random.default_rng(seed)
    size = {k: v for k, v in size.items() if v is not None}
    if kind == "random-qp":
        prob = generate.random_split_problem(rng, **size)
    elif kind == "consensus":
        prob = generate.random_consensus_problem(rng, **size)
    else:
        raise InputError(f"unknown instance kind {kind!r}")
    atomic_write(out_path, json.dumps(problem_to_dict(prob), indent=1) + "\n")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="admmcert", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check the convergence hypotheses")
    v.add_argument("problem")

    s = sub.add_parser("solve", help="run ADMM and write trace.csv and report.json")
    s.add_argument("problem")
    s.add_argument("--rho", type=float, default=1.0)
    s.add_argument("--max-iters", type=int, default=10_000)
    s.add_argument("--eps-primal", type=float, default=1e-8)
    s.add_argument("--eps-dual", type=float, default=1e-8)
    s.add_argument("--certificates", choices=CERTIFICATE_MODES, default="cheap")
    s.add_argument("--reference", choices=("none", "oracle"), default="none")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=".")

    o = sub.add_parser("oracle", help="print the brute-force reference solution")
    o.add_argument("problem")

    g = sub.add_parser("gen", help="write a seeded random instance")
    g.add_argument("kind", choices=("random-qp", "consensus"))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--n1", type=int)
    g.add_argument("--n2", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--ineq-x", type=int)
    g.add_argument("--ineq-y", type=int)
    g.add_argument("--N", type=int, dest="N")
    g.add_argument("--n", type=int)
    g.add_argument("--ineq", type=int)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "validate":
            return cmd_validate(args.problem)
        if args.command == "oracle":
            return cmd_oracle(args.problem)
        if args.command == "solve":
            if args.certificates == "full" and args.reference != "oracle":
                print("error: --certificates full needs --reference oracle", file=sys.stderr)
                return EXIT_INPUT
            cfg = SolverConfig(
                rho=args.rho,
                max_iters=args.max_iters,
                eps_primal=args.eps_primal,
                eps_dual=args.eps_dual,
                certificate_mode=args.certificates,
            )
            return cmd_solve(RunManifest(args.problem, cfg, args.out, args.reference, args.seed))
        if args.kind == "random-qp":
            size = dict(n1=args.n1, n2=args.n2, m=args.m, ineq_x=args.ineq_x, ineq_y=args.ineq_y)
        else:
            size = dict(N=args.N, n=args.n, n_ineq=args.ineq)
        return cmd_gen(args.kind, args.seed, args.out, **size)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AdmmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
