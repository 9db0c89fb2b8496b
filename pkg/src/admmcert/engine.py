"""The two-block ADMM iteration with optional per-iteration certificates."""
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, InfeasibleError, ParameterError, SingularSystemError
from .problem import evaluate_objective, primal_residual
from .subsolver import assemble_x_subproblem, assemble_y_subproblem, solve_qp

CERTIFICATE_MODES = ("off", "cheap", "full")

CONVERGED = "converged"
MAX_ITERS = "max_iters"
SUBPROBLEM_ERROR = "subproblem_error"


@dataclass(frozen=True)
class SolverConfig:
    rho: float = 1.0
    max_iters: int = 10_000
    eps_primal: float = 1e-8
    eps_dual: float = 1e-8
    certificate_mode: str = "cheap"

    def __post_init__(self):
        if not self.rho > 0:
            raise ParameterError(f"rho must be positive, got {self.rho}")
        if self.eps_primal < 0 or self.eps_dual < 0:
            raise ParameterError("stopping thresholds must be nonnegative")
        if self.max_iters < 0:
            raise ParameterError("max_iters must be nonnegative")
        if self.certificate_mode not in CERTIFICATE_MODES:
            raise ParameterError(f"certificate_mode must be one of {CERTIFICATE_MODES}")


@dataclass(frozen=True, eq=False)
class IterateState:
    """``(x^k, y^k, lambda^k)`` with ``y^{k-1}`` and the derived ``r^k``, ``p^k``.

    At ``k = 0`` there is no ``x``; ``r`` and ``p`` are then ``None`` too.
    """

    k: int
    x: np.ndarray
    y: np.ndarray
    lam: np.ndarray
    y_prev: np.ndarray
    r: np.ndarray = None
    p: float = None

    def to_dict(self):
        def arr(v):
            return None if v is None else [float(t) for t in v]

        return {
            "k": self.k,
            "x": arr(self.x),
            "y": arr(self.y),
            "lambda": arr(self.lam),
            "r": arr(self.r),
            "p": None if self.p is None else float(self.p),
        }


def initial_state(prob, y0=None, lam0=None):
    y = np.zeros(prob.n2) if y0 is None else np.asarray(y0, dtype=float).reshape(prob.n2)
    lam = np.zeros(prob.m) if lam0 is None else np.asarray(lam0, dtype=float).reshape(prob.m)
    return IterateState(k=0, x=None, y=y, lam=lam, y_prev=y)


def make_state(prob, k, x, y, lam, y_prev):
    """State with ``r`` and ``p`` recomputed from ``(x, y)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return IterateState(
        k=k,
        x=x,
        y=y,
        lam=np.asarray(lam, dtype=float),
        y_prev=np.asarray(y_prev, dtype=float),
        r=primal_residual(prob, x, y),
        p=evaluate_objective(prob, x, y),
    )


def dual_update(lam, rho, r):
    return np.asarray(lam, dtype=float) + rho * np.asarray(r, dtype=float)


def step(prob, cfg, state):
    """One Gauss-Seidel pass: x-update, then y-update, then multiplier ascent.

    The previous ``x`` and ``y`` are passed to the QP solver as warm-start
    hints only.
    """
    rho = cfg.rho
    sx = solve_qp(assemble_x_subproblem(prob, rho, state.y, state.lam), start=state.x)
    sy = solve_qp(assemble_y_subproblem(prob, rho, sx.z, state.lam), start=state.y)
    r = primal_residual(prob, sx.z, sy.z)
    return IterateState(
        k=state.k + 1,
        x=sx.z,
        y=sy.z,
        lam=dual_update(state.lam, rho, r),
        y_prev=state.y,
        r=r,
        p=evaluate_objective(prob, sx.z, sy.z),
    )


def dual_residual(prob, rho, state):
    """``rho * |B (y^k - y^{k-1})|``."""
    return float(rho * np.linalg.norm(prob.B @ (state.y - state.y_prev)))


@dataclass
class SolveReport:
    status: str
    final: IterateState
    iterations: int
    trace: list = field(default_factory=list)
    history: list = field(default_factory=list)
    failed_iteration: int = None
    message: str = ""

    @property
    def converged(self):
        return self.status == CONVERGED


def solve(prob, cfg=None, init=None, reference=None):
    """Run ADMM from ``init = (y0, lam0)`` (zeros by default).

    Parameters
    ----------
    prob : SplitProblem
    cfg : SolverConfig, optional
    init : tuple, optional
        ``(y0, lam0)``; either entry may be None.
    reference : ReferenceSolution, optional
        Required when ``cfg.certificate_mode == "full"``.

    Returns
    -------
    SolveReport
        ``trace`` holds one certificate record per iteration unless
        certificates are off; ``history`` holds every iterate including the
        initial one in that case.
    """
    from .certificates import make_record

    cfg = cfg or SolverConfig()
    if cfg.certificate_mode == "full" and reference is None:
        raise ParameterError("full certificates need a reference solution")
    y0, lam0 = init if init is not None else (None, None)
    state = initial_state(prob, y0, lam0)
    keep = cfg.certificate_mode != "off"
    report = SolveReport(status=MAX_ITERS, final=state, iterations=0)
    if keep:
        report.history.append(state)
    for _ in range(cfg.max_iters):
        try:
            nxt = step(prob, cfg, state)
        except (InfeasibleError, BudgetError, SingularSystemError) as exc:
            report.status = SUBPROBLEM_ERROR
            report.failed_iteration = state.k
            report.message = str(exc)
            break
        if keep:
            report.trace.append(
                make_record(prob, cfg.rho, state, nxt, reference if cfg.certificate_mode == "full" else None)
            )
            report.history.append(nxt)
        state = nxt
        report.final = state
        report.iterations = state.k
        if (
            np.linalg.norm(state.r) <= cfg.eps_primal
            and dual_residual(prob, cfg.rho, state) <= cfg.eps_dual
        ):
            report.status = CONVERGED
            break
    return report
