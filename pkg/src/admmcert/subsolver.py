"""Exact solver for the strictly convex QPs behind the x- and y-updates.

Both updates minimize the augmented Lagrangian over a polyhedron with the
other block and the multiplier frozen. Expanding the quadratic gives

    minimize 0.5 z'Hz + l'z  over  {G z <= h, E z = d}

with ``H = P + rho M'M`` positive definite whenever ``M`` (``A`` or ``B``)
has full column rank. The primal active-set method below terminates with an
exact KKT point, which the certificate checks rely on.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import BudgetError, DimensionError, InfeasibleError, ParameterError, SingularSystemError
from .numerics import as_matrix, independent_rows, solve_linear

ACTIVE_TOL = 1e-9
MULTIPLIER_TOL = 1e-11
STEP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class QPSubproblem:
    H: np.ndarray
    l: np.ndarray
    set: object

    def __post_init__(self):
        H = as_matrix(self.H, "H")
        l = np.asarray(self.l, dtype=float).reshape(-1)
        if H.shape != (l.size, l.size) or self.set.n != l.size:
            raise DimensionError("H, l and the feasible set disagree on dimension")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "l", l)

    def objective(self, z):
        return float(0.5 * z @ self.H @ z + self.l @ z)


@dataclass(frozen=True)
class QPSolution:
    """Minimizer with multipliers ``mu`` (inequalities) and ``nu`` (equalities).

    Sign convention: ``H z + l + G'mu + E'nu = 0`` with ``mu >= 0``.
    """

    z: np.ndarray
    active: tuple
    mu: np.ndarray
    nu: np.ndarray
    iterations: int

    def kkt_residual(self, sub):
        S = sub.set
        stat = sub.H @ self.z + sub.l + S.G.T @ self.mu + S.E.T @ self.nu
        parts = [
            np.abs(stat),
            np.maximum(S.G @ self.z - S.h, 0.0),
            np.abs(S.E @ self.z - S.d),
            np.maximum(-self.mu, 0.0),
            np.abs(self.mu * (S.G @ self.z - S.h)),
        ]
        return float(max((p.max() for p in parts if p.size), default=0.0))


def _check_rho(rho):
    if not rho > 0:
        raise ParameterError(f"rho must be positive, got {rho}")


def assemble_x_subproblem(prob, rho, y, lam):
    """x-update data: ``H = P_f + rho A'A``, ``l = q_f + A'lam + rho A'(By - c)``."""
    _check_rho(rho)
    A = prob.A
    H = prob.f.P + rho * A.T @ A
    l = prob.f.q + A.T @ lam + rho * A.T @ (prob.B @ y - prob.c)
    return QPSubproblem(H, l, prob.X)


def assemble_y_subproblem(prob, rho, x, lam):
    """y-update data: ``H = P_g + rho B'B``, ``l = q_g + B'lam + rho B'(Ax - c)``."""
    _check_rho(rho)
    B = prob.B
    H = prob.g.P + rho * B.T @ B
    l = prob.g.q + B.T @ lam + rho * B.T @ (prob.A @ x - prob.c)
    return QPSubproblem(H, l, prob.Y)


def find_feasible_point(S):
    """Phase 1: a point of ``S`` with the largest inequality margin up to 1.

    Solves the LP ``min t  s.t.  G z - t <= h, E z = d, t >= -1``.
    """
    n = S.n
    if S.n_ineq == 0:
        if S.n_eq == 0:
            return np.zeros(n)
        z, *_ = np.linalg.lstsq(S.E, S.d, rcond=None)
        if np.max(np.abs(S.E @ z - S.d)) > ACTIVE_TOL * (1.0 + np.max(np.abs(S.d))):
            raise InfeasibleError("equality constraints are inconsistent")
        return z
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    A_ub = np.hstack([S.G, -np.ones((S.n_ineq, 1))])
    A_eq = np.hstack([S.E, np.zeros((S.n_eq, 1))]) if S.n_eq else None
    bounds = [(None, None)] * n + [(-1.0, None)]
    res = linprog(cost, A_ub=A_ub, b_ub=S.h, A_eq=A_eq, b_eq=S.d if S.n_eq else None,
                  bounds=bounds, method="highs")
    if res.status == 2 or (res.status == 0 and res.x[-1] > ACTIVE_TOL):
        raise InfeasibleError("polyhedral set is empty")
    if res.status != 0:
        raise InfeasibleError(f"phase-1 LP failed: {res.message}")
    return res.x[:n]


def _kkt_solve(H, l, rows, rhs):
    k = rows.shape[0]
    if k == 0:
        return solve_linear(H, -l), np.zeros(0)
    n = H.shape[0]
    K = np.zeros((n + k, n + k))
    K[:n, :n] = H
    K[:n, n:] = rows.T
    K[n:, :n] = rows
    sol = solve_linear(K, np.concatenate([-l, rhs]))
    return sol[:n], sol[n:]


def solve_qp(sub, start=None, max_steps=None):
    """Minimize ``0.5 z'Hz + l'z`` over ``sub.set`` by a primal active-set method.

    Parameters
    ----------
    sub : QPSubproblem
        ``H`` must be positive definite.
    start : array_like, optional
        Warm-start hint. Used only if it lies in the set; otherwise a phase-1
        point is computed. The returned minimizer does not depend on it.
    max_steps : int, optional
        Defaults to ``50 * (n + p)``.

    Returns
    -------
    QPSolution

    Raises
    ------
    InfeasibleError
        The set is empty.
    BudgetError
        The step budget ran out.
    """
    S = sub.set
    H, l = sub.H, sub.l
    n, p = S.n, S.n_ineq
    budget = max_steps if max_steps is not None else 50 * (n + p)

    eq_keep = independent_rows(S.E) if S.n_eq else []
    E, d = S.E[eq_keep], S.d[eq_keep]

    z = None
    if start is not None:
        start = np.asarray(start, dtype=float).reshape(-1)
        if start.size == n and S.contains(start, tol=ACTIVE_TOL):
            z = start.copy()
    if z is None:
        z = find_feasible_point(S)
        if len(eq_keep) < S.n_eq and np.max(np.abs(S.E @ z - S.d)) > 1e-7:
            raise InfeasibleError("equality constraints are inconsistent")

    # Working set: constraints tight at the start, added in index order while
    # their gradients stay independent of the equalities and earlier picks.
    slack = S.h - S.G @ z
    tight = [i for i in range(p) if slack[i] <= ACTIVE_TOL * (1.0 + abs(S.h[i]))]
    working = []
    if tight:
        chosen = independent_rows(S.G[tight], base=E)
        working = [tight[j] for j in chosen]
    # Put z exactly on its working constraints; phase 1 is only accurate to
    # solver tolerance and a residual there makes spurious zero-length steps.
    W = np.vstack([E, S.G[working]])
    if W.shape[0]:
        dz, *_ = np.linalg.lstsq(W, W @ z - np.concatenate([d, S.h[working]]), rcond=None)
        z = z - dz

    for it in range(1, budget + 1):
        rows = np.vstack([E, S.G[working]]) if working else E
        rhs = np.concatenate([d, S.h[working]]) if working else d
        z_eq, w = _kkt_solve(H, l, rows, rhs)
        step = z_eq - z
        if np.linalg.norm(step) <= STEP_TOL * (1.0 + np.linalg.norm(z)):
            z = z_eq
            mu_w = w[len(eq_keep):]
            if not working or mu_w.min() >= -MULTIPLIER_TOL * (1.0 + np.abs(mu_w).max()):
                return _package(S, z, working, w, eq_keep, it)
            # argmin returns the first minimal entry; ties go to the earlier pick
            working.pop(int(np.argmin(mu_w)))
            continue
        alpha, block = 1.0, None
        Gp = S.G @ step
        for i in range(p):
            if i in working or Gp[i] <= 1e-14 * np.linalg.norm(step):
                continue
            a = max((S.h[i] - S.G[i] @ z) / Gp[i], 0.0)
            if a < alpha:
                alpha, block = a, i
        z = z + alpha * step
        if block is not None:
            trial = np.vstack([rows, S.G[block : block + 1]])
            if independent_rows(trial) == list(range(trial.shape[0])):
                working.append(block)
    raise BudgetError(f"active-set method exceeded {budget} steps")


def _package(S, z, working, w, eq_keep, iterations):
    mu = np.zeros(S.n_ineq)
    nu = np.zeros(S.n_eq)
    nu[eq_keep] = w[: len(eq_keep)]
    if working:
        mu[working] = np.maximum(w[len(eq_keep):], 0.0)
    return QPSolution(z=z, active=tuple(sorted(working)), mu=mu, nu=nu, iterations=iterations)
