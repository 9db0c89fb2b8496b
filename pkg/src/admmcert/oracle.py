"""Brute-force reference solutions by active-set enumeration.

Every subset of inequality constraints is tried as the active set; the
equality-constrained KKT system is solved by least squares and the candidate
kept if it is primal feasible with nonnegative multipliers. The enumeration
shares no code path with :mod:`admmcert.subsolver`, so the two can check
each other.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import CapacityError, InfeasibleError, UnboundedError
from .problem import PolyhedralSet

MAX_INEQ = 20
MAX_SPLIT_DIM = 40
MU_TOL = 1e-10
FEAS_TOL = 1e-9
STRICT_TOL = 1e-10


@dataclass(frozen=True)
class BruteForceResult:
    z: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    objective: float
    unique: bool


@dataclass(frozen=True)
class ReferenceSolution:
    """Primal-dual solution of a split problem.

    ``lambda_star`` is the multiplier of ``Ax + By = c``; ``unique`` is False
    when the primal minimizer may not be unique (comparisons of iterates with
    ``x_star``/``y_star`` are then meaningless).
    """

    x_star: np.ndarray
    y_star: np.ndarray
    lambda_star: np.ndarray
    p_star: float
    mu_X: np.ndarray
    mu_Y: np.ndarray
    nu_X: np.ndarray
    nu_Y: np.ndarray
    unique: bool

    def to_dict(self):
        return {
            "x_star": self.x_star.tolist(),
            "y_star": self.y_star.tolist(),
            "lambda_star": self.lambda_star.tolist(),
            "p_star": float(self.p_star),
            "mu_X": self.mu_X.tolist(),
            "mu_Y": self.mu_Y.tolist(),
            "nu_X": self.nu_X.tolist(),
            "nu_Y": self.nu_Y.tolist(),
            "unique": bool(self.unique),
        }


def _enumerate(H, l, G, h, E, d):
    """Core enumeration. Returns (z, mu, nu, objective, strictly_convex) or None."""
    n = H.shape[0]
    p, e = G.shape[0], E.shape[0]
    if p > MAX_INEQ:
        raise CapacityError(f"{p} inequality constraints exceed the cap of {MAX_INEQ}")
    strict = n == 0 or np.linalg.eigvalsh(H)[0] > STRICT_TOL * max(1.0, np.abs(H).max())
    scale = 1.0 + np.abs(l).max(initial=0.0) + np.abs(h).max(initial=0.0) + np.abs(d).max(initial=0.0)
    # Full KKT matrix over every constraint; each subset is a principal slice.
    N = n + e + p
    K_all = np.zeros((N, N))
    K_all[:n, :n] = H
    K_all[:n, n : n + e] = E.T
    K_all[n : n + e, :n] = E
    K_all[:n, n + e :] = G.T
    K_all[n + e :, :n] = G
    rhs_all = np.concatenate([-l, d, h])
    res_tol = 1e-9 * scale * (1.0 + np.abs(K_all).max(initial=0.0))
    feas_G = FEAS_TOL * (1.0 + np.abs(h).max(initial=0.0))
    feas_E = FEAS_TOL * (1.0 + np.abs(d).max(initial=0.0))
    base = list(range(n + e))
    best = None
    for size in range(p + 1):
        for S in combinations(range(p), size):
            S = list(S)
            ix = base + [n + e + i for i in S]
            K = K_all[np.ix_(ix, ix)]
            rhs = rhs_all[ix]
            sol = _kkt_candidate(K, rhs, res_tol, strict)
            if sol is None:
                continue
            z, nu, mu_S = sol[:n], sol[n : n + e], sol[n + e :]
            if mu_S.size and mu_S.min() < -MU_TOL * (1.0 + np.abs(mu_S).max()):
                continue
            if p and (G @ z - h).max() > feas_G:
                continue
            if e and np.abs(E @ z - d).max() > feas_E:
                continue
            mu = np.zeros(p)
            mu[S] = np.maximum(mu_S, 0.0)
            obj = float(0.5 * z @ H @ z + l @ z)
            if strict:
                return z, mu, nu, obj, True
            if best is None or obj < best[3] - 1e-12 * (1.0 + abs(obj)):
                best = (z, mu, nu, obj)
            elif abs(obj - best[3]) <= 1e-12 * (1.0 + abs(obj)) and tuple(z) < tuple(best[0]):
                best = (z, mu, nu, obj)
    if best is None:
        return None
    return (*best, False)


def _kkt_candidate(K, rhs, res_tol, try_lu):
    if try_lu:
        try:
            sol = np.linalg.solve(K, rhs)
            if np.abs(K @ sol - rhs).max(initial=0.0) <= res_tol:
                return sol
        except np.linalg.LinAlgError:
            pass
    sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    if np.abs(K @ sol - rhs).max(initial=0.0) > res_tol:
        return None
    return sol


def feasibility_probe(S):
    """True if ``S`` is nonempty, False if empty, None if over the enumeration cap."""
    if S.n_ineq > MAX_INEQ:
        return None
    out = _enumerate(np.eye(S.n), np.zeros(S.n), S.G, S.h, S.E, S.d)
    return out is not None


def solve_qp_bruteforce(sub):
    """Exact minimizer of a convex QP (``QPSubproblem``) by enumeration.

    Raises
    ------
    CapacityError
        More than 20 inequality constraints.
    InfeasibleError
        The feasible set is empty.
    UnboundedError
        The set is nonempty but no KKT point exists.
    """
    S = sub.set
    out = _enumerate(np.asarray(sub.H, float), np.asarray(sub.l, float), S.G, S.h, S.E, S.d)
    if out is None:
        if feasibility_probe(S):
            raise UnboundedError("objective is unbounded below on the set")
        raise InfeasibleError("no active set yields a feasible point")
    z, mu, nu, obj, strict = out
    return BruteForceResult(z=z, mu=mu, nu=nu, objective=obj, unique=strict)


def _stack_sets(X, Y):
    n1, n2 = X.n, Y.n
    G = np.zeros((X.n_ineq + Y.n_ineq, n1 + n2))
    G[: X.n_ineq, :n1] = X.G
    G[X.n_ineq :, n1:] = Y.G
    E = np.zeros((X.n_eq + Y.n_eq, n1 + n2))
    E[: X.n_eq, :n1] = X.E
    E[X.n_eq :, n1:] = Y.E
    return G, np.concatenate([X.h, Y.h]), E, np.concatenate([X.d, Y.d])


def solve_split_bruteforce(prob):
    """Reference primal-dual solution of the whole split problem as one QP in ``(x, y)``."""
    n1, n2, m = prob.n1, prob.n2, prob.m
    if prob.X.n_ineq + prob.Y.n_ineq > MAX_INEQ:
        raise CapacityError("too many inequality constraints for enumeration")
    if n1 + n2 + m > MAX_SPLIT_DIM:
        raise CapacityError(f"n1 + n2 + m = {n1 + n2 + m} exceeds {MAX_SPLIT_DIM}")
    H = np.zeros((n1 + n2, n1 + n2))
    H[:n1, :n1] = prob.f.P
    H[n1:, n1:] = prob.g.P
    l = np.concatenate([prob.f.q, prob.g.q])
    G, h, Esets, dsets = _stack_sets(prob.X, prob.Y)
    E = np.vstack([np.hstack([prob.A, prob.B]), Esets])
    d = np.concatenate([prob.c, dsets])
    out = _enumerate(H, l, G, h, E, d)
    if out is None:
        joint = PolyhedralSet(n1 + n2, G=G, h=h, E=E, d=d)
        if feasibility_probe(joint):
            raise UnboundedError("split problem is unbounded below")
        raise InfeasibleError("split problem has no feasible point")
    w, mu, nu, _, strict = out
    x, y = w[:n1], w[n1:]
    unique = strict or _unique_on_face(H, E, G, mu)
    nx = prob.X.n_ineq
    ex = prob.X.n_eq
    return ReferenceSolution(
        x_star=x,
        y_star=y,
        lambda_star=nu[:m],
        p_star=prob.f(x) + prob.g(y),
        mu_X=mu[:nx],
        mu_Y=mu[nx:],
        nu_X=nu[m : m + ex],
        nu_Y=nu[m + ex :],
        unique=unique,
    )


def _unique_on_face(H, E, G, mu):
    # Any second minimizer differs by d with Hd = 0, Ed = 0 and G_i d = 0 for
    # every constraint carrying a positive multiplier.
    strong = mu > MU_TOL * (1.0 + np.abs(mu).max(initial=0.0))
    M = np.vstack([H, E, G[strong]])
    s = np.linalg.svd(M, compute_uv=False)
    return len(s) >= H.shape[0] and s[H.shape[0] - 1] > 1e-9 * max(s[0], 1.0)


def dual_function_value(prob, lam):
    """``F(lam) = inf_X f(x) + lam'Ax`` and ``G(lam) = inf_Y g(y) + lam'By``.

    An infimum that is unbounded below comes back as ``-inf``.
    """
    from .subsolver import QPSubproblem

    lam = np.asarray(lam, dtype=float).reshape(-1)

    def piece(fn, M, S):
        try:
            res = solve_qp_bruteforce(QPSubproblem(fn.P, fn.q + M.T @ lam, S))
        except UnboundedError:
            return -np.inf
        return res.objective + fn.r0

    return piece(prob.f, prob.A, prob.X), piece(prob.g, prob.B, prob.Y)

