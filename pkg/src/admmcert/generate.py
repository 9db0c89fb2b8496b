"""Seeded random instances.

Every instance is built around a sampled feasible point, so sets are
nonempty and the split problem is solvable by construction. ``A`` and ``B``
get their singular values clipped into a fixed band (rank repair), which
keeps them full column rank and reasonably conditioned. Draws with very
large optimal multipliers are redrawn, for the same reason.
"""
import numpy as np

from .errors import CapacityError
from .oracle import solve_split_bruteforce
from .problem import PolyhedralSet, QuadraticFunction, SplitProblem, build_consensus
from .subsolver import QPSubproblem


COUPLING_SIGMA_MIN = 0.25
MAX_MULTIPLIER = 25.0


def _pd_matrix(rng, n, lo=0.5, hi=3.0):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (Q * rng.uniform(lo, hi, n)) @ Q.T


def full_column_rank(rng, m, n, lo=0.5, hi=2.0):
    """Random ``m x n`` matrix (``m >= n``) with singular values in ``[lo, hi]``."""
    if m < n:
        raise ValueError("full column rank needs m >= n")
    U, _, Vt = np.linalg.svd(rng.standard_normal((m, n)), full_matrices=False)
    return (U * rng.uniform(lo, hi, n)) @ Vt


def random_set(rng, z0, n_ineq, n_eq=0, tight_frac=0.3):
    """Polyhedron containing ``z0``: random unit halfspaces, some tight at ``z0``."""
    n = z0.size
    G = rng.standard_normal((n_ineq, n))
    G /= np.linalg.norm(G, axis=1, keepdims=True)
    margin = rng.uniform(0.0, 1.0, n_ineq)
    margin[rng.uniform(size=n_ineq) < tight_frac] = 0.0
    h = G @ z0 + margin
    E = rng.standard_normal((n_eq, n))
    return PolyhedralSet(n, G=G, h=h, E=E, d=E @ z0)


def random_split_problem(rng, n1=None, n2=None, m=None, ineq_x=None, ineq_y=None,
                         eq_prob=0.2, max_m=4, max_ineq=6, max_multiplier=MAX_MULTIPLIER):
    """Random solvable instance with PD quadratics and full-column-rank ``A``, ``B``.

    Draws whose reference multipliers exceed ``max_multiplier`` in magnitude
    are redrawn (pass None to keep them). Such draws put the solution at a
    nearly degenerate vertex; ADMM still converges there but may need tens
    of thousands of iterations.
    """
    while True:
        prob = _draw_split_problem(rng, n1, n2, m, ineq_x, ineq_y, eq_prob, max_m, max_ineq)
        if max_multiplier is None or _multiplier_size(prob) <= max_multiplier:
            return prob


def _multiplier_size(prob):
    try:
        ref = solve_split_bruteforce(prob)
    except CapacityError:
        return 0.0  # too large to check; keep the draw
    return float(np.abs(np.concatenate([ref.lambda_star, ref.mu_X, ref.mu_Y])).max(initial=0.0))


def _draw_split_problem(rng, n1, n2, m, ineq_x, ineq_y, eq_prob, max_m, max_ineq):
    m = int(rng.integers(1, max_m + 1)) if m is None else m
    n1 = int(rng.integers(1, m + 1)) if n1 is None else n1
    n2 = int(rng.integers(1, m + 1)) if n2 is None else n2
    ineq_x = int(rng.integers(0, max_ineq + 1)) if ineq_x is None else ineq_x
    ineq_y = int(rng.integers(0, max_ineq + 1)) if ineq_y is None else ineq_y
    eq_x = int(n1 >= 2 and rng.uniform() < eq_prob)
    eq_y = int(n2 >= 2 and rng.uniform() < eq_prob)

    # resample until the coupling [A B] is itself well conditioned; a nearly
    # singular coupling gives huge multipliers and very slow runs
    while True:
        A = full_column_rank(rng, m, n1)
        B = full_column_rank(rng, m, n2)
        if np.linalg.svd(np.hstack([A, B]), compute_uv=False)[-1] >= COUPLING_SIGMA_MIN:
            break
    x0 = rng.standard_normal(n1)
    y0 = rng.standard_normal(n2)
    f = QuadraticFunction(_pd_matrix(rng, n1), 2.0 * rng.standard_normal(n1), rng.standard_normal())
    g = QuadraticFunction(_pd_matrix(rng, n2), 2.0 * rng.standard_normal(n2), rng.standard_normal())
    return SplitProblem(
        f=f,
        g=g,
        A=A,
        B=B,
        c=A @ x0 + B @ y0,
        X=random_set(rng, x0, ineq_x, eq_x),
        Y=random_set(rng, y0, ineq_y, eq_y),
    )


def rank_deficient_b_problem(rng, m=None, ineq_x=None, ineq_y=None):
    """Like :func:`random_split_problem` but ``B`` has a repeated column.

    ``g`` stays positive definite so each y-update is still strictly convex.
    """
    m = int(rng.integers(1, 4)) if m is None else m
    base = random_split_problem(rng, n2=m, m=m, ineq_x=ineq_x, ineq_y=ineq_y, eq_prob=0.0,
                                max_multiplier=None)
    n2 = m + 1
    B = np.hstack([base.B, base.B[:, :1]])
    y0 = rng.standard_normal(n2)
    x0 = rng.standard_normal(base.n1)
    n_ineq = base.Y.n_ineq
    return SplitProblem(
        f=base.f,
        g=QuadraticFunction(_pd_matrix(rng, n2), 2.0 * rng.standard_normal(n2)),
        A=base.A,
        B=B,
        c=base.A @ x0 + B @ y0,
        X=random_set(rng, x0, base.X.n_ineq),
        Y=random_set(rng, y0, n_ineq),
    )


def random_consensus_problem(rng, N=2, n=2, n_ineq=2):
    fs = [QuadraticFunction(_pd_matrix(rng, n), 2.0 * rng.standard_normal(n)) for _ in range(N)]
    z0 = rng.standard_normal(n)
    sets = [random_set(rng, z0, n_ineq) for _ in range(N)]
    return build_consensus(fs, sets)


def random_qp(rng, n=None, n_ineq=None, n_eq=None):
    """Strictly convex QP over a nonempty random polyhedron."""
    n = int(rng.integers(1, 5)) if n is None else n
    n_ineq = int(rng.integers(0, 7)) if n_ineq is None else n_ineq
    n_eq = int(rng.integers(0, n)) if n_eq is None else n_eq
    z0 = rng.standard_normal(n)
    S = random_set(rng, z0, n_ineq, n_eq)
    return QPSubproblem(_pd_matrix(rng, n, 0.2, 5.0), 3.0 * rng.standard_normal(n), S)
