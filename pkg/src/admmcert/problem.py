"""Problem data for two-block splitting with quadratic costs.

An instance is

    minimize    f(x) + g(y)
    subject to  x in X,  y in Y,  A x + B y = c

with ``f`` and ``g`` convex quadratics and ``X``, ``Y`` polyhedra given by
``{z : G z <= h, E z = d}``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError
from .numerics import RANK_TOL, as_matrix, is_psd, numerical_rank

MEMBERSHIP_TOL = 1e-8


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _vector(v, n, name):
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != n:
        raise DimensionError(f"{name} has length {v.shape[0]}, expected {n}")
    return v


@dataclass(frozen=True, eq=False)
class QuadraticFunction:
    """``0.5 x'Px + q'x + r0``. Convexity is checked by :func:`validate`, not here."""

    P: np.ndarray
    q: np.ndarray
    r0: float = 0.0

    def __post_init__(self):
        P = as_matrix(self.P, "P")
        q = np.asarray(self.q, dtype=float).reshape(-1)
        if P.shape != (q.shape[0], q.shape[0]):
            raise DimensionError(f"P has shape {P.shape} but q has length {q.shape[0]}")
        if P.size and np.max(np.abs(P - P.T)) > RANK_TOL * max(1.0, np.max(np.abs(P))):
            raise DimensionError("P must be symmetric")
        object.__setattr__(self, "P", _frozen(0.5 * (P + P.T)))
        object.__setattr__(self, "q", _frozen(q))
        object.__setattr__(self, "r0", float(self.r0))

    @property
    def dim(self):
        return self.q.shape[0]

    def __call__(self, x):
        x = _vector(x, self.dim, "x")
        return float(0.5 * x @ self.P @ x + self.q @ x + self.r0)

    def gradient(self, x):
        return self.P @ _vector(x, self.dim, "x") + self.q

    def __eq__(self, other):
        if not isinstance(other, QuadraticFunction):
            return NotImplemented
        return (
            np.array_equal(self.P, other.P)
            and np.array_equal(self.q, other.q)
            and self.r0 == other.r0
        )

    __hash__ = None


def _rows_or_empty(M, n, name):
    if M is None or np.size(M) == 0:
        return np.zeros((0, n))
    return as_matrix(M, name)


@dataclass(frozen=True, eq=False)
class PolyhedralSet:
    """``{z in R^n : G z <= h, E z = d}``; no rows at all means the whole space."""

    n: int
    G: np.ndarray = None
    h: np.ndarray = None
    E: np.ndarray = None
    d: np.ndarray = None

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise DimensionError("set dimension must be positive")
        G = _rows_or_empty(self.G, n, "G")
        E = _rows_or_empty(self.E, n, "E")
        if G.shape[1] != n or E.shape[1] != n:
            raise DimensionError(f"constraint matrices must have {n} columns")
        h = _vector(np.zeros(0) if self.h is None else self.h, G.shape[0], "h")
        d = _vector(np.zeros(0) if self.d is None else self.d, E.shape[0], "d")
        object.__setattr__(self, "n", n)
        for name, value in (("G", G), ("h", h), ("E", E), ("d", d)):
            object.__setattr__(self, name, _frozen(value))

    @classmethod
    def free(cls, n):
        return cls(n)

    @property
    def n_ineq(self):
        return self.G.shape[0]

    @property
    def n_eq(self):
        return self.E.shape[0]

    def contains(self, z, tol=MEMBERSHIP_TOL):
        z = _vector(z, self.n, "z")
        return bool(
            np.all(self.G @ z <= self.h + tol) and np.all(np.abs(self.E @ z - self.d) <= tol)
        )

    def __eq__(self, other):
        if not isinstance(other, PolyhedralSet):
            return NotImplemented
        return self.n == other.n and all(
            np.array_equal(getattr(self, k), getattr(other, k)) for k in "GhEd"
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SplitProblem:
    f: QuadraticFunction
    g: QuadraticFunction
    A: np.ndarray
    B: np.ndarray
    c: np.ndarray
    X: PolyhedralSet = None
    Y: PolyhedralSet = None

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        n1, n2 = self.f.dim, self.g.dim
        if A.shape[1] != n1:
            raise DimensionError(f"A has {A.shape[1]} columns but f acts on R^{n1}")
        if B.shape[1] != n2:
            raise DimensionError(f"B has {B.shape[1]} columns but g acts on R^{n2}")
        if A.shape[0] != B.shape[0]:
            raise DimensionError(f"A has {A.shape[0]} rows but B has {B.shape[0]}")
        c = _vector(self.c, A.shape[0], "c")
        X = PolyhedralSet.free(n1) if self.X is None else self.X
        Y = PolyhedralSet.free(n2) if self.Y is None else self.Y
        if X.n != n1 or Y.n != n2:
            raise DimensionError("set dimensions do not match f and g")
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "B", _frozen(B))
        object.__setattr__(self, "c", _frozen(c))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def n1(self):
        return self.f.dim

    @property
    def n2(self):
        return self.g.dim

    @property
    def m(self):
        return self.A.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SplitProblem):
            return NotImplemented
        return (
            self.f == other.f
            and self.g == other.g
            and np.array_equal(self.A, other.A)
            and np.array_equal(self.B, other.B)
            and np.array_equal(self.c, other.c)
            and self.X == other.X
            and self.Y == other.Y
        )

    __hash__ = None


PASS, FAIL, UNKNOWN, DEFERRED = "PASS", "FAIL", "UNKNOWN", "DEFERRED"


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking the convergence hypotheses on one instance.

    ``X_nonempty``/``Y_nonempty`` are ``None`` when the feasibility probe is
    over its enumeration budget. Solvability is never decided here.
    """

    f_convex: bool
    g_convex: bool
    X_nonempty: object
    Y_nonempty: object
    rank_A: int
    rank_B: int
    n1: int
    n2: int

    @staticmethod
    def _status(*flags):
        if any(f is False for f in flags):
            return FAIL
        if any(f is None for f in flags):
            return UNKNOWN
        return PASS

    @property
    def assumptions(self):
        return {
            1: self._status(self.f_convex, self.g_convex),
            2: self._status(self.X_nonempty, self.Y_nonempty),
            3: DEFERRED,
            4: self._status(self.rank_A == self.n1, self.rank_B == self.n2),
        }

    @property
    def ok(self):
        return FAIL not in self.assumptions.values()

    def lines(self):
        st = self.assumptions

        def word(flag):
            return {True: "ok", False: "FAIL", None: "unknown"}[flag]

        out = ["structure: PASS"]
        out.append(
            f"assumption 1: {st[1]} (f convex: {word(self.f_convex)}, g convex: {word(self.g_convex)})"
        )
        out.append(
            f"assumption 2: {st[2]} (X nonempty: {word(self.X_nonempty)}, "
            f"Y nonempty: {word(self.Y_nonempty)})"
        )
        out.append("assumption 3: DEFERRED (solvability is checked at solve time)")
        detail = []
        if self.rank_A < self.n1:
            detail.append(f"A is not full column rank: rank {self.rank_A} of {self.n1}")
        if self.rank_B < self.n2:
            detail.append(f"B is not full column rank: rank {self.rank_B} of {self.n2}")
        if not detail:
            detail.append(f"rank A = {self.rank_A} of {self.n1}, rank B = {self.rank_B} of {self.n2}")
        out.append(f"assumption 4: {st[4]} ({'; '.join(detail)})")
        return out


def _safe_rank(M):
    return numerical_rank(M) if M.size else 0


def validate(prob):
    """Check convexity, set nonemptiness and full column rank of ``A`` and ``B``."""
    from .oracle import feasibility_probe

    if not isinstance(prob, SplitProblem):
        raise DimensionError("validate expects a SplitProblem")
    return ValidationReport(
        f_convex=is_psd(prob.f.P),
        g_convex=is_psd(prob.g.P),
        X_nonempty=feasibility_probe(prob.X),
        Y_nonempty=feasibility_probe(prob.Y),
        rank_A=_safe_rank(prob.A),
        rank_B=_safe_rank(prob.B),
        n1=prob.n1,
        n2=prob.n2,
    )


def evaluate_objective(prob, x, y):
    return prob.f(x) + prob.g(y)


def primal_residual(prob, x, y):
    x = _vector(x, prob.n1, "x")
    y = _vector(y, prob.n2, "y")
    return prob.A @ x + prob.B @ y - prob.c


def augmented_lagrangian(prob, rho, x, y, lam):
    """``f(x) + g(y) + lam'r + rho/2 |r|^2`` with ``r = Ax + By - c``."""
    if not rho > 0:
        raise ParameterError(f"rho must be positive, got {rho}")
    lam = _vector(lam, prob.m, "lambda")
    r = primal_residual(prob, x, y)
    return evaluate_objective(prob, x, y) + float(lam @ r) + 0.5 * rho * float(r @ r)


def _block_diag(blocks, ncols):
    rows = sum(b.shape[0] for b in blocks)
    out = np.zeros((rows, sum(ncols)))
    i = j = 0
    for b, w in zip(blocks, ncols):
        out[i : i + b.shape[0], j : j + w] = b
        i += b.shape[0]
        j += w
    return out


def build_consensus(local_fs, local_sets=None):
    """Global-consensus instance: ``N`` local copies ``x_i`` forced equal to a shared ``y``.

    ``x`` stacks the local copies, ``A = I``, ``B`` stacks ``-I`` blocks,
    ``c = 0`` and ``g = 0`` on a free ``Y``.
    """
    local_fs = list(local_fs)
    if not local_fs:
        raise DimensionError("need at least one local function")
    n = local_fs[0].dim
    if local_sets is None:
        local_sets = [PolyhedralSet.free(n) for _ in local_fs]
    local_sets = list(local_sets)
    if len(local_sets) != len(local_fs):
        raise DimensionError("one local set per local function is required")
    if any(fi.dim != n for fi in local_fs) or any(s.n != n for s in local_sets):
        raise DimensionError("all local functions and sets must share one dimension")
    N = len(local_fs)
    widths = [n] * N
    f = QuadraticFunction(
        _block_diag([fi.P for fi in local_fs], widths),
        np.concatenate([fi.q for fi in local_fs]),
        sum(fi.r0 for fi in local_fs),
    )
    X = PolyhedralSet(
        N * n,
        G=_block_diag([s.G for s in local_sets], widths),
        h=np.concatenate([s.h for s in local_sets]),
        E=_block_diag([s.E for s in local_sets], widths),
        d=np.concatenate([s.d for s in local_sets]),
    )
    g = QuadraticFunction(np.zeros((n, n)), np.zeros(n))
    return SplitProblem(
        f=f,
        g=g,
        A=np.eye(N * n),
        B=-np.vstack([np.eye(n)] * N),
        c=np.zeros(N * n),
        X=X,
        Y=PolyhedralSet.free(n),
    )


# --- JSON schema -----------------------------------------------------------


def _quad_from_dict(obj):
    q = np.asarray(obj["q"], dtype=float).reshape(-1)
    P = obj.get("P")
    P = np.zeros((q.size, q.size)) if P is None else np.asarray(P, dtype=float).reshape(q.size, q.size)
    return QuadraticFunction(P, q, obj.get("r0", 0.0))


def _set_from_dict(obj, n):
    obj = obj or {}
    G = obj.get("G")
    E = obj.get("E")
    return PolyhedralSet(
        n,
        G=None if G is None else np.asarray(G, dtype=float).reshape(-1, n),
        h=obj.get("h"),
        E=None if E is None else np.asarray(E, dtype=float).reshape(-1, n),
        d=obj.get("d"),
    )


def problem_from_dict(obj):
    """Build a :class:`SplitProblem` from the JSON object layout.

    Matrices are lists of row lists. Missing ``G``/``E`` mean no rows.
    """
    try:
        f = _quad_from_dict(obj["f"])
        g = _quad_from_dict(obj["g"])
        A = np.asarray(obj["A"], dtype=float).reshape(-1, f.dim)
        B = np.asarray(obj["B"], dtype=float).reshape(-1, g.dim)
        return SplitProblem(
            f=f,
            g=g,
            A=A,
            B=B,
            c=obj["c"],
            X=_set_from_dict(obj.get("X"), f.dim),
            Y=_set_from_dict(obj.get("Y"), g.dim),
        )
    except (KeyError, TypeError) as exc:
        raise DimensionError(f"malformed problem object: {exc!r}") from exc


def _rows(M):
    return [[float(v) for v in row] for row in np.asarray(M)]


def _vec(v):
    return [float(x) for x in np.asarray(v)]


def problem_to_dict(prob):
    def quad(fn):
        return {"P": _rows(fn.P), "q": _vec(fn.q), "r0": float(fn.r0)}

    def pset(s):
        return {"G": _rows(s.G), "h": _vec(s.h), "E": _rows(s.E), "d": _vec(s.d)}

    return {
        "f": quad(prob.f),
        "g": quad(prob.g),
        "A": _rows(prob.A),
        "B": _rows(prob.B),
        "c": _vec(prob.c),
        "X": pset(prob.X),
        "Y": pset(prob.Y),
    }
