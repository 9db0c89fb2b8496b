"""Dense small-scale linear algebra helpers.

Everything here is a pure function on numpy arrays. Rank and solvability
decisions are made from the singular values so that a single relative
tolerance governs both.
"""
import numpy as np

from .errors import DimensionError, SingularSystemError, SymmetryError

RANK_TOL = 1e-10


def as_matrix(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DimensionError(f"{name} has non-finite entries")
    return M


def numerical_rank(M, tol=RANK_TOL):
    """Number of singular values above ``tol`` times the largest one.

    Parameters
    ----------
    M : array_like, shape (r, c)
    tol : float
        Relative threshold, must be nonnegative.

    Returns
    -------
    int
    """
    M = as_matrix(M)
    if M.size == 0:
        raise DimensionError("numerical_rank of an empty matrix")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def is_psd(M, tol=RANK_TOL):
    """True iff the symmetric matrix ``M`` has minimum eigenvalue >= -tol."""
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"is_psd needs a square matrix, got {M.shape}")
    if M.size == 0:
        return True
    if np.max(np.abs(M - M.T)) > tol:
        raise SymmetryError("matrix is not symmetric to within tolerance")
    return bool(np.linalg.eigvalsh(0.5 * (M + M.T))[0] >= -tol)


def solve_linear(M, b, tol=RANK_TOL):
    """Solve ``M z = b`` for square nonsingular ``M``.

    The solve goes through the SVD; a matrix whose numerical rank is below
    its order raises :class:`SingularSystemError` instead of returning a
    meaningless vector.
    """
    M = as_matrix(M)
    b = np.asarray(b, dtype=float)
    n = M.shape[0]
    if M.shape[1] != n:
        raise DimensionError(f"solve_linear needs a square matrix, got {M.shape}")
    if b.shape[0] != n:
        raise DimensionError(f"right-hand side has length {b.shape[0]}, expected {n}")
    if n == 0:
        return np.zeros_like(b)
    U, s, Vt = np.linalg.svd(M)
    if s[0] == 0.0 or s[-1] <= tol * s[0]:
        raise SingularSystemError(
            f"matrix is numerically singular (condition estimate {s[0] / max(s[-1], 1e-300):.3g})"
        )
    return Vt.T @ ((U.T @ b) / s) if b.ndim == 1 else Vt.T @ ((U.T @ b) / s[:, None])


def independent_rows(M, base=None, tol=RANK_TOL):
    """Indices of a greedy, order-preserving, linearly independent subset of rows.

    Rows of ``base`` (if given) count as already selected, so a returned row
    is also independent of them.
    """
    M = as_matrix(M)
    acc = np.zeros((0, M.shape[1])) if base is None else as_matrix(base).reshape(-1, M.shape[1])
    keep = []
    for i in range(M.shape[0]):
        trial = np.vstack([acc, M[i : i + 1]])
        s = np.linalg.svd(trial, compute_uv=False)
        if len(s) == trial.shape[0] and s[0] > 0.0 and s[-1] > tol * s[0]:
            acc = trial
            keep.append(i)
    return keep
