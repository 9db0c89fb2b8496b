"""Runtime checks of the quantities in the ADMM convergence argument.

Every slack below is oriented so that a nonnegative value means the
inequality holds. Functions taking a ``(prev, nxt)`` pair evaluate the
inequality for the transition ``k -> k+1`` with ``prev`` at ``k``.

Two of the guarantees need more than one step of history: the sign condition
``(B(y^{k+1} - y^k))' r^{k+1} <= 0`` and the Lyapunov descent built on it
assume that ``y^k`` itself came out of a y-update (so it minimizes
``g + lambda^k' B y`` over ``Y``). For the first transition from an arbitrary
``y^0`` this is not the case; records carry ``prev_from_update`` to say which
transitions are covered.
"""
from dataclasses import dataclass

import numpy as np

from .oracle import dual_function_value

CERT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class CertificateRecord:
    k: int
    r_norm: float
    p_k: float
    dual_residual: float
    inner_product_value: float
    hat_lambda: np.ndarray
    prev_from_update: bool
    V_k: float = None
    ineq1_slack: float = None
    ineq2_slack: float = None
    lyapunov_descent_slack: float = None
    dual_value: float = None
    dual_gap: float = None
    f_attain_slack: float = None
    g_attain_slack: float = None

    CSV_COLUMNS = (
        "k",
        "r_norm",
        "p_k",
        "dual_residual",
        "V_k",
        "ineq1_slack",
        "ineq2_slack",
        "lyap_slack",
        "inner_product",
        "dual_gap",
    )

    def csv_row(self):
        values = (
            self.k,
            self.r_norm,
            self.p_k,
            self.dual_residual,
            self.V_k,
            self.ineq1_slack,
            self.ineq2_slack,
            self.lyapunov_descent_slack,
            self.inner_product_value,
            self.dual_gap,
        )
        return ["" if v is None else (str(v) if isinstance(v, int) else repr(float(v))) for v in values]

    def to_dict(self):
        out = {name: getattr(self, name) for name in (
            "k", "r_norm", "p_k", "dual_residual", "inner_product_value", "prev_from_update",
            "V_k", "ineq1_slack", "ineq2_slack", "lyapunov_descent_slack", "dual_value",
            "dual_gap", "f_attain_slack", "g_attain_slack",
        )}
        out["hat_lambda"] = [float(v) for v in self.hat_lambda]
        return out


def lyapunov(prob, rho, state, ref):
    """``(1/rho)|lam - lam*|^2 + rho |B(y - y*)|^2``."""
    dl = state.lam - ref.lambda_star
    By = prob.B @ (state.y - ref.y_star)
    return float(dl @ dl / rho + rho * By @ By)


def check_lyapunov_descent(prob, rho, prev, nxt, ref):
    """``V^k - V^{k+1} - rho|r^{k+1}|^2 - rho|B(y^{k+1} - y^k)|^2``."""
    dBy = prob.B @ (nxt.y - prev.y)
    return (
        lyapunov(prob, rho, prev, ref)
        - lyapunov(prob, rho, nxt, ref)
        - rho * float(nxt.r @ nxt.r)
        - rho * float(dBy @ dBy)
    )


def check_gap_lower(state, ref):
    """``lam*' r - (p* - p)``: the lower bound on the objective gap."""
    return float(ref.lambda_star @ state.r) - (ref.p_star - state.p)


def check_gap_upper(prob, rho, prev, nxt, ref):
    """Upper bound on ``p^{k+1} - p*`` in terms of the new multiplier and the y-move."""
    dBy = prob.B @ (nxt.y - prev.y)
    rhs = -float(nxt.lam @ nxt.r) - rho * float(dBy @ (prob.B @ (nxt.y - ref.y_star) - nxt.r))
    return rhs - (nxt.p - ref.p_star)


def check_inner_product(prob, prev, nxt):
    """``(B(y^{k+1} - y^k))' r^{k+1}``; nonpositive on covered transitions. Needs no reference."""
    return float((prob.B @ (nxt.y - prev.y)) @ nxt.r)


def hat_lambda(prob, rho, state):
    """Shifted multiplier ``lam^k - rho B(y^k - y^{k-1})`` at which ``x^k`` attains ``F``."""
    return state.lam - rho * (prob.B @ (state.y - state.y_prev))


def check_dual_attainment(prob, state, hat, dual_values=None):
    """How far ``x^k`` and ``y^k`` are from attaining ``F(hat)`` and ``G(lam^k)``.

    Returns ``(f_slack, g_slack)``; both are zero when the iterates attain the
    infima. ``dual_values`` may carry a precomputed ``(F(hat), G(lam^k))``.
    """
    if dual_values is None:
        F_hat, _ = dual_function_value(prob, hat)
        _, G_lam = dual_function_value(prob, state.lam)
    else:
        F_hat, G_lam = dual_values
    f_slack = prob.f(state.x) + float(hat @ (prob.A @ state.x)) - F_hat
    g_slack = prob.g(state.y) + float(state.lam @ (prob.B @ state.y)) - G_lam
    return f_slack, g_slack


def dual_objective(prob, hat, lam, dual_values=None):
    """``F(hat) + G(lam) - lam'c``; with ``hat == lam`` this is the dual function."""
    if dual_values is None:
        F_hat, _ = dual_function_value(prob, hat)
        _, G_lam = dual_function_value(prob, lam)
    else:
        F_hat, G_lam = dual_values
    return F_hat + G_lam - float(lam @ prob.c)


def dual_gap(prob, hat, lam, ref, dual_values=None):
    """``p* - [F(hat) + G(lam) - lam'c]``.

    The optimal dual value is taken to be ``p*`` (no duality gap). With
    ``hat != lam`` this is not a weak-duality quantity and may be slightly
    negative; it tends to zero along a converging run.
    """
    return ref.p_star - dual_objective(prob, hat, lam, dual_values)


def make_record(prob, rho, prev, nxt, ref=None):
    """Certificate record for the transition ``prev -> nxt``.

    Without ``ref`` only reference-free quantities are filled in.
    """
    dBy = prob.B @ (nxt.y - prev.y)
    hat = hat_lambda(prob, rho, nxt)
    rec = dict(
        k=nxt.k,
        r_norm=float(np.linalg.norm(nxt.r)),
        p_k=float(nxt.p),
        dual_residual=float(rho * np.linalg.norm(dBy)),
        inner_product_value=check_inner_product(prob, prev, nxt),
        hat_lambda=hat,
        prev_from_update=prev.k >= 1,
    )
    if ref is not None:
        F_hat, _ = dual_function_value(prob, hat)
        _, G_lam = dual_function_value(prob, nxt.lam)
        values = (F_hat, G_lam)
        f_slack, g_slack = check_dual_attainment(prob, nxt, hat, values)
        rec.update(
            V_k=lyapunov(prob, rho, nxt, ref),
            ineq1_slack=check_gap_lower(nxt, ref),
            ineq2_slack=check_gap_upper(prob, rho, prev, nxt, ref),
            lyapunov_descent_slack=check_lyapunov_descent(prob, rho, prev, nxt, ref),
            dual_value=dual_objective(prob, hat, nxt.lam, values),
            dual_gap=dual_gap(prob, hat, nxt.lam, ref, values),
            f_attain_slack=f_slack,
            g_attain_slack=g_slack,
        )
    return CertificateRecord(**rec)


def self_referential_lyapunov(prob, rho, history):
    """Lyapunov values of every iterate measured against the last one."""
    last = history[-1]
    out = np.empty(len(history))
    for i, s in enumerate(history):
        dl = s.lam - last.lam
        By = prob.B @ (s.y - last.y)
        out[i] = dl @ dl / rho + rho * By @ By
    return out


def descent_partial_sums(prob, rho, history):
    """Running sums of ``rho(|r^{k+1}|^2 + |B(y^{k+1} - y^k)|^2)`` over a run."""
    terms = [
        rho * (float(b.r @ b.r) + float(np.sum((prob.B @ (b.y - a.y)) ** 2)))
        for a, b in zip(history[:-1], history[1:])
    ]
    return np.cumsum(terms)
