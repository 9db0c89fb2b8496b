"""ADMM for quadratic costs over polyhedra, with runtime convergence certificates."""
from .certificates import CertificateRecord, make_record
from .engine import IterateState, SolveReport, SolverConfig, dual_update, solve, step
from .errors import (
    AdmmError,
    BudgetError,
    CapacityError,
    DimensionError,
    InfeasibleError,
    ParameterError,
    SingularSystemError,
    SymmetryError,
    UnboundedError,
)
from .oracle import ReferenceSolution, solve_qp_bruteforce, solve_split_bruteforce
from .problem import (
    PolyhedralSet,
    QuadraticFunction,
    SplitProblem,
    augmented_lagrangian,
    build_consensus,
    evaluate_objective,
    primal_residual,
    validate,
)
from .subsolver import QPSubproblem, solve_qp

__version__ = "0.1.0"
