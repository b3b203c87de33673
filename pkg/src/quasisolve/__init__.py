"""Extremal quasisolutions of functional differential equations with state-dependent deviations.

The package computes the coupled monotone iteration between a lower and an
upper solution, certifies uniqueness through contraction inequalities, and
checks the hypotheses numerically.
"""

from .errors import (
    BracketViolation,
    DomainError,
    EvaluatorError,
    GridMismatch,
    MissingField,
    NoConvergence,
    NonFiniteRHS,
    ParamValidation,
    PremiseFailure,
    QuasisolveError,
    UnknownExample,
    UnsortedInput,
)
from .grid import (
    BoundData,
    GridFunction,
    TimeDomain,
    in_bracket_plus,
    is_nondecreasing_on,
    partial_le,
    sup_distance,
    tol_ord,
)
from .problem import (
    FrozenRHS,
    ProblemSpec,
    TauMode,
    check_k_regularity,
    frozen_initial_segment,
    make_frozen_rhs,
    monotone_split,
)
from .report import CheckRecord, Report
from .ivp import ExtremalDirection, IvpResult, ivp_residual, solve_extremal
from .verify import (
    BracketPair,
    DiscontinuityLine,
    LipschitzData,
    MaxPrincipleResult,
    contraction_bound,
    contraction_margin,
    maximum_principle_check,
    transversality_check,
    verify_bounds,
    verify_lower_upper,
)
from .iteration import (
    SolutionPair,
    apply_A,
    default_tol_iter,
    iterate_coupled,
    quasisolution_residual,
    write_trace,
)

__version__ = "0.1.0"
