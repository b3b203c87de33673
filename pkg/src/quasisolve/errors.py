"""Exception types raised by quasisolve."""


class QuasisolveError(Exception):
    """Base class for all package errors."""


class DomainError(QuasisolveError, ValueError):
    """A time lies outside the domain (or sub-interval) it was checked against."""


class GridMismatch(QuasisolveError, ValueError):
    """Two grid functions do not share the same node set."""


class EvaluatorError(QuasisolveError):
    """A user-supplied evaluator (f, tau, Lambda, k) failed."""


class BracketViolation(QuasisolveError):
    """An initial value falls outside the order interval [alpha, beta]."""


class NonFiniteRHS(QuasisolveError, FloatingPointError):
    """The frozen right-hand side returned inf or nan."""


class NoConvergence(QuasisolveError):
    """The coupled iteration hit max_iter before the displacement test passed."""


class UnsortedInput(QuasisolveError, ValueError):
    pass


class MissingField(QuasisolveError, ValueError):
    pass


class PremiseFailure(QuasisolveError):
    """A constructor premise failed; constructors usually flag this instead of raising."""


class UnknownExample(QuasisolveError, KeyError):
    pass


class ParamValidation(QuasisolveError, ValueError):
    """Corpus parameters violate one of the inequalities the example relies on."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
