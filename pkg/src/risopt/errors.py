"""Exception types shared across the package."""


class RisOptError(Exception):
    """Base class for all package errors."""


class InvalidParam(RisOptError):
    """A parameter value violates its documented range or consistency rule."""


class DomainError(RisOptError):
    """An operation was called outside its mathematical domain."""


class Infeasible(RisOptError):
    """No point satisfies the constraint set."""


class Unbounded(RisOptError):
    """The LP objective decreases without bound on the feasible set."""


class InfeasibleLinearization(Infeasible):
    """A linearized subproblem cannot be satisfied even at the count caps."""


class RoundingFailed(Infeasible):
    """No integer neighbor of the relaxed optimum satisfies the exact constraints."""


class NoFeasiblePoint(Infeasible):
    """Exhaustive search found no feasible grid point."""


class ParseError(RisOptError):
    """A config or sweep-spec file could not be parsed."""


class MissingColumn(RisOptError):
    """A plot-data request needs a column the results file does not carry."""
