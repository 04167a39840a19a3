"""Exception hierarchy shared across the package."""


class HomroiError(Exception):
    """Base class for all package errors."""


class ZeroDirection(HomroiError):
    """A direction vector with norm below tolerance was supplied."""


class DegenerateRay(HomroiError):
    """Both the spatial part and the level of a ray are (near) zero."""


class DimensionMismatch(HomroiError):
    """Operands live in different ambient dimensions."""


class NumericalFailure(HomroiError):
    """An inner numerical routine did not converge within its budget."""


class SchemaError(HomroiError):
    """A problem document violates the accepted schema."""


class UnknownInstance(HomroiError):
    """A builtin instance name is not registered."""


class InvalidCone(HomroiError):
    """A cone description is empty, trivial or not pointed."""


class NonSolidCone(HomroiError):
    """An operation requiring int C != {} was called on a non-solid cone."""


class SolverFailure(HomroiError):
    """A convex subproblem solver failed; never silently ignored."""


class DomainError(HomroiError):
    """A scalar parameter is outside its admissible open interval."""


class OutOfValidity(DomainError):
    """Radius at or beyond the validity radius of the error bound."""


class NoFeasibleDelta(HomroiError):
    """No precision parameter satisfies the requested error target."""


class NeitherCase(HomroiError):
    """Boundary classification failed both cases: contract violation."""


class UnsupportedDimension(HomroiError):
    """Brute-force verification supports two objectives only."""


class NetTooCoarse(HomroiError):
    """The constructed net misses its required Hausdorff density."""


class PreconditionViolation(HomroiError):
    """A documented precondition check failed on the given input."""
