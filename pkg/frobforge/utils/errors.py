"""Exceptions raised by frobforge."""


class FrobforgeError(Exception):
    """Base class for all frobforge errors."""


class DomainError(FrobforgeError, ValueError):
    """Point lies outside the domain of a potential."""


class SingularMetric(FrobforgeError, ArithmeticError):
    """Metric has an eigenvalue too close to zero to be inverted."""


class NotInCone(DomainError):
    """Matrix or vector is not strictly inside the cone."""


class DegeneratePlane(FrobforgeError, ValueError):
    """Two tangent vectors do not span a plane."""


class ShapeMismatch(FrobforgeError, ValueError):
    """Operands live on different grids, sizes or fields."""


class NonConvergence(FrobforgeError, RuntimeError):
    """Iterative solver exhausted its budget."""


class NonPositiveRHS(FrobforgeError, ValueError):
    """Monge-Ampere right-hand side is not strictly positive."""


class MassMismatch(FrobforgeError, ValueError):
    """Source and target measures carry different total mass."""


class UndefinedOnSupport(FrobforgeError, ValueError):
    """Map is not defined on part of the support of a measure."""


class ParamOutOfRange(FrobforgeError, ValueError):
    """Scalar parameter outside its admissible range."""


class SizeMismatch(FrobforgeError, ValueError):
    """Point configurations have different cardinality."""


class DiagonalViolation(FrobforgeError, ValueError):
    """Configuration contains coincident points."""


class ParseError(FrobforgeError, ValueError):
    """Polynomial string could not be parsed."""


class NotInvertible(FrobforgeError, ValueError):
    """Exponent matrix is singular or not square."""


class NonPositiveWeight(FrobforgeError, ValueError):
    """Quasi-homogeneous weight is zero or negative."""


class NotDecomposable(FrobforgeError, ValueError):
    """Polynomial does not split into Fermat, loop and chain atoms."""


class NotGroupElement(FrobforgeError, ValueError):
    """Phase vector is not a diagonal symmetry of the polynomial."""


class NotSubgroup(FrobforgeError, ValueError):
    """Group is not contained in the diagonal symmetry group."""


class InconsistentGroup(FrobforgeError, ArithmeticError):
    """Group order disagrees with the determinant or the Smith normal form."""


class RootFindFailure(FrobforgeError, RuntimeError):
    """No admissible root found within the retry budget."""


class UsageError(FrobforgeError, ValueError):
    """Invalid command line or configuration."""


class ReportIOError(FrobforgeError, OSError):
    """Report could not be written."""


class CFLWarning(UserWarning):
    """Requested time step moves characteristics more than the CFL limit."""
