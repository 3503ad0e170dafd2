"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point or parameter lies outside the closed domain of the operation."""


class UnsupportedOperationError(ValueError):
    """The requested operation is not defined for this solution."""


class MeshFormatError(ValueError):
    """A mesh file failed to parse; the message carries the offending line number."""


class AssemblyError(RuntimeError):
    """Finite element assembly failed (degenerate or inverted triangle)."""


class NumericalError(RuntimeError):
    """A factorization or solve broke down; the message carries the pivot location."""


class StabilityViolationError(NumericalError):
    """The constrained form is not positive definite on the requested subdomain."""


class SizeError(ValueError):
    """Problem dimension exceeds the dense eigenpair bound; use inertia counts instead."""
