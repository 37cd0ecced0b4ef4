"""
Exception hierarchy shared by all services.

Each exception belongs to one of three families that the CLI maps to exit codes
(see ``app.services.error_handler``): malformed input, exceeded caps, and
internal invariant violations.
"""


class SWeakError(Exception):
    """Base exception for the package."""
    pass


class InputError(SWeakError):
    """Malformed or inconsistent input."""
    pass


class IndexOutOfRange(InputError):
    """An attachment refers to a leaf or gap that does not exist."""
    pass


class MalformedBush(InputError):
    """An edge structure that is not the structure of any bush."""
    pass


class NotAncestor(InputError):
    pass


class NotAnAscentOrDescent(InputError):
    pass


class WrongHoleCount(InputError):
    pass


class NotAPositionVector(InputError):
    """The position data violates the characterization of tree positions."""
    pass


class NotAscents(InputError):
    pass


class NotComparable(InputError):
    pass


class CrossingDiagram(InputError):
    pass


class NotADownSet(InputError):
    """The arc set is not closed under taking subarcs."""
    pass


class InvalidDecoration(InputError):
    pass


class NonPositiveLambda(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotComplete(InputError):
    """The complex does not cover the ambient space."""
    pass


class CapExceeded(SWeakError):
    """An enumeration would exceed its configured bound."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: {size} exceeds the cap of {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class InvariantViolation(SWeakError):
    """An internal check failed; this signals a bug rather than bad input."""
    pass


class NotACongruence(InvariantViolation):
    pass


class DoublingFailed(InvariantViolation):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class SeparationFailed(InvariantViolation):
    pass


class DegenerateConfig(InvariantViolation):
    pass
