"""Exception hierarchy shared by every module."""


class MatOrderError(Exception):
    """Base class for all package errors."""


class InvalidInput(MatOrderError, ValueError):
    """Input is malformed, not Hermitian, or outside the admitted range."""


class NumericalDomain(MatOrderError, ValueError):
    """An operation is undefined for the given spectrum or parameter."""


class NonConvergence(MatOrderError, RuntimeError):
    """A regularization ladder failed to stabilise."""


class SupportViolation(MatOrderError, ValueError):
    """A required support inclusion does not hold."""


class DegenerateBase(MatOrderError, ValueError):
    """Base point of an expansion has coincident eigenvalues."""


class OracleUnstable(MatOrderError, RuntimeError):
    """A numerical oracle did not settle within its self-check."""
