"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: input/domain/capacity problems exit
with 2, numeric failures with 3.
"""


class NetclustError(Exception):
    """Base class for all package errors."""


class InputError(NetclustError):
    """Malformed or out-of-range input (bad ids, bad parameters, parse errors)."""


class DomainError(NetclustError):
    """Operation undefined for this input (e.g. conductance of a link-free set)."""


class CapacityError(NetclustError):
    """Input exceeds a hard size cap of an exhaustive algorithm."""


class NumericError(NetclustError):
    """Numerical failure (solver non-convergence, singular matrix, zero variance)."""
