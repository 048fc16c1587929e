"""Exception hierarchy with stable CLI exit codes.

Exit-code contract: 0 success, 1 input/usage error, 2 constraint-infeasible,
3 numerical failure.
"""


class IslandctlError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InputError(IslandctlError):
    """Malformed or invalid input data (files, arguments)."""

    exit_code = 1


class ParseError(InputError):
    """Syntactically or structurally invalid input file."""


class ValidationError(InputError):
    """An input-model invariant is violated (dangling reference, bad limits...)."""


class UsageError(InputError):
    """Invalid command invocation (bad k, missing path, k != group count)."""


class InfeasibleError(IslandctlError):
    """The solve cannot produce a scheme honoring the constraints."""

    exit_code = 2


class ZeroDegreeError(InfeasibleError):
    """A bus has zero total edge weight."""


class DisconnectedGraphError(InfeasibleError):
    """The constrained graph is not connected."""


class MustLinkViolationError(InfeasibleError):
    """A must-link pair ended up in different islands (big-M insufficient)."""


class CannotLinkViolationError(InfeasibleError):
    """A cannot-link pair (non-coherent generators or VSC terminals) shares an island."""


class IslandConnectivityError(InfeasibleError):
    """An island remained physically disconnected after repair."""


class NumericalError(IslandctlError):
    """Numerical failure in matrix construction or eigensolve."""

    exit_code = 3


class SingularMatrixError(NumericalError):
    """Y-bus is singular or near-singular."""


class DegenerateDistanceError(NumericalError):
    """Electrical distance below the degeneracy floor."""


class EigensolverError(NumericalError):
    """Eigensolver failed to converge or produced invalid pairs."""
