"""Exception hierarchy shared by every module.

The CLI maps each class to an exit status: validation errors exit with 2,
resource errors with 3 and theorem violations with 4.
"""


class BKCheckError(Exception):
    exit_code = 1


class ValidationError(BKCheckError, ValueError):
    """Bad user input: unknown Cartan type, malformed config, wrong flags."""

    exit_code = 2


class PreconditionError(ValidationError):
    """An operation was called on data that violates its stated hypotheses."""


class ResourceError(BKCheckError, RuntimeError):
    """A configured budget (group size cap, search budget) was exceeded."""

    exit_code = 3


class TheoremViolation(BKCheckError, AssertionError):
    exit_code = 4


class InvariantError(BKCheckError, AssertionError):
    """Internal consistency failure (e.g. a non-exact polynomial division)."""
