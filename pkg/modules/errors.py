"""
Exception hierarchy for the inequality verifier.

Every error carries the command-line exit code it maps to, so the CLI and
the JSON API can translate failures without inspecting messages.
"""


class VerificationError(Exception):
    """Base class for all errors raised by this package"""
    exit_code = 2
    http_status = 400


class DomainError(VerificationError, ValueError):
    """An argument lies outside the domain of a function"""


class PreconditionError(VerificationError, ValueError):
    """A hypothesis of the checked inequality is not satisfied"""


class CommutationError(PreconditionError):
    """Two matrices that must commute do not"""


class SingularityError(PreconditionError):
    """A matrix that must be inverted has eigenvalues below the floor"""


class DimensionError(VerificationError, ValueError):
    """Matrix or sequence shapes are incompatible"""


class NumericError(VerificationError, ArithmeticError):
    """A numerical routine failed, e.g. eigensolver non-convergence"""
    exit_code = 3
    http_status = 500


class OracleMismatchError(NumericError):
    """The matrix path and the scalar eigenvalue oracle disagree"""


class ConfigError(VerificationError, ValueError):
    """Invalid trial configuration or command arguments"""


class UnknownSuiteError(ConfigError):
    """Requested suite or operation is not registered"""
