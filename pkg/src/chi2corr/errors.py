"""Exception hierarchy.

Validation errors (bad shapes, missing fields, asymmetric tensors) map to
CLI exit code 1; numerical failures (a covariance that is not a projector)
map to exit code 2.
"""


class ModelError(ValueError):
    """Base class for anything wrong with a cumulant model or its inputs."""

    exit_code = 1


class SchemaError(ModelError):
    """Missing field or wrong dimensions in a model document."""


class DimensionError(ModelError):
    pass


class SymmetryError(ModelError):
    """A tensor is not invariant under index permutation."""

    def __init__(self, message, deviation=None, index=None, partner=None):
        super().__init__(message)
        self.deviation = deviation
        self.index = index
        self.partner = partner


class NotOrthonormalError(ModelError):
    pass


class NumericalError(ModelError):
    exit_code = 2


class IdempotencyError(NumericalError):
    """The leading covariance fails the V @ V == V gate."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NonIntegerTraceError(NumericalError):
    pass


class EigenvalueNotNearProjector(NumericalError):
    pass


class NonMonotoneWarning(UserWarning):
    """The corrected CDF decreases somewhere; the 1/n correction is too large."""
