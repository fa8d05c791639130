"""Exception types raised across the package."""


class PhotomechError(Exception):
    """Base class for all package errors."""


class SingularMatrix(PhotomechError):
    pass


class NonPositiveJacobian(PhotomechError):
    """Raised when det(F) <= 0, i.e. an inverted material point or element."""

    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class NonConvergence(PhotomechError):
    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class ConstraintViolation(PhotomechError):
    """The degenerate electric momentum left zero. Indicates a bug, never physics."""


class ConfigError(PhotomechError):
    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class UnknownField(PhotomechError):
    pass
