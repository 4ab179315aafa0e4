class SgfluidError(Exception):
    """Base class for library errors."""


class CurveError(SgfluidError, ValueError):
    """Curve is degenerate, wrongly oriented, or does not wind once about 0."""


class NonConvergence(SgfluidError):
    def __init__(self, message, residuals=()):
        super().__init__(message)
        self.residuals = list(residuals)


class SingularSystem(SgfluidError):
    pass


class PointOnBoundary(SgfluidError, ValueError):
    pass


class TaylorSignViolation(SgfluidError):
    pass


class DegenerateParametrization(SgfluidError):
    pass


class InvariantViolation(SgfluidError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(SgfluidError, ValueError):
    pass
