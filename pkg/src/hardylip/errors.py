"""Exception hierarchy shared by all modules."""


class HardyLipError(Exception):
    """Base class for every error raised by the package."""


class InputError(HardyLipError, ValueError):
    pass


class GraphValidationError(InputError):
    pass


class DomainError(HardyLipError, ValueError):
    pass


class PoleError(HardyLipError, ZeroDivisionError):
    pass


class PreconditionError(HardyLipError):
    pass


class RegionError(PreconditionError):
    pass


class ProximityError(PreconditionError):
    pass


class ResourceError(HardyLipError):
    pass


class BranchPointError(HardyLipError):
    pass


class CrowdingError(HardyLipError):
    pass


class QuadratureConvergenceError(HardyLipError):
    """Adaptive quadrature ran out of panels; ``result`` holds the partial sum."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class SolverError(HardyLipError):
    """Schwarz-Christoffel parameter problem failed; ``residuals`` per vertex."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class InversionError(HardyLipError):
    pass


class ConfigError(HardyLipError):
    pass
