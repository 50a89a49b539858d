"""Exception types raised across the package."""


class IrsTwrnError(ValueError):
    """Base class for all validation and numerical errors in this package."""


class InvalidDistanceError(IrsTwrnError):
    pass


class InvalidGeometryError(IrsTwrnError):
    pass


class InvalidConfigError(IrsTwrnError):
    pass


class DimensionError(IrsTwrnError):
    pass


class UnsupportedOrderError(IrsTwrnError):
    pass


class InvalidResolutionError(IrsTwrnError):
    pass


class DegeneratePilotError(IrsTwrnError):
    pass


class SingularGramError(IrsTwrnError):
    """Gram matrix of a training matrix is singular to working precision."""

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class SingularDesignError(IrsTwrnError):
    """The cascaded LS design matrix Q·X is too ill-conditioned to invert."""

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition
