"""Exception hierarchy."""


class Banach2DError(Exception):
    """Base class for all library errors."""


class DimensionError(Banach2DError, ValueError):
    pass


class UnsupportedDimension(Banach2DError, ValueError):
    pass


class ZeroVectorError(Banach2DError, ValueError):
    pass


class NumericalFailure(Banach2DError, RuntimeError):
    pass


class ZeroOperatorError(Banach2DError, ValueError):
    pass


class NotOrthogonalError(Banach2DError, ValueError):
    pass


class ConeUnsupported(Banach2DError, ValueError):
    pass


class WrongSpaceError(Banach2DError, ValueError):
    pass


class InvalidPError(Banach2DError, ValueError):
    pass


class HypothesisError(Banach2DError, ValueError):
    """Operator or spaces fall outside the hypotheses of the classification."""


class NormNotOneError(Banach2DError, ValueError):
    pass


class DecompositionNotFound(Banach2DError, RuntimeError):
    pass


class AttainmentNotIsolated(Banach2DError, RuntimeError):
    pass


class InvalidFamilyParams(Banach2DError, ValueError):
    pass
