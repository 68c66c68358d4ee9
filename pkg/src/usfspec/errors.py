"""Exception hierarchy shared by all modules."""


class ValidationError(ValueError):
    """Invalid parameters or configuration."""


class DegenerateFrequency(ValidationError):
    """Frequency at which 1 - cos(wT) (or sin(wT/2)) vanishes."""


class SnapError(ValueError):
    """Residue sample not within tolerance of an integer multiple of 2*lambda."""


class SingularFim(ArithmeticError):
    """Fisher information matrix is numerically singular."""


class EstimationError(RuntimeError):
    """Base class for estimator failures."""


class OrderTooLarge(EstimationError, ValidationError):
    """Model order / pencil parameter incompatible with the number of samples."""


class RankDeficient(EstimationError):
    """Fewer conjugate pairs than requested components were recovered.

    The partially filled estimate is available as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
