"""Exception hierarchy shared by all chronon modules."""


class ChrononError(Exception):
    """Base class for every error raised by chronon."""


class DimensionError(ChrononError, ValueError):
    """Operand shapes or declared subsystem dimensions do not agree."""


class NotHermitianError(ChrononError, ValueError):
    """An operator required to be self-adjoint is not."""


class NotPositive(ChrononError, ValueError):
    """A state has a negative eigenvalue beyond tolerance."""


class NotUnitTrace(ChrononError, ValueError):
    pass


class NotComplete(ChrononError, ValueError):
    """POVM effects do not sum to the identity."""


class EffectOutOfRange(ChrononError, ValueError):
    """An effect has spectrum outside [0, 1]."""


class NotNormalized(ChrononError, ValueError):
    pass


class AllMarginalsZero(ChrononError, ArithmeticError):
    """No clock reading has non-negligible probability, so nothing can be conditioned on."""


class DenominatorVanishes(ChrononError, ArithmeticError):
    pass


class GridTooCoarse(ChrononError, ArithmeticError):
    """A sampled profile cannot resolve the requested frequency, or quadrature did not converge."""


class FilterZeroAtOrigin(ChrononError, ArithmeticError):
    pass


class NonRealResult(ChrononError, ArithmeticError):
    """A quantity that must be real came out with a significant imaginary part."""


class ConfigError(ChrononError):
    pass


class ToleranceFailure(ChrononError):
    pass
