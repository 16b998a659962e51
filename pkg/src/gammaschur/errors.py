"""Exception types raised across the package.

Every error carries a stable class name; the CLI reports it verbatim in its
structured stderr payload.
"""


class GammaSchurError(Exception):
    """Base class for all domain errors."""


class AllWeightsZero(GammaSchurError, ValueError):
    pass


class NonpositiveShapeOrRate(GammaSchurError, ValueError):
    pass


class NegativeWeight(GammaSchurError, ValueError):
    pass


class SeriesDivergence(GammaSchurError, ArithmeticError):
    """The mixture series cannot be certified within the iteration cap."""


class NotMajorized(GammaSchurError, ValueError):
    pass


class NotStrictlyMajorized(GammaSchurError, ValueError):
    pass


class NotComparable(GammaSchurError, ValueError):
    pass


class TailBoundMissing(GammaSchurError, ValueError):
    pass


class Unreachable(GammaSchurError, ArithmeticError):
    """No sample size up to the cap meets the requested probability."""


class NotSymmetric(GammaSchurError, ValueError):
    pass


class NotPSD(GammaSchurError, ValueError):
    pass


class ParseError(GammaSchurError, ValueError):
    pass


class TraceMismatch(GammaSchurError, ValueError):
    pass
