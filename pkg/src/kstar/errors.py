"""Exception hierarchy shared by every layer of the package."""


class KStarError(Exception):
    """Base class for numerical errors raised by the library."""


class SingularPoint(KStarError):
    pass


class PathTooCloseToSingularity(KStarError):
    pass


class DegenerateParameter(KStarError):
    pass


class StepSizeTooLarge(KStarError):
    pass


class WrongClass(KStarError):
    pass


class IndexOutOfRange(KStarError):
    pass


class OutOfStrip(KStarError):
    pass


class WrongRegion(KStarError):
    pass


class OutOfHalfPlane(KStarError):
    pass


class ContourHitsPole(KStarError):
    pass


class ZeroComponent(KStarError):
    pass


class PoleError(KStarError):
    pass


class RangeError(KStarError):
    pass


class DomainError(KStarError):
    pass


class OutOfRegion(KStarError):
    pass
