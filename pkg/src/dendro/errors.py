"""Exception types shared across the package."""


class DendroError(Exception):
    """Base class for all library errors."""


class UnknownVertex(DendroError):
    pass


class LabelNotInS(DendroError):
    pass


class OrderExhausted(DendroError):
    pass


class NotCClosed(DendroError):
    pass


class SamePoint(DendroError):
    pass


class NotPositiveType(DendroError):
    pass


class LimitExceeded(DendroError):
    pass


class NotFixedPoint(DendroError):
    pass


class HypothesesViolated(DendroError):
    pass


class FiniteOrderUnsupported(DendroError):
    pass


class NotInL(DendroError):
    pass


class OrbitConflict(DendroError):
    pass


class OverlappingSupports(DendroError):
    pass


class PointIsFixed(DendroError):
    pass


class DichotomyViolated(DendroError):
    pass


class NotConverging(DendroError):
    pass


class NotTreeable(DendroError):
    pass


class NotConvexExtension(DendroError):
    pass


class NotRootedAtXi(DendroError):
    pass


class NotOnDirection(DendroError):
    pass


class HorizonTooSmall(DendroError):
    pass


class Inconsistent(DendroError):
    pass


class InvalidSystem(DendroError):
    pass


class ConstructionFailed(DendroError):
    """Internal: a construction that should always succeed found no valid placement."""
