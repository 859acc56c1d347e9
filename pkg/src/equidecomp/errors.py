"""Exception hierarchy shared by every module of the package."""


class EquidecompError(Exception):
    """Base class for all errors raised by equidecomp."""


class InvalidPolygon(EquidecompError):
    pass


class DegenerateTriangle(EquidecompError):
    pass


class NotUnimodular(EquidecompError):
    pass


class NotMinimal(EquidecompError):
    pass


class PreconditionViolated(EquidecompError):
    pass


class NotInvertibleModD(EquidecompError):
    pass


class NotPrimitive(EquidecompError):
    pass


class WeightMismatch(EquidecompError):
    pass


class ClassMismatch(EquidecompError):
    pass


class DenominatorMismatch(EquidecompError):
    pass


class LevelMismatch(EquidecompError):
    pass


class InterpolationMismatch(EquidecompError):
    pass


class NotAdjacent(EquidecompError):
    pass


class NotParallelogram(EquidecompError):
    pass


class InvalidPairing(EquidecompError):
    pass


class CapExceeded(EquidecompError):
    pass


class Truncated(EquidecompError):
    """A state-space search hit its limits before it could answer."""


class PathInvalid(EquidecompError):
    pass


class CompatibilityViolated(EquidecompError):
    pass
