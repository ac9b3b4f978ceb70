"""Exception hierarchy shared by every module."""


class CategoryError(Exception):
    """Base class for engine errors (mapped to exit code 3 by the CLI)."""


class SizeBoundExceeded(CategoryError):
    pass


class NotRepresentable(CategoryError):
    pass


class NoCoproduct(CategoryError):
    pass


class NoProduct(CategoryError):
    pass


class NoColimit(CategoryError):
    pass


class AxiomViolation(CategoryError):
    def __init__(self, message, witness=None):
        super().__init__(message if witness is None else f"{message}: {witness!r}")
        self.witness = witness


class NotPrime(CategoryError):
    pass


class EmptyPointSet(CategoryError):
    pass


class NoLocalization(CategoryError):
    def __init__(self, message, point=None, transcript=None):
        super().__init__(message)
        self.point = point
        self.transcript = transcript


class NotEnoughPoints(CategoryError):
    pass


class MissingConnectingMorphism(CategoryError):
    pass


class AllPointsSkipped(CategoryError):
    pass
