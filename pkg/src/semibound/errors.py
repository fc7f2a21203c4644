"""Exception hierarchy. Every domain failure derives from SemiboundError."""


class SemiboundError(ValueError):
    """Base class for domain and numerical failures."""


class NonPositiveVariance(SemiboundError):
    pass


class BetaOutOfRange(SemiboundError):
    pass


class WrongTailDirection(SemiboundError):
    pass


class InfeasibleBeta(SemiboundError):
    pass


class GammaOutOfRange(SemiboundError):
    pass


class Infeasible(SemiboundError):
    pass


class NoRootInBracket(SemiboundError):
    pass


class CriticalRatioOutOfRange(SemiboundError):
    pass


class CorrelationOutOfRange(SemiboundError):
    pass


class DegenerateDenominator(SemiboundError):
    pass


class InfeasibleMasses(SemiboundError):
    pass


class EnumerationTooLarge(SemiboundError):
    pass


class TooLarge(SemiboundError):
    pass


class TooFewRows(SemiboundError):
    pass


class ParseError(SemiboundError):
    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)
