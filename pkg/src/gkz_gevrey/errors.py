"""Exception hierarchy shared by every module of the package."""


class GKZError(Exception):
    """Base class for all errors raised by gkz_gevrey."""


class IncompatibleTruncation(GKZError):
    pass


class BadMatrix(GKZError):
    """Raised when A=(a b) violates 0 < a < b, gcd(a, b) = 1."""


class NonIntegerX2Exponent(GKZError):
    pass


class TooFewTerms(GKZError):
    pass


class InconclusiveGevreyFit(GKZError):
    pass


class NonNaturalExponent(GKZError):
    pass


class ResonantTerm(GKZError):
    pass


class NotInTargetStratum(GKZError):
    pass


class ResonantClass(GKZError):
    """The residue class k has (beta - b k)/a in N; use the modified-series variant."""


class NonGevreyInput(GKZError):
    pass


class BoxTooSmall(GKZError):
    pass


class ParseError(GKZError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class ConstraintError(GKZError):
    def __init__(self, rule, message):
        self.rule = rule
        super().__init__(f"[{rule}] {message}")
