"""Exception hierarchy.

Every precondition violation raises a subclass of :class:`ValidationError`;
the CLI maps those to exit status 2. Parse failures raise
:class:`MatrixParseError` and map to exit status 1.
"""


class ValidationError(ValueError):
    """Input violates a mathematical precondition."""


class NonSquare(ValidationError):
    pass


class NonFinite(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class NotNormal(ValidationError):
    pass


class NoConvergence(ValidationError):
    pass


class NotUnit(ValidationError):
    pass


class ZeroVector(ValidationError):
    pass


class NotIdempotent(ValidationError):
    pass


class TraceNotInteger(ValidationError):
    pass


class MaxIterations(ValidationError):
    pass


class NotOrthogonal(ValidationError):
    def __init__(self, i, j, msg=None):
        self.i, self.j = i, j
        super().__init__(msg or f"members {i} and {j} are not orthogonal")


class RankOverflow(ValidationError):
    pass


class SelectorMismatch(ValidationError):
    pass


class ZeroBranch(ValidationError):
    pass


class TooManyRoots(ValidationError):
    def __init__(self, count, cap):
        self.count, self.cap = count, cap
        super().__init__(f"{count} roots exceed the cap of {cap}")


class NotInvolution(ValidationError):
    pass


class NotScaledInvolution(ValidationError):
    pass


class UnknownGate(ValidationError):
    pass


class MissingParameter(ValidationError):
    pass


class NotOrthonormal(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class ExponentOutOfRange(ValidationError):
    pass


class WeightsInvalid(ValidationError):
    pass


class NotDensity(ValidationError):
    pass


class MatrixParseError(ValueError):
    """Malformed matrix or report text."""


class BadHeader(MatrixParseError):
    pass


class BadToken(MatrixParseError):
    def __init__(self, line, col, token):
        self.line, self.col, self.token = line, col, token
        super().__init__(f"line {line}, column {col}: cannot parse {token!r}")


class CountMismatch(MatrixParseError):
    pass
