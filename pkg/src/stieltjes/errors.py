"""Exception hierarchy.  Everything raised on bad input derives from StieltjesError."""


class StieltjesError(ValueError):
    pass


class NegativeMass(StieltjesError):
    pass


class BadInterval(StieltjesError):
    pass


class OverlappingPieces(StieltjesError):
    pass


class NonPositiveX(StieltjesError):
    pass


class OnCut(StieltjesError):
    pass


class ExpressionSyntaxError(StieltjesError):
    def __init__(self, message: str, position: int):
        self.position = position
        self.message = message
        super().__init__(f"SyntaxError at {position}: {message}")


class UnknownFunction(StieltjesError):
    def __init__(self, name: str, position: int):
        self.name = name
        self.position = position
        super().__init__(f"UnknownFunction {name!r} at {position}")


class DomainError(StieltjesError):
    pass


class InsufficientOrder(StieltjesError):
    pass


class BadIndices(StieltjesError):
    pass


class OutOfRange(StieltjesError):
    pass


class InsufficientLength(StieltjesError):
    pass


class BadOrderPair(StieltjesError):
    pass


class NotCompletelyMonotone(StieltjesError):
    """A moment sequence failed the difference test beyond tolerance."""

    def __init__(self, message: str, violation=None):
        self.violation = violation
        super().__init__(message)
