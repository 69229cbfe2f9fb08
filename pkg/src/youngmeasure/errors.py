"""Exception types shared across the package.

The CLI maps these onto exit codes: input/validation problems exit 1,
numerical failures exit 2, I/O problems exit 3.
"""


class YoungMeasureError(Exception):
    """Base class for all package-specific errors."""


class InputError(YoungMeasureError):
    """Bad user input: unparseable expressions, malformed specs, invalid flags."""


class NumericalError(YoungMeasureError):
    """A computation could not be carried out (critical point, no coverage, ...)."""


class ParseError(InputError):
    """Expression text could not be parsed.

    ``offset`` is the byte offset of the offending token in the UTF-8
    encoding of the source text.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte {offset})")
        self.offset = offset


class EvaluationError(NumericalError):
    """Expression evaluation left its domain (log/sqrt/division/power)."""


class SpecError(InputError):
    """A function spec or derived object violates a structural constraint."""


class PointNotCoveredError(NumericalError):
    """Evaluation point lies on a piece boundary or in the truncated tail."""


class NotSimpleError(InputError):
    """Operation requires a simple function but a piece is non-constant."""


class NonzeroTailError(InputError):
    """Operation requires a fully covered domain but tail mass is positive."""


class NonInvertibleError(NumericalError):
    """Piece is neither marked monotone nor equipped with an inverse."""


class DerivativeTooSmallError(NumericalError):
    """|f'| at a preimage fell below threshold: the density blows up there."""

    def __init__(self, piece_index: int, y: float, derivative: float):
        super().__init__(
            f"derivative too small on piece {piece_index} at y={y!r}: "
            f"|f'|={abs(derivative):.3e} <= 1e-10"
        )
        self.piece_index = piece_index
        self.y = y
        self.derivative = derivative


class NoCoverageError(NumericalError):
    """Every sampled point was rejected; the function covers none of them."""


class TooManyFailuresError(NumericalError):
    """More than 0.1% of Monte Carlo evaluations failed."""
