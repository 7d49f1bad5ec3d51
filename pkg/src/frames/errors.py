class FrameError(ValueError):
    """Base class for frame precondition failures. exit_code feeds the CLI contract."""

    exit_code: int = 2


class ZeroColumnError(FrameError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"Column {index} has (numerically) zero norm")


class InvalidShapeError(FrameError):
    pass


class ShapeMismatchError(FrameError):
    pass


class SingularBasisError(FrameError):
    pass


class SeedTooLongError(FrameError):
    def __init__(self, norm: float, margin: float):
        self.norm = norm
        self.margin = margin
        super().__init__(f"Seed norm {norm:.17g} is not below 1 - {margin:g}")


class RowsNotOrthonormalError(FrameError):
    pass


class UnsupportedDimensionError(FrameError):
    pass


class DegeneratePairError(FrameError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"No admissible (j, k) pair for index {index}: all denominators vanish")


class NotUnitNormError(FrameError):
    pass


class TrivialFrameError(FrameError):
    pass


class WrongCountError(FrameError):
    pass


class NotParsevalError(FrameError):
    pass


class WrongDimensionError(FrameError):
    pass


class CharacterizationMismatchError(FrameError):
    pass


class FrameFileError(Exception):
    """Malformed or unreadable frame file."""

    exit_code: int = 3


class UnknownSuiteError(FrameError):
    def __init__(self, suite: str, known: list[str]):
        self.suite = suite
        super().__init__(f"Unknown suite '{suite}', expected one of {known}")
