"""Exception types shared across the package."""


class FormatError(ValueError):
    """Malformed binary payload; ``offset`` is the byte where parsing failed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class NumericalError(RuntimeError):
    """Hard numerical failure: non-finite values or exhausted safeguards."""
