"""
Exception hierarchy. Library code raises these; cli.py maps them to exit codes.
"""
from typing import Optional


class CharvarError(Exception):
    """Root of every error raised by this package"""


class PresentationSyntaxError(CharvarError, ValueError):
    """Input text does not conform to the file grammar"""

    def __init__(self, reason: str, line: int = 0, column: int = 0,
                 token: Optional[str] = None):
        self.reason = reason
        self.line = line
        self.column = column
        self.token = token
        where = f"line {line}, column {column}: " if line else ""
        what = f" '{token}'" if token is not None else ""
        super().__init__(f"{where}{reason}{what}")


class UnknownGeneratorError(PresentationSyntaxError):
    pass


class ZeroExponentError(PresentationSyntaxError):
    pass


class InvalidRepresentationError(CharvarError, ValueError):
    """Generator images do not define a homomorphism into the group"""

    def __init__(self, message: str, relator_index: Optional[int] = None,
                 relator: Optional[str] = None, residual: Optional[float] = None):
        self.relator_index = relator_index
        self.relator = relator
        self.residual = residual
        super().__init__(message)


class PresentationShapeError(CharvarError, ValueError):
    """Operation needs a presentation of a specific shape"""


class ParityError(CharvarError, ValueError):
    """Parity vector does not define an index-2 subgroup"""


class CocycleError(CharvarError, ValueError):
    """Vector fails the cocycle condition"""


class EnumerationLimitError(CharvarError, ValueError):
    pass


class ConvergenceError(CharvarError, RuntimeError):
    pass
