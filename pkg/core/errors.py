"""
Exception hierarchy shared by every subsystem
"""
from typing import Any, Optional


class HahnLabError(Exception):
    """Base error: remembers which operation raised it"""

    def __init__(self, operation: str, message: str):
        super().__init__(message)
        self.operation = operation
        self.message = message

    def __str__(self):
        return f"{self.operation}: {self.message}"


class InvalidParameterError(HahnLabError, ValueError):
    """Invalid q, c or configuration value"""


class DegenerateParameterError(InvalidParameterError):
    """Parameter hits a singular case, e.g. [m]_q = 0"""


class InvalidArgumentError(HahnLabError, ValueError):
    """Invalid argument to an algebraic or numeric operation"""


class DegenerateInputError(InvalidArgumentError):
    """Input excluded by a precondition (g ≡ a, constant g, T ≈ 0)"""


class ExprSyntaxError(InvalidArgumentError):
    """Malformed function literal"""

    def __init__(self, message: str, offset: int, expected: Optional[str] = None):
        super().__init__("parse_expr", message)
        self.offset = offset
        self.expected = expected

    def __str__(self):
        text = f"{self.operation}: {self.message} at offset {self.offset}"
        if self.expected:
            text += f" (expected {self.expected})"
        return text


class ExprSemanticError(InvalidArgumentError):
    """Well-formed literal without a rational value (e.g. 1/(z-z))"""

    def __init__(self, message: str, offset: int):
        super().__init__("parse_expr", message)
        self.offset = offset

    def __str__(self):
        return f"{self.operation}: {self.message} at offset {self.offset}"


class SolverError(HahnLabError, ArithmeticError):
    """Iterative solver gave up; carries its best iterate"""

    def __init__(self, operation: str, message: str, best_iterate: Any = None):
        super().__init__(operation, message)
        self.best_iterate = best_iterate
