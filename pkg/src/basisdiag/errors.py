"""Exception hierarchy shared by all modules."""
from __future__ import annotations


class BasisDiagError(Exception):
    """Base class for every error raised by this package."""


class SignatureMismatch(BasisDiagError):
    pass


class ShapeMismatch(BasisDiagError):
    pass


class UnknownBox(BasisDiagError):
    pass


class UnknownObject(BasisDiagError):
    pass


class NotUnitary(BasisDiagError):
    pass


class InvalidDiagram(BasisDiagError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class StaleMatch(BasisDiagError):
    pass


class MixedObjects(BasisDiagError):
    pass


class BudgetExhausted(BasisDiagError):
    def __init__(self, budget: int, trace=None):
        self.budget = budget
        self.trace = trace
        super().__init__(f"rewrite budget of {budget} steps exhausted")


class CertificationError(BasisDiagError):
    """A rewrite rule whose two sides evaluate differently."""


class ParseError(BasisDiagError):
    def __init__(self, message: str, line: int, column: int, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        text = f"{line}:{column}: {message}"
        if self.expected:
            text += " (expected one of: " + ", ".join(self.expected) + ")"
        super().__init__(text)
