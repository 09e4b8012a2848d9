"""Exceptions shared across the package."""

from __future__ import annotations


class BudgetExceeded(RuntimeError):
    """An exponential enumeration was refused because its input is too large."""

    def __init__(self, what: str, size: int, limit: int):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"{what}: size {size} exceeds budget {limit}")


class FormatError(ValueError):
    """Malformed DIMACS / QDIMACS / apx input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
