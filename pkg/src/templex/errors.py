"""Shared exception types for file formats and lexicon resolution."""

from __future__ import annotations


class ParseError(ValueError):
    """Malformed input in one of the line-oriented file formats."""

    def __init__(self, message: str, *, path: str | None = None,
                 line: int | None = None, column: int | None = None):
        self.path = path
        self.line = line
        self.column = column
        where = path or "<input>"
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


class CycleError(ValueError):
    """A parent chain loops back on itself."""

    def __init__(self, members: list[str], *, what: str = "class"):
        self.members = sorted(members)
        super().__init__(f"cycle in {what} hierarchy: {', '.join(self.members)}")


class LexiconError(ValueError):
    """A lexicon violates a structural constraint after parsing."""
