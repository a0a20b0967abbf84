"""Diagnostic exception hierarchy shared by every stage of the toolchain."""

from __future__ import annotations


class CqasmError(Exception):
    """Base class for user-facing diagnostics.

    Carries an optional source location so the CLI can print
    ``file:line:column: error: message``.
    """

    kind = "error"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def format(self, filename: str = "<input>") -> str:
        where = filename
        if self.line is not None:
            where += f":{self.line}"
            if self.column is not None:
                where += f":{self.column}"
        return f"{where}: {self.kind}: {self.message}"

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"{self.line}:{self.column}: {self.message}"


class LexError(CqasmError):
    kind = "lex error"


class ParseError(CqasmError):
    kind = "parse error"


class SemanticError(CqasmError):
    kind = "semantic error"
