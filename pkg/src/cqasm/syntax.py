"""Lexer, recursive-descent parser and pretty-printer for cQASM v1.0 source text.

The output of :func:`parse` is an *unresolved* syntax tree: names are not
looked up and mnemonics are not checked. That is the job of
:mod:`cqasm.ir`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterator, Sequence, Union

from .errors import LexError, ParseError

KEYWORDS = frozenset({"version", "qubits", "map"})
PUNCTUATION = frozenset("{}|,:.[]()")
_ALLOWED_EXTRA = frozenset("_#-+ \t\r\n")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | identifier | integer | real | punct | newline
    lexeme: str
    line: int
    column: int


@dataclass(frozen=True)
class Location:
    line: int
    column: int


def _is_ident_start(ch: str) -> bool:
    return ch == "_" or ("a" <= ch <= "z") or ("A" <= ch <= "Z")


def _is_ident_char(ch: str) -> bool:
    return _is_ident_start(ch) or ch.isdigit()


def _is_digit(ch: str) -> bool:
    return "0" <= ch <= "9"


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens.

    Comments and horizontal whitespace are dropped, identifiers and keywords
    are lower-cased, and every line break becomes a ``newline`` token.
    """
    tokens: list[Token] = []
    i, n = 0, len(source)
    line, line_start = 1, 0

    def at(j: int) -> str:
        return source[j] if j < n else ""

    while i < n:
        ch = source[i]
        col = i - line_start + 1
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch == "\n":
            tokens.append(Token("newline", "\n", line, col))
            i += 1
            line, line_start = line + 1, i
            continue
        if ch in " \t\r":
            i += 1
            continue
        if _is_ident_start(ch):
            j = i + 1
            while j < n and _is_ident_char(source[j]):
                j += 1
            # binary-controlled mnemonics such as ``c-x`` are single lexemes
            if at(j) == "-" and _is_ident_start(at(j + 1)):
                j += 2
                while j < n and _is_ident_char(source[j]):
                    j += 1
            word = source[i:j].lower()
            tokens.append(Token("keyword" if word in KEYWORDS else "identifier", word, line, col))
            i = j
            continue
        number_start = _is_digit(ch) or (ch == "." and _is_digit(at(i + 1)))
        signed = ch in "+-" and (
            _is_digit(at(i + 1)) or (at(i + 1) == "." and _is_digit(at(i + 2)))
        )
        if number_start or signed:
            j = i + 1 if signed else i
            while j < n and _is_digit(source[j]):
                j += 1
            kind = "integer"
            if at(j) == ".":
                kind = "real"
                j += 1
                while j < n and _is_digit(source[j]):
                    j += 1
            if _is_ident_start(at(j)):
                raise LexError(f"malformed number {source[i:j + 1]!r}", line, col)
            lexeme = source[i:j]
            if lexeme.startswith("+"):
                lexeme = lexeme[1:]
            tokens.append(Token(kind, lexeme, line, col))
            i = j
            continue
        if ch in PUNCTUATION:
            tokens.append(Token("punct", ch, line, col))
            i += 1
            continue
        if ch in _ALLOWED_EXTRA:
            raise LexError(f"unexpected character {ch!r}", line, col)
        raise LexError(f"invalid character {ch!r}", line, col)
    return tokens


# ---------------------------------------------------------------------------
# Syntax tree

@dataclass(frozen=True)
class IndexRef:
    """``q[...]`` or ``b[...]`` with the index expression already expanded."""

    register: str
    indices: tuple[int, ...]
    loc: Location | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Name:
    name: str
    loc: Location | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Number:
    value: Union[int, float]
    is_integer: bool
    loc: Location | None = field(default=None, compare=False)


Operand = Union[IndexRef, Name, Number]


@dataclass(frozen=True)
class VersionStmt:
    version: float
    loc: Location | None = field(default=None, compare=False)


@dataclass(frozen=True)
class QubitsStmt:
    count: int
    loc: Location | None = field(default=None, compare=False)


@dataclass(frozen=True)
class MapStmt:
    target: Operand
    name: str
    loc: Location | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SubcircuitHeader:
    name: str
    iterations: int | None = None
    loc: Location | None = field(default=None, compare=False)


@dataclass(frozen=True)
class RawInstruction:
    mnemonic: str
    operands: tuple[Operand, ...] = ()
    loc: Location | None = field(default=None, compare=False)


@dataclass(frozen=True)
class BundleNode:
    instructions: tuple[RawInstruction, ...]
    loc: Location | None = field(default=None, compare=False)


SyntaxNode = Union[VersionStmt, QubitsStmt, MapStmt, SubcircuitHeader, BundleNode]


# ---------------------------------------------------------------------------
# Parser

def expand_indices(items: Sequence[tuple[int, int]], loc: Location | None = None) -> tuple[int, ...]:
    """Expand ``(start, stop)`` pairs (inclusive) into an ordered, de-duplicated tuple."""
    if not items:
        raise ParseError("empty index expression", *(_loc_args(loc)))
    out: dict[int, None] = {}
    for start, stop in items:
        if stop < start:
            raise ParseError(f"descending index range {start}:{stop}", *(_loc_args(loc)))
        for k in range(start, stop + 1):
            out.setdefault(k, None)
    return tuple(out)


def _loc_args(loc: Location | None) -> tuple[int | None, int | None]:
    return (loc.line, loc.column) if loc else (None, None)


class Parser:
    def __init__(self, tokens: Sequence[Token]):
        self.tokens = list(tokens)
        self.pos = 0

    # -- token helpers ------------------------------------------------------
    def peek(self, offset: int = 0) -> Token | None:
        k = self.pos + offset
        return self.tokens[k] if k < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        self.pos += 1
        return tok

    def at_punct(self, ch: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "punct" and tok.lexeme == ch

    def expect_punct(self, ch: str, what: str | None = None) -> Token:
        if not self.at_punct(ch):
            self.error(what or f"expected {ch!r}")
        return self.advance()

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        if tok is None and self.tokens:
            last = self.tokens[-1]
            raise ParseError(message, last.line, last.column + len(last.lexeme))
        if tok is None:
            raise ParseError(message, 1, 1)
        raise ParseError(message, tok.line, tok.column)

    def skip_newlines(self) -> None:
        while (tok := self.peek()) is not None and tok.kind == "newline":
            self.pos += 1

    # -- grammar ------------------------------------------------------------
    def parse_program(self) -> list[SyntaxNode]:
        nodes: list[SyntaxNode] = []
        while True:
            self.skip_newlines()
            if self.peek() is None:
                return nodes
            nodes.append(self.statement())
            tok = self.peek()
            if tok is not None and tok.kind != "newline":
                self.error(f"unexpected {tok.lexeme!r} after statement")

    def statement(self) -> SyntaxNode:
        tok = self.peek()
        loc = Location(tok.line, tok.column)
        if tok.kind == "keyword":
            self.advance()
            if tok.lexeme == "version":
                num = self.advance() if self.peek() else None
                if num is None or num.kind not in ("real", "integer"):
                    self.error("expected version number after 'version'", num)
                return VersionStmt(float(num.lexeme), loc)
            if tok.lexeme == "qubits":
                num = self.peek()
                if num is None or num.kind != "integer":
                    self.error("expected qubit count after 'qubits'")
                self.advance()
                return QubitsStmt(int(num.lexeme), loc)
            # map
            target = self.operand()
            self.expect_punct(",", "expected ',' in map statement")
            name = self.peek()
            if name is None or name.kind != "identifier":
                self.error("expected alias name in map statement")
            self.advance()
            return MapStmt(target, name.lexeme, loc)
        if tok.kind == "punct" and tok.lexeme == ".":
            self.advance()
            name = self.peek()
            if name is None or name.kind != "identifier":
                self.error("expected sub-circuit name after '.'")
            self.advance()
            iterations = None
            if self.at_punct("("):
                self.advance()
                count = self.peek()
                if count is None or count.kind != "integer":
                    self.error("expected integer iteration count after '('")
                self.advance()
                iterations = int(count.lexeme)
                self.expect_punct(")", "expected ')' after iteration count")
            return SubcircuitHeader(name.lexeme, iterations, loc)
        if tok.kind == "punct" and tok.lexeme == "{":
            self.advance()
            instrs = []
            while True:
                self.skip_newlines()
                if self.peek() is None:
                    self.error("unclosed '{'", tok)
                instrs.append(self.instruction(in_bundle=True))
                self.skip_newlines()
                if self.at_punct("|"):
                    self.advance()
                    continue
                if self.at_punct("}"):
                    self.advance()
                    break
                if self.peek() is None:
                    self.error("unclosed '{'", tok)
                self.error("expected '|' or '}' in parallel bundle")
            return BundleNode(tuple(instrs), loc)
        return BundleNode((self.instruction(in_bundle=False),), loc)

    def instruction(self, in_bundle: bool) -> RawInstruction:
        tok = self.peek()
        if tok is None or tok.kind != "identifier":
            self.error("expected instruction mnemonic")
        self.advance()
        loc = Location(tok.line, tok.column)
        operands: list[Operand] = []
        if not self._at_instruction_end():
            operands.append(self.operand())
            while not self._at_instruction_end():
                if self.at_punct(","):
                    self.advance()
                    operands.append(self.operand())
                elif (nxt := self.peek()).kind in ("integer", "real"):
                    # trailing numeric parameters may be whitespace-separated
                    operands.append(self.operand())
                else:
                    self.error(f"expected ',' between operands, got {nxt.lexeme!r}")
        return RawInstruction(tok.lexeme, tuple(operands), loc)

    def _at_instruction_end(self) -> bool:
        tok = self.peek()
        return tok is None or tok.kind == "newline" or (
            tok.kind == "punct" and tok.lexeme in "|}"
        )

    def operand(self) -> Operand:
        tok = self.peek()
        if tok is None:
            self.error("expected operand")
        loc = Location(tok.line, tok.column)
        if tok.kind in ("integer", "real"):
            self.advance()
            if tok.kind == "integer":
                return Number(int(tok.lexeme), True, loc)
            return Number(float(tok.lexeme), False, loc)
        if tok.kind == "identifier":
            self.advance()
            if self.at_punct("["):
                if tok.lexeme not in ("q", "b"):
                    self.error(f"indexing is only defined on 'q' and 'b', not {tok.lexeme!r}", tok)
                return IndexRef(tok.lexeme, self.index_expression(), loc)
            return Name(tok.lexeme, loc)
        self.error(f"expected operand, got {tok.lexeme!r}")

    def index_expression(self) -> tuple[int, ...]:
        open_tok = self.expect_punct("[")
        loc = Location(open_tok.line, open_tok.column)
        items: list[tuple[int, int]] = []
        if self.at_punct("]"):
            self.error("empty index expression")
        while True:
            start = self._index_int()
            stop = start
            if self.at_punct(":"):
                self.advance()
                stop = self._index_int()
            items.append((start, stop))
            if self.at_punct(","):
                self.advance()
                continue
            self.expect_punct("]", "expected ',' or ']' in index expression")
            return expand_indices(items, loc)

    def _index_int(self) -> int:
        tok = self.peek()
        if tok is None or tok.kind != "integer" or tok.lexeme.startswith("-"):
            self.error("malformed index expression")
        self.advance()
        return int(tok.lexeme)


def parse(tokens: Sequence[Token]) -> list[SyntaxNode]:
    """Parse a token sequence into statements in source order."""
    return Parser(tokens).parse_program()


def parse_source(source: str) -> list[SyntaxNode]:
    return parse(tokenize(source))


def parse_index_expression(raw: str) -> list[int]:
    """Expand the inside of a bracketed index, e.g. ``"0:1,3,5:6"`` -> ``[0, 1, 3, 5, 6]``."""
    raw = raw.strip()
    if not raw.startswith("["):
        raw = f"[{raw}]"
    parser = Parser(tokenize(raw))
    indices = parser.index_expression()
    if parser.peek() is not None:
        parser.error("trailing input after index expression")
    return list(indices)


# ---------------------------------------------------------------------------
# Pretty-printing

def format_indices(indices: Sequence[int]) -> str:
    """Compress runs of consecutive indices into ``i:j`` ranges."""
    parts: list[str] = []
    run: list[int] = []
    for k in indices:
        if run and k == run[-1] + 1:
            run.append(k)
            continue
        if run:
            parts.append(_fmt_run(run))
        run = [k]
    if run:
        parts.append(_fmt_run(run))
    return ",".join(parts)


def _fmt_run(run: list[int]) -> str:
    if len(run) == 1:
        return str(run[0])
    return f"{run[0]}:{run[-1]}"


def format_number(value: Union[int, float]) -> str:
    if isinstance(value, int):
        return str(value)
    # positional notation only: the lexer has no exponent syntax
    text = format(Decimal(repr(float(value))), "f")
    return text if "." in text else text + ".0"


def format_operand(op: Operand) -> str:
    if isinstance(op, IndexRef):
        return f"{op.register}[{format_indices(op.indices)}]"
    if isinstance(op, Name):
        return op.name
    return format_number(op.value)


def format_raw_instruction(instr: RawInstruction) -> str:
    if not instr.operands:
        return instr.mnemonic
    return f"{instr.mnemonic} " + ", ".join(format_operand(o) for o in instr.operands)


def _iter_lines(nodes: Sequence[SyntaxNode]) -> Iterator[str]:
    for node in nodes:
        if isinstance(node, VersionStmt):
            yield f"version {format_number(node.version)}"
        elif isinstance(node, QubitsStmt):
            yield f"qubits {node.count}"
        elif isinstance(node, MapStmt):
            yield f"map {format_operand(node.target)}, {node.name}"
        elif isinstance(node, SubcircuitHeader):
            suffix = "" if node.iterations is None else f"({node.iterations})"
            yield f".{node.name}{suffix}"
        elif len(node.instructions) == 1:
            yield format_raw_instruction(node.instructions[0])
        else:
            yield "{ " + " | ".join(format_raw_instruction(i) for i in node.instructions) + " }"


def format_nodes(nodes: Sequence[SyntaxNode]) -> str:
    """Render a syntax tree back to canonical cQASM text."""
    return "".join(line + "\n" for line in _iter_lines(nodes))
