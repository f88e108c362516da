"""Formula text -> syntax tree.

Hand-rolled lexer and recursive-descent parser.  Precedence, loosest to
tightest: comparisons, ``&``, ``+ -``, ``* /``, ``^``, unary minus.
All binary operators are left-associative; unary minus binds tighter
than ``^`` (so ``-2^2`` is ``(-2)^2``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..addressing import MAX_COLS, MAX_ROWS, column_index
from ..errors import FormulaSyntaxError
from ..values import ErrorKind
from .ast import (
    FUNCTIONS,
    BoolLit,
    Call,
    CellRef,
    ErrorLit,
    Node,
    NumberLit,
    RangeRef,
    TextLit,
    Unary,
    Binary,
    make_range,
)

_TOKEN_RES = [
    ("WS", re.compile(r"\s+")),
    ("NUMBER", re.compile(r"(?:\d+(?:\.\d+)?|\.\d+)(?:[eE][+-]?\d+)?")),
    ("STRING", re.compile(r'"(?:[^"]|"")*"')),
    ("ERROR", re.compile(r"#(?:DIV/0!|REF!|N/A|VALUE!|NAME\?|CYCLE!)")),
    ("SQUOTE", re.compile(r"'(?:[^']|'')*'")),
    ("REF", re.compile(r"(\$?)([A-Za-z]{1,3})(\$?)([0-9]+)(?![A-Za-z0-9_])")),
    ("WORD", re.compile(r"[A-Za-z_][A-Za-z0-9_]*")),
    ("OP", re.compile(r"<=|>=|<>|[=<>+\-*/^&(),:!]")),
]

_ERROR_KINDS = {k.value: k for k in ErrorKind}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int
    groups: tuple = ()


def _tokenize(text: str, offset: int) -> list[_Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        for kind, rx in _TOKEN_RES:
            m = rx.match(text, i)
            if m:
                if kind != "WS":
                    tokens.append(_Token(kind, m.group(0), i + offset, m.groups()))
                i = m.end()
                break
        else:
            raise FormulaSyntaxError(i + offset, "a formula token", text[i])
    tokens.append(_Token("EOF", "", n + offset))
    return tokens


class _Parser:
    def __init__(self, text: str, offset: int = 0):
        self.text = text
        self.tokens = _tokenize(text, offset)
        self.i = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def expect_op(self, op: str):
        tok = self.next()
        if tok.kind != "OP" or tok.text != op:
            raise FormulaSyntaxError(tok.pos, repr(op), tok.text)
        return tok

    def at_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok.kind == "OP" and tok.text in ops

    # --- grammar, loosest binding first ---

    def expr(self) -> Node:
        return self.compare()

    def compare(self) -> Node:
        node = self.concat()
        while self.at_op("=", "<>", "<", "<=", ">", ">="):
            op = self.next().text
            node = Binary(op, node, self.concat())
        return node

    def concat(self) -> Node:
        node = self.addsub()
        while self.at_op("&"):
            self.next()
            node = Binary("&", node, self.addsub())
        return node

    def addsub(self) -> Node:
        node = self.muldiv()
        while self.at_op("+", "-"):
            op = self.next().text
            node = Binary(op, node, self.muldiv())
        return node

    def muldiv(self) -> Node:
        node = self.power()
        while self.at_op("*", "/"):
            op = self.next().text
            node = Binary(op, node, self.power())
        return node

    def power(self) -> Node:
        node = self.unary()
        while self.at_op("^"):
            self.next()
            node = Binary("^", node, self.unary())
        return node

    def unary(self) -> Node:
        if self.at_op("-"):
            self.next()
            return Unary("-", self.unary())
        if self.at_op("+"):
            self.next()  # unary plus is a no-op; canonical form drops it
            return self.unary()
        return self.atom()

    def atom(self) -> Node:
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.next()
            return NumberLit(float(tok.text))
        if tok.kind == "STRING":
            self.next()
            return TextLit(tok.text[1:-1].replace('""', '"'))
        if tok.kind == "ERROR":
            self.next()
            return ErrorLit(_ERROR_KINDS[tok.text])
        if tok.kind == "OP" and tok.text == "(":
            self.next()
            node = self.expr()
            self.expect_op(")")
            return node
        if tok.kind == "SQUOTE":
            self.next()
            sheet = tok.text[1:-1].replace("''", "'")
            self.expect_op("!")
            return self.ref_or_range(sheet)
        if tok.kind == "REF":
            if self.peek(1).kind == "OP" and self.peek(1).text == "!":
                # a sheet whose name happens to look like a cell reference
                self.next()
                self.next()
                return self.ref_or_range(tok.text)
            return self.ref_or_range(None)
        if tok.kind == "WORD":
            nxt = self.peek(1)
            if nxt.kind == "OP" and nxt.text == "(":
                return self.call()
            if nxt.kind == "OP" and nxt.text == "!":
                self.next()
                self.next()
                return self.ref_or_range(tok.text)
            if tok.text.upper() in ("TRUE", "FALSE"):
                self.next()
                return BoolLit(tok.text.upper() == "TRUE")
            raise FormulaSyntaxError(tok.pos, "a value, reference or function call", tok.text)
        raise FormulaSyntaxError(tok.pos, "a value, reference or function call", tok.text)

    def cell_ref(self, sheet: str | None) -> CellRef:
        tok = self.next()
        if tok.kind != "REF":
            raise FormulaSyntaxError(tok.pos, "a cell reference", tok.text)
        col_abs, letters, row_abs, digits = tok.groups
        col = column_index(letters)
        row = int(digits)
        if col > MAX_COLS or row > MAX_ROWS:
            raise FormulaSyntaxError(tok.pos, "a reference inside the grid bounds", tok.text)
        return CellRef(col, row, sheet, bool(col_abs), bool(row_abs))

    def ref_or_range(self, sheet: str | None) -> Node:
        start = self.cell_ref(sheet)
        if self.at_op(":"):
            self.next()
            end = self.cell_ref(None)
            return make_range(start, end)
        return start

    def call(self) -> Node:
        name_tok = self.next()
        fn = name_tok.text.upper()
        if fn not in FUNCTIONS:
            raise FormulaSyntaxError(name_tok.pos, "a known function name", name_tok.text)
        self.expect_op("(")
        args: list[Node] = []
        if self.at_op(")"):
            self.next()
        else:
            while True:
                args.append(self.expr())
                if self.at_op(","):
                    self.next()
                    continue
                self.expect_op(")")
                break
        lo, hi = FUNCTIONS[fn]
        if len(args) < lo or (hi is not None and len(args) > hi):
            raise FormulaSyntaxError(
                name_tok.pos,
                f"{lo} argument(s)" if hi == lo else f"between {lo} and {hi or 'many'} arguments",
                f"{fn} with {len(args)}",
            )
        return Call(fn, tuple(args))


def parse(text: str) -> Node:
    """Parse formula text (must begin with ``=``) into a syntax tree."""
    if not text.startswith("="):
        raise FormulaSyntaxError(0, "'=' at the start of a formula", text[:1])
    parser = _Parser(text[1:], offset=1)
    node = parser.expr()
    tok = parser.peek()
    if tok.kind != "EOF":
        raise FormulaSyntaxError(tok.pos, "end of formula", tok.text)
    return node
