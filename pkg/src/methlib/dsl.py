"""Shared machinery for the two little boolean expression languages.

Both the heuristic-condition language and the component-query language
use the same lexer, the same ``and`` / ``or`` / ``not`` connective layer
and the same precedence (``or`` < ``and`` < ``not`` < atom).  Each module
supplies its own atoms on top of this.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any

from .errors import DslSyntaxError

# ---------------------------------------------------------------------------
# Lexer

IDENT = "IDENT"
STRING = "STRING"
PUNCT = "PUNCT"
EOF = "EOF"

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:\\.|[^"\\])*")
  | (?P<punct>[(){},=~])
    """,
    re.VERBOSE,
)

_ESCAPE_RE = re.compile(r"\\(.)")


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslSyntaxError(
                f"unexpected character {text[pos]!r} at position {pos}", position=pos
            )
        if m.lastgroup == "ident":
            tokens.append(Token(IDENT, m.group(), pos))
        elif m.lastgroup == "string":
            raw = m.group()[1:-1]
            tokens.append(Token(STRING, _ESCAPE_RE.sub(r"\1", raw), pos))
        elif m.lastgroup == "punct":
            tokens.append(Token(PUNCT, m.group(), pos))
        pos = m.end()
    tokens.append(Token(EOF, "", len(text)))
    return tokens


def quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


# ---------------------------------------------------------------------------
# Connectives (shared between both ASTs)


@dataclass(frozen=True)
class Not:
    child: Any


@dataclass(frozen=True)
class And:
    items: tuple  # two or more operands


@dataclass(frozen=True)
class Or:
    items: tuple  # two or more operands


class BoolParser:
    """Recursive-descent driver; subclasses implement ``parse_atom``."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    # -- token helpers ------------------------------------------------
    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == IDENT and tok.value == word

    def at_punct(self, ch: str) -> bool:
        tok = self.peek()
        return tok.kind == PUNCT and tok.value == ch

    def expect_punct(self, ch: str) -> Token:
        tok = self.peek()
        if not self.at_punct(ch):
            raise DslSyntaxError(
                f"expected {ch!r} at position {tok.pos}", position=tok.pos
            )
        return self.advance()

    def expect_string(self) -> str:
        tok = self.peek()
        if tok.kind != STRING:
            raise DslSyntaxError(
                f"expected a quoted string at position {tok.pos}", position=tok.pos
            )
        self.advance()
        return tok.value

    def expect_ident(self) -> str:
        tok = self.peek()
        if tok.kind != IDENT:
            raise DslSyntaxError(
                f"expected an identifier at position {tok.pos}", position=tok.pos
            )
        self.advance()
        return tok.value

    def fail(self, what: str) -> DslSyntaxError:
        tok = self.peek()
        shown = tok.value or "end of input"
        return DslSyntaxError(
            f"expected {what} at position {tok.pos}, found {shown!r}", position=tok.pos
        )

    # -- grammar driver ------------------------------------------------
    def parse(self) -> Any:
        node = self.parse_expr()
        tok = self.peek()
        if tok.kind != EOF:
            raise DslSyntaxError(
                f"unexpected trailing input at position {tok.pos}", position=tok.pos
            )
        return node

    def parse_expr(self) -> Any:
        items = [self.parse_term()]
        while self.at_keyword("or"):
            self.advance()
            items.append(self.parse_term())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def parse_term(self) -> Any:
        items = [self.parse_unary()]
        while self.at_keyword("and"):
            self.advance()
            items.append(self.parse_unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def parse_unary(self) -> Any:
        if self.at_keyword("not"):
            self.advance()
            return Not(self.parse_unary())
        if self.at_punct("("):
            self.advance()
            node = self.parse_expr()
            self.expect_punct(")")
            return node
        return self.parse_atom()

    def parse_atom(self) -> Any:  # pragma: no cover - abstract
        raise NotImplementedError


def print_expr(node: Any, atom_printer) -> str:
    """Render an AST back to concrete syntax; re-parsing yields an equal AST."""

    def p(n, parent: str) -> str:
        # Nested same-connective nodes keep their parens so the parser does
        # not flatten them into the parent.
        if isinstance(n, Or):
            body = " or ".join(p(x, "or") for x in n.items)
            return body if parent == "top" else f"({body})"
        if isinstance(n, And):
            body = " and ".join(p(x, "and") for x in n.items)
            return f"({body})" if parent in ("and", "not") else body
        if isinstance(n, Not):
            return "not " + p(n.child, "not")
        return atom_printer(n)

    return p(node, "top")
