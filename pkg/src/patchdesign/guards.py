"""Boolean guard expressions over Petri-net markings.

Grammar (whitespace-insensitive)::

    expr   := term ('||' term)*
    term   := factor ('&&' factor)*
    factor := atom | '(' expr ')'
    atom   := '#' IDENT CMP INT | 'true' | 'false'
    CMP    := '==' | '!=' | '<=' | '>=' | '<' | '>'

'&&' binds tighter than '||'.  Atoms compare the token count of a place
against an integer constant.
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass


class GuardSyntaxError(ValueError):
    """Malformed guard text; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


_CMP_OPS = {
    "==": operator.eq,
    "!=": operator.ne,
    "<=": operator.le,
    ">=": operator.ge,
    "<": operator.lt,
    ">": operator.gt,
}


@dataclass(frozen=True)
class Comparison:
    place: str
    op: str
    value: int

    def evaluate(self, marking) -> bool:
        return _CMP_OPS[self.op](marking[self.place], self.value)

    def places(self):
        return {self.place}

    def unparse(self) -> str:
        return f"#{self.place} {self.op} {self.value}"


@dataclass(frozen=True)
class Literal:
    value: bool

    def evaluate(self, marking) -> bool:
        return self.value

    def places(self):
        return set()

    def unparse(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class AllOf:
    terms: tuple

    def evaluate(self, marking) -> bool:
        return all(t.evaluate(marking) for t in self.terms)

    def places(self):
        out = set()
        for t in self.terms:
            out |= t.places()
        return out

    def unparse(self) -> str:
        parts = []
        for t in self.terms:
            s = t.unparse()
            if isinstance(t, (AnyOf, AllOf)):
                s = f"({s})"
            parts.append(s)
        return " && ".join(parts)


@dataclass(frozen=True)
class AnyOf:
    terms: tuple

    def evaluate(self, marking) -> bool:
        return any(t.evaluate(marking) for t in self.terms)

    def places(self):
        out = set()
        for t in self.terms:
            out |= t.places()
        return out

    def unparse(self) -> str:
        parts = []
        for t in self.terms:
            s = t.unparse()
            if isinstance(t, AnyOf):
                s = f"({s})"
            parts.append(s)
        return " || ".join(parts)


TRUE = Literal(True)

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<hash>#)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<int>\d+)"
    r"|(?P<cmp>==|!=|<=|>=|<|>)|(?P<and>&&)|(?P<or>\|\|)"
    r"|(?P<lpar>\()|(?P<rpar>\)))"
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens = []
        self._tokenize()
        self.i = 0

    def _tokenize(self):
        pos = 0
        text = self.text
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                # skip pure whitespace tails
                if text[pos:].strip() == "":
                    break
                bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise GuardSyntaxError(f"unexpected character {text[bad]!r}", bad)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()

    def _eof_offset(self) -> int:
        stripped = self.text.rstrip()
        return max(len(stripped) - 1, 0)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def expect(self, kind, what):
        tok = self.peek()
        if tok is None:
            raise GuardSyntaxError(f"expected {what}, found end of input", self._eof_offset())
        if tok[0] != kind:
            raise GuardSyntaxError(f"expected {what}, found {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        expr = self.expr()
        tok = self.peek()
        if tok is not None:
            raise GuardSyntaxError(f"unexpected trailing input {tok[1]!r}", tok[2])
        return expr

    def expr(self):
        terms = [self.term()]
        while self.peek() and self.peek()[0] == "or":
            self.i += 1
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else AnyOf(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while self.peek() and self.peek()[0] == "and":
            self.i += 1
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else AllOf(tuple(factors))

    def factor(self):
        tok = self.peek()
        if tok is None:
            raise GuardSyntaxError("expected expression, found end of input", self._eof_offset())
        kind = tok[0]
        if kind == "lpar":
            self.i += 1
            inner = self.expr()
            self.expect("rpar", "')'")
            return inner
        if kind == "ident" and tok[1] in ("true", "false"):
            self.i += 1
            return Literal(tok[1] == "true")
        if kind == "hash":
            self.i += 1
            name = self.expect("ident", "place name")[1]
            op = self.expect("cmp", "comparison operator")[1]
            value = self.expect("int", "integer")[1]
            return Comparison(name, op, int(value))
        raise GuardSyntaxError(f"expected expression, found {tok[1]!r}", tok[2])


def parse_guard(text: str):
    """Parse guard text into an expression tree.

    Raises GuardSyntaxError with a byte offset on malformed input.
    """
    return _Parser(text).parse()


def check_places(expr, known_places) -> None:
    """Raise ValueError if the expression references an undeclared place."""
    unknown = expr.places() - set(known_places)
    if unknown:
        raise ValueError(f"guard references unknown place(s): {sorted(unknown)}")
