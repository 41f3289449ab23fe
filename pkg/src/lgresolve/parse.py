"""Parser and printer for the polynomial expression grammar.

Grammar (no implicit multiplication, on purpose):

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := '-' factor | atom ('^' INT)?
    atom   := NUMBER | NAME | '(' expr ')'
    NUMBER := INT ('/' INT)?      -- rational literal, e.g. 3 or 3/2
    NAME   := letter or '_', then letters/digits/'_'/'['/']'/"'"

Only registered variable names are accepted; anything else is an error
with a position.  ``parse_poly(format_poly(f), f.registry) == f`` holds
for every polynomial, including rational coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Tuple

from .poly import Polynomial, VarRegistry, grevlex_key


class ParseError(ValueError):
    """Syntax or name error, carrying the 0-based position in the input."""

    def __init__(self, message: str, text: str, pos: int):
        self.pos = pos
        snippet = text[max(0, pos - 20) : pos + 20]
        super().__init__(f"{message} at position {pos} (near {snippet!r})")


_NAME_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_NAME_CONT = _NAME_START | set("0123456789[]'")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    """Return (kind, value, pos) triples; kinds: num, name, op, end."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            value = text[i:j]
            if j < n and text[j] == "/":
                k = j + 1
                if k >= n or not text[k].isdigit():
                    raise ParseError("expected digits after '/'", text, j + 1)
                m = k
                while m < n and text[m].isdigit():
                    m += 1
                value = text[i:m]
                j = m
            tokens.append(("num", value, i))
            i = j
        elif ch in _NAME_START:
            j = i
            while j < n and text[j] in _NAME_CONT:
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
        elif ch in "+-*^()":
            tokens.append(("op", ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", text, i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, registry: VarRegistry):
        self.text = text
        self.registry = registry
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, value, pos = self.peek()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", self.text, pos)
        self.next()

    def parse(self) -> Polynomial:
        p = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", self.text, pos)
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.next()
                q = self.term()
                p = p + q if value == "+" else p - q
            else:
                return p

    def term(self) -> Polynomial:
        p = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "*":
                self.next()
                p = p * self.factor()
            else:
                return p

    def factor(self) -> Polynomial:
        kind, value, pos = self.peek()
        if kind == "op" and value == "-":
            self.next()
            return -self.factor()
        p = self.atom()
        kind, value, pos = self.peek()
        if kind == "op" and value == "^":
            self.next()
            kind, value, pos = self.peek()
            if kind != "num" or "/" in value:
                raise ParseError("expected integer exponent after '^'", self.text, pos)
            self.next()
            p = p ** int(value)
        return p

    def atom(self) -> Polynomial:
        kind, value, pos = self.next()
        if kind == "num":
            if "/" in value:
                a, b = value.split("/")
                return Polynomial.const(self.registry, Fraction(int(a), int(b)))
            return Polynomial.const(self.registry, int(value))
        if kind == "name":
            if value not in self.registry:
                raise ParseError(f"unknown variable {value!r}", self.text, pos)
            return Polynomial.variable(self.registry, value)
        if kind == "op" and value == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        raise ParseError(
            f"expected a number, variable or '(', got {value!r}", self.text, pos
        )


def parse_poly(text: str, registry: VarRegistry) -> Polynomial:
    """Parse an expression into an exact polynomial."""
    return _Parser(text, registry).parse()


def format_poly(poly: Polynomial) -> str:
    """Canonical text form; grevlex-descending terms, explicit '*' and '^'."""
    if poly.is_zero():
        return "0"
    parts: List[str] = []
    names = poly.registry.names
    for exp, coeff in poly.sorted_terms(grevlex_key):
        factors = [
            name if k == 1 else f"{name}^{k}"
            for name, k in zip(names, exp)
            if k
        ]
        mag = abs(coeff)
        body = "*".join(factors)
        if not factors:
            body = _fmt_frac(mag)
        elif mag != 1:
            body = f"{_fmt_frac(mag)}*{body}"
        if not parts:
            parts.append(body if coeff > 0 else f"-{body}")
        else:
            parts.append(f" + {body}" if coeff > 0 else f" - {body}")
    return "".join(parts)


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
