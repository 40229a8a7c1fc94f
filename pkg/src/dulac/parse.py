"""Recursive-descent parser for polynomial expressions and `.vf` system files.

Grammar for expressions (explicit operators only, no implicit products):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | power
    power  := atom ('^' INTEGER)?
    atom   := NUMBER | IDENT | '(' expr ')'

Division is restricted to nonzero constant divisors and exponents to literal
nonnegative integers; anything else is rejected as a nonpolynomial construct.
Decimal literals are converted exactly to rationals (0.5 -> 1/2).  The
identifier ``i`` is reserved for the imaginary unit.

`.vf` files are line-oriented (``#`` starts a comment):

    line := "P = " expr | "Q = " expr | "param " ident " = " number
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError
from .multiplier import ExpPolyMultiplier, Multiplier, PolyMultiplier
from .poly import CRAT_I, Poly, VectorField

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RESERVED = {"x", "y", "i", "P", "Q", "param"}


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER | IDENT | OP | END
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, col: int = 1) -> list[Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            start = i
            start_col = col
            while i < n and text[i].isdigit():
                i += 1
            if i < n and text[i] == ".":
                i += 1
                if i >= n or not text[i].isdigit():
                    raise ParseError("malformed number", line, start_col)
                while i < n and text[i].isdigit():
                    i += 1
            tokens.append(Token("NUMBER", text[start:i], line, start_col))
            col += i - start
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(Token("IDENT", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        if ch in "+-*/^()=,;:":
            tokens.append(Token("OP", ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("END", "", line, col))
    return tokens


class _ExprParser:
    """Parses a token stream into a canonical Poly.

    ``env`` maps identifier names to constant polynomials (parameter values).
    ``variables`` toggles whether x, y and the imaginary unit are admitted;
    with it off the parser accepts only constant expressions.
    """

    def __init__(self, tokens: list[Token], env: dict | None = None,
                 variables: bool = True):
        self.tokens = tokens
        self.pos = 0
        self.env = env if env is not None else {}
        self.has_params = env is not None
        self.variables = variables

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    def parse(self) -> Poly:
        p = self.expr()
        tok = self.peek()
        if tok.kind != "END":
            self.fail(f"unexpected token {tok.text!r}")
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.peek().text in ("+", "-"):
            op = self.advance().text
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.factor()
        while self.peek().text in ("*", "/"):
            op = self.advance()
            q = self.factor()
            if op.text == "*":
                p = p * q
            else:
                if not q.is_constant:
                    self.fail("nonpolynomial construct: division by a "
                              "nonconstant expression", op)
                c = q.constant_term
                if not c:
                    self.fail("division by zero", op)
                p = p * (Poly.const(1) / c)
        return p

    def factor(self) -> Poly:
        tok = self.peek()
        if tok.text == "-":
            self.advance()
            return -self.factor()
        if tok.text == "+":
            self.advance()
            return self.factor()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek().text == "^":
            caret = self.advance()
            exp_tok = self.peek()
            if exp_tok.text == "-":
                self.fail("nonpolynomial construct: negative exponent", caret)
            if exp_tok.kind != "NUMBER":
                self.fail("exponent must be a nonnegative integer literal", exp_tok)
            self.advance()
            if "." in exp_tok.text:
                self.fail("nonpolynomial construct: fractional exponent", exp_tok)
            return base ** int(exp_tok.text)
        return base

    def atom(self) -> Poly:
        tok = self.advance()
        if tok.kind == "NUMBER":
            return Poly.const(Fraction(tok.text))
        if tok.kind == "IDENT":
            return self.lookup(tok)
        if tok.text == "(":
            p = self.expr()
            closing = self.advance()
            if closing.text != ")":
                self.fail("expected ')'", closing)
            return p
        self.fail(f"unexpected token {tok.text!r}" if tok.kind != "END"
                  else "unexpected end of expression", tok)

    def lookup(self, tok: Token) -> Poly:
        name = tok.text
        if self.variables:
            if name == "x":
                return Poly.x()
            if name == "y":
                return Poly.y()
            if name == "i":
                return Poly.const(CRAT_I)
        if name in self.env:
            return self.env[name]
        if self.variables and self.has_params and name not in _RESERVED:
            self.fail(f"undefined parameter {name!r}", tok)
        self.fail(f"unknown identifier {name!r}", tok)


def parse_poly(text: str) -> Poly:
    """Parse a polynomial expression in x, y into canonical expanded form."""
    return _ExprParser(tokenize(text)).parse()


def parse_constant(text: str, line: int = 1, col: int = 1) -> Fraction:
    """Parse a constant real expression ("-3", "1/2", "0.25") to a Fraction."""
    p = _ExprParser(tokenize(text, line, col), variables=False).parse()
    c = p.constant_term
    if c.im:
        raise ParseError("expected a real constant", line, col)
    return c.re


_LINE_RE = re.compile(r"^\s*(P|Q)\s*=\s*(.*)$")
_PARAM_RE = re.compile(r"^\s*param\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")


def parse_system(text: str) -> VectorField:
    """Parse a `.vf` system definition into a VectorField.

    Both components are expanded to canonical form with all parameters
    substituted, so printing and re-parsing round-trips to an equal field.
    """
    components: dict[str, tuple[int, str]] = {}
    params: dict[str, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _PARAM_RE.match(line)
        if m:
            name, value_text = m.group(1), m.group(2)
            if name in _RESERVED:
                raise ParseError(f"parameter name {name!r} is reserved", lineno, 1)
            if name in params:
                raise ParseError(f"duplicate parameter {name!r}", lineno, 1)
            if not value_text.strip():
                raise ParseError(f"missing value for parameter {name!r}", lineno, 1)
            col = len(line) - len(value_text) + 1
            params[name] = parse_constant(value_text, lineno, col)
            continue
        m = _LINE_RE.match(line)
        if m:
            name, expr_text = m.group(1), m.group(2)
            if name in components:
                raise ParseError(f"duplicate definition of {name}", lineno, 1)
            if not expr_text.strip():
                raise ParseError(f"empty expression for {name}", lineno, 1)
            col = len(line) - len(expr_text) + 1
            components[name] = (lineno, expr_text, col)
            continue
        raise ParseError("expected 'P = ...', 'Q = ...' or 'param name = value'",
                         lineno, 1)

    for required in ("P", "Q"):
        if required not in components:
            raise ParseError(f"missing {required} component")

    env = {name: Poly.const(value) for name, value in params.items()}
    parsed = {}
    for name, (lineno, expr_text, col) in components.items():
        p = _ExprParser(tokenize(expr_text, lineno, col), env=env).parse()
        if not p.is_real:
            raise ParseError(f"{name} has nonreal coefficients", lineno, col)
        parsed[name] = p
    return VectorField(p=parsed["P"], q=parsed["Q"], params=params,
                       source_text=text)


_EXP_PREFIX_RE = re.compile(r"^\s*exp\s*\(")


def parse_multiplier(text: str) -> Multiplier:
    """Parse a multiplier expression: a polynomial, or `exp(<poly>)*<poly>`."""
    m = _EXP_PREFIX_RE.match(text)
    if not m:
        return PolyMultiplier(parse_poly(text))
    depth = 1
    i = m.end()
    while i < len(text) and depth:
        if text[i] == "(":
            depth += 1
        elif text[i] == ")":
            depth -= 1
        i += 1
    if depth:
        raise ParseError("unbalanced parentheses in exp(...)")
    g = parse_poly(text[m.end():i - 1])
    rest = text[i:].strip()
    if not rest:
        return ExpPolyMultiplier(g=g, p=Poly.const(1))
    if not rest.startswith("*"):
        raise ParseError("expected '*' after exp(...)")
    return ExpPolyMultiplier(g=g, p=parse_poly(rest[1:]))
