"""Recursive-descent parser for the expression grammar.

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := factor ("^" integer)?
    factor := number | "pi" | "x" | name | "(" expr ")"
            | "sin(" expr ")" | "cos(" expr ")"
            | "sinratio(" expr "," expr ")"
            | "sinoverx(" expr ["," expr "," integer] ")"

sin/cos arguments must reduce to an affine ``a*x + b``.  The only quotients
accepted are the entire ones: ``sin(a*x)/sin(b*x)`` with ``a/b`` a positive
integer, ``sin(a*x)/x``, and division by a nonzero constant.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import expr as E

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class ParsedProgram:
    source: str
    root: E.ExpTypeFn
    free_parameters: Dict[str, float] = field(default_factory=dict)


def _tokenize(src: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            bad = pos + len(src[pos:]) - len(src[pos:].lstrip())
            raise ParseError(f"unexpected character {src[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, params: Dict[str, float]):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0
        self.params = params
        self.used: Dict[str, float] = {}

    # -- token helpers ----------------------------------------------------
    @property
    def tok(self):
        return self.tokens[self.i]

    def _accept(self, value: str) -> bool:
        if self.tok[0] == "op" and self.tok[1] == value:
            self.i += 1
            return True
        return False

    def _expect(self, value: str):
        if not self._accept(value):
            got = self.tok[1] or "end of input"
            raise ParseError(f"expected {value!r}, got {got!r}", self.tok[2])

    # -- grammar ----------------------------------------------------------
    def parse(self) -> E.ExpTypeFn:
        node = self.expr()
        if self.tok[0] != "end":
            raise ParseError(f"unexpected token {self.tok[1]!r}", self.tok[2])
        return node

    def expr(self):
        node = self.term()
        while True:
            if self._accept("+"):
                node = E.add(node, self.term())
            elif self._accept("-"):
                node = E.add(node, E.scale(-1.0, self.term()))
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            if self._accept("*"):
                node = E.mul(node, self.unary())
            elif self.tok[0] == "op" and self.tok[1] == "/":
                pos = self.tok[2]
                self.i += 1
                node = _divide(node, self.unary(), pos)
            else:
                return node

    def unary(self):
        if self._accept("-"):
            return E.scale(-1.0, self.unary())
        if self._accept("+"):
            return self.unary()
        return self.power()

    def power(self):
        base = self.factor()
        if self._accept("^"):
            kind, text, pos = self.tok
            if kind != "num" or not text.isdigit():
                raise ParseError("exponent must be a non-negative integer literal", pos)
            self.i += 1
            return base ** int(text)
        return base

    def factor(self):
        kind, text, pos = self.tok
        if kind == "num":
            self.i += 1
            return E.Const(float(text))
        if kind == "op" and text == "(":
            self.i += 1
            node = self.expr()
            self._expect(")")
            return node
        if kind != "name":
            raise ParseError(f"unexpected token {text or 'end of input'!r}", pos)
        self.i += 1
        if text == "x":
            return E.poly([0.0, 1.0])
        if text == "pi":
            return E.Const(math.pi)
        if text in ("sin", "cos"):
            self._expect("(")
            apos = self.tok[2]
            arg = self.expr()
            self._expect(")")
            a, b = _affine(arg, apos)
            return E.Sin(a, b) if text == "sin" else E.Cos(a, b)
        if text == "sinratio":
            self._expect("(")
            a = self._constant()
            self._expect(",")
            b = self._constant()
            self._expect(")")
            try:
                return E.sinratio(a, b)
            except E.NonEntireError as exc:
                raise ParseError(str(exc), pos) from None
        if text == "sinoverx":
            self._expect("(")
            a = self._constant()
            shift, order = 0.0, 0
            if self._accept(","):
                shift = self._constant()
                self._expect(",")
                order_f = self._constant()
                if order_f < 0 or order_f != int(order_f):
                    raise ParseError("derivative order must be a non-negative integer", pos)
                order = int(order_f)
            self._expect(")")
            return E.sinoverx(a, shift, order)
        if text in self.params:
            self.used[text] = self.params[text]
            return E.Const(float(self.params[text]))
        raise ParseError(f"unknown name {text!r}", pos)

    def _constant(self) -> float:
        pos = self.tok[2]
        node = self.expr()
        if not isinstance(node, E.Const):
            raise ParseError("expected a constant", pos)
        return float(node.c)


def _affine(node: E.ExpTypeFn, pos: int) -> Tuple[float, float]:
    if isinstance(node, E.Const):
        return 0.0, float(node.c)
    if isinstance(node, E.Poly) and node.degree == 1:
        return node.coeffs[1], node.coeffs[0]
    raise ParseError("sin/cos argument must be affine in x", pos)


def _unscale(node: E.ExpTypeFn) -> Tuple[float, E.ExpTypeFn]:
    if isinstance(node, E.Scale):
        return node.c, node.child
    return 1.0, node


def _divide(num: E.ExpTypeFn, den: E.ExpTypeFn, pos: int) -> E.ExpTypeFn:
    if isinstance(den, E.Const):
        if den.c == 0:
            raise ParseError("division by zero", pos)
        return E.scale(1.0 / den.c, num)
    c, core = _unscale(num)
    if isinstance(core, E.Sin) and core.b == 0:
        if isinstance(den, E.Poly) and den.coeffs == (0.0, 1.0):
            return E.scale(c, E.sinoverx(core.a))
        if isinstance(den, E.Sin) and den.b == 0:
            try:
                return E.scale(c, E.sinratio(core.a, den.a))
            except E.NonEntireError as exc:
                raise ParseError(f"non-entire quotient: {exc}", pos) from None
    raise ParseError("unsupported quotient (only sin(a*x)/sin(b*x), sin(a*x)/x, f/constant)", pos)


def parse(source: str, params: Optional[Dict[str, float]] = None) -> ParsedProgram:
    """Parse ``source`` into an expression tree.

    ``params`` maps extra identifiers (e.g. ``tau``) to numeric values; the
    ones actually referenced are recorded in ``free_parameters``.
    """
    p = _Parser(source, dict(params or {}))
    root = p.parse()
    return ParsedProgram(source, root, p.used)


def parse_expr(source: str, params: Optional[Dict[str, float]] = None) -> E.ExpTypeFn:
    return parse(source, params).root


def to_source(f: E.ExpTypeFn) -> str:
    return f.to_source()
