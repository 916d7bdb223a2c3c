"""Recursive-descent parser for the coordinate-expression grammar.

Grammar (whitespace-insensitive)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('+' | '-') unary | power
    power   := atom ('^' unary)?
    atom    := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Precedence, loosest first:

    =====  ==========  =============
    level  operators   associativity
    =====  ==========  =============
    1      ``+ -``     left
    2      ``* /``     left
    3      unary ``-`` prefix
    4      ``^``       right
    5      call, ()    --
    =====  ==========  =============

so ``-t^2`` is ``-(t^2)`` and ``2^-1`` is ``0.5``.  Functions:
``sin cos tan sinh cosh tanh exp log sqrt``.  Names other than the declared
variables resolve to constants (``pi``, ``e`` and any supplied mapping) at
compile time.
"""

from __future__ import annotations

import math
import re
from typing import Callable, Mapping

from . import jets
from .errors import ExpressionError

BUILTIN_CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


def tokenize(src: str) -> list:
    tokens = []
    pos = 0
    src = src.rstrip()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ExpressionError(f"unexpected character {src[pos:].strip()[:1]!r} at offset {pos} in {src!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, variables, constants):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0
        self.variables = tuple(variables)
        self.constants = constants

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise ExpressionError(f"expected {value!r} at offset {tok[2]} in {self.src!r}, found {tok[1] or 'end'!r}")
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            tok = self.peek()
            raise ExpressionError(f"trailing input {tok[1]!r} at offset {tok[2]} in {self.src!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = ("bin", op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            inner = self.unary()
            return inner if op == "+" else ("neg", inner)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return ("bin", "^", base, self.unary())
        return base

    def atom(self):
        kind, text, off = self.take()
        if kind == "num":
            return ("num", float(text))
        if kind == "name":
            if self.peek()[1] == "(":
                if text not in jets.FUNCTIONS:
                    raise ExpressionError(f"unknown function {text!r} at offset {off} in {self.src!r}")
                self.take("(")
                arg = self.expr()
                self.take(")")
                return ("call", text, arg)
            if text in self.variables:
                return ("var", text)
            if text in self.constants:
                return ("num", float(self.constants[text]))
            raise ExpressionError(f"unknown name {text!r} at offset {off} in {self.src!r}")
        if text == "(":
            node = self.expr()
            self.take(")")
            return node
        raise ExpressionError(f"unexpected {text or 'end of input'!r} at offset {off} in {self.src!r}")


def _fold(node):
    """Constant folding so that numeric exponents stay exact integers."""
    kind = node[0]
    if kind == "neg":
        arg = _fold(node[1])
        return ("num", -arg[1]) if arg[0] == "num" else ("neg", arg)
    if kind == "call":
        arg = _fold(node[2])
        if arg[0] == "num":
            return ("num", float(jets.apply(node[1], arg[1])))
        return ("call", node[1], arg)
    if kind == "bin":
        a, b = _fold(node[2]), _fold(node[3])
        if a[0] == "num" and b[0] == "num":
            return ("num", float(_BINOPS[node[1]](a[1], b[1])))
        return ("bin", node[1], a, b)
    return node


def _power(a, b):
    return a**b


_BINOPS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
    "^": _power,
}


def _compile(node) -> Callable[[Mapping], object]:
    kind = node[0]
    if kind == "num":
        value = node[1]
        return lambda env: value
    if kind == "var":
        name = node[1]
        return lambda env: env[name]
    if kind == "neg":
        f = _compile(node[1])
        return lambda env: -f(env)
    if kind == "call":
        name, f = node[1], _compile(node[2])
        return lambda env: jets.apply(name, f(env))
    op, fa, fb = node[1], _compile(node[2]), _compile(node[3])
    fn = _BINOPS[op]
    if op == "^" and node[3][0] == "num":
        p = node[3][1]
        return lambda env: fa(env) ** p
    return lambda env: fn(fa(env), fb(env))


class Expression:
    """A compiled scalar expression in the declared variables.

    Evaluates on floats, numpy arrays or :class:`~dcurves.jets.Jet` values.
    """

    def __init__(self, source: str, variables=("t",), constants: Mapping[str, float] | None = None):
        self.source = str(source)
        self.variables = tuple(variables)
        merged = dict(BUILTIN_CONSTANTS)
        if constants:
            merged.update(constants)
        tree = _Parser(self.source, self.variables, merged).parse()
        self.tree = _fold(tree)
        self._fn = _compile(self.tree)
        self.is_constant = self.tree[0] == "num"

    def __call__(self, **values):
        missing = [v for v in self.variables if v not in values]
        if missing:
            raise ExpressionError(f"missing values for {missing}")
        return self._fn(values)

    def __repr__(self):
        return f"Expression({self.source!r})"


def parse(source: str, variables=("t",), constants=None) -> Expression:
    return Expression(source, variables, constants)
