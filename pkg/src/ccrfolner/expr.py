"""Element literals for the command line.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | factor
    factor := atom ['^' INT]
    atom   := 'W' '[' rational (',' rational)* ']'
            | 'R' '(' real ';' rational (',' rational)* ')'
            | 'adj' '(' expr ')'
            | complex | number ['i'] | '(' expr ')'

``complex`` is a parenthesised literal such as ``(1.5-2i)``. Subtraction
and negation are stored as multiplication by the scalar -1, so printing
and re-parsing gives back an identical tree.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import ParseError
from .symplectic import SymplecticSpace, VecX, fraction_str

_NUM = r"(?:\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
_NUM_RE = re.compile(_NUM)
_RAT_RE = re.compile(r"[+-]?\s*" + _NUM + r"(?:\s*/\s*\d+)?")
_COMPLEX_RE = re.compile(r"\(\s*([+-]?" + _NUM + r")\s*([+-])\s*(" + _NUM + r")?\s*i\s*\)")


@dataclass(frozen=True)
class WeylGen:
    coords: tuple[Fraction, ...]


@dataclass(frozen=True)
class ResolventGen:
    lam: float
    coords: tuple[Fraction, ...]


@dataclass(frozen=True)
class ScalarLit:
    value: complex


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Adj:
    arg: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exp: int


Node = Union[WeylGen, ResolventGen, ScalarLit, Add, Mul, Adj, Pow]


class _Parser:
    def __init__(self, src: str, dim: int | None):
        self.src = src
        self.pos = 0
        self.dim = dim

    def error(self, msg, pos=None):
        return ParseError(msg, self.pos if pos is None else pos, self.src)

    def skip(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.skip()
        return self.src.startswith(s, self.pos)

    def eat(self, s: str):
        if not self.peek(s):
            found = self.src[self.pos:self.pos + 1] or "end of input"
            raise self.error(f"expected {s!r}, found {found!r}")
        self.pos += len(s)

    def parse(self) -> Node:
        node = self.expr()
        self.skip()
        if self.pos != len(self.src):
            raise self.error(f"unexpected {self.src[self.pos]!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            if self.peek("+"):
                self.pos += 1
                node = Add(node, self.term())
            elif self.peek("-"):
                self.pos += 1
                node = Add(node, Mul(ScalarLit(-1 + 0j), self.term()))
            else:
                return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek("*"):
            self.pos += 1
            node = Mul(node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek("-"):
            self.pos += 1
            return Mul(ScalarLit(-1 + 0j), self.unary())
        return self.factor()

    def factor(self) -> Node:
        node = self.atom()
        if self.peek("^"):
            self.pos += 1
            self.skip()
            m = re.compile(r"\d+").match(self.src, self.pos)
            if not m or int(m.group()) < 1:
                raise self.error("exponent must be a positive integer")
            self.pos = m.end()
            node = Pow(node, int(m.group()))
        return node

    def vector(self, close: str) -> tuple[Fraction, ...]:
        start = self.pos
        coords = [self.rational()]
        while self.peek(","):
            self.pos += 1
            coords.append(self.rational())
        self.eat(close)
        if self.dim is not None and len(coords) != self.dim:
            raise self.error(f"arity mismatch: vector has {len(coords)} entries, space needs {self.dim}",
                             start)
        return tuple(coords)

    def rational(self) -> Fraction:
        self.skip()
        m = _RAT_RE.match(self.src, self.pos)
        if not m:
            raise self.error("expected a rational number")
        self.pos = m.end()
        try:
            return Fraction(re.sub(r"\s+", "", m.group()))
        except ZeroDivisionError:
            raise self.error("zero denominator", m.start()) from None

    def atom(self) -> Node:
        self.skip()
        start = self.pos
        if self.src.startswith("adj", self.pos):
            self.pos += 3
            self.eat("(")
            inner = self.expr()
            self.eat(")")
            return Adj(inner)
        if self.src.startswith("W", self.pos):
            self.pos += 1
            self.eat("[")
            return WeylGen(self.vector("]"))
        if self.src.startswith("R", self.pos):
            self.pos += 1
            self.eat("(")
            lam = float(self.rational())
            if lam == 0:
                raise self.error("lambda must be nonzero", start)
            self.eat(";")
            return ResolventGen(lam, self.vector(")"))
        if self.src.startswith("(", self.pos):
            m = _COMPLEX_RE.match(self.src, self.pos)
            if m:
                self.pos = m.end()
                im = float(m.group(3)) if m.group(3) else 1.0
                if m.group(2) == "-":
                    im = -im
                return ScalarLit(complex(float(m.group(1)), im))
            self.pos += 1
            inner = self.expr()
            self.eat(")")
            return inner
        m = _NUM_RE.match(self.src, self.pos)
        if m:
            self.pos = m.end()
            val = float(m.group())
            if self.src.startswith("i", self.pos):
                self.pos += 1
                return ScalarLit(complex(0.0, val))
            return ScalarLit(complex(val, 0.0))
        if self.src.startswith("i", self.pos):
            self.pos += 1
            return ScalarLit(1j)
        found = self.src[self.pos:self.pos + 1] or "end of input"
        raise self.error(f"unexpected {found!r}")


def families(node: Node) -> set[str]:
    if isinstance(node, WeylGen):
        return {"W"}
    if isinstance(node, ResolventGen):
        return {"R"}
    if isinstance(node, ScalarLit):
        return set()
    if isinstance(node, (Add, Mul)):
        return families(node.left) | families(node.right)
    if isinstance(node, Adj):
        return families(node.arg)
    return families(node.base)


def parse_element(src: str, space: SymplecticSpace | None = None) -> Node:
    """Parse an element literal; vector arity is checked against ``space`` when given."""
    node = _Parser(src, None if space is None else space.dim).parse()
    if families(node) == {"W", "R"}:
        raise ParseError("cannot mix W and R generators in one expression", 0, src)
    return node


def split_exprs(src: str) -> list[str]:
    """Split a comma-separated list of expressions at top-level commas."""
    out, depth, cur = [], 0, []
    for ch in src:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur).strip())
    return out


def _num(x: float) -> str:
    return repr(float(x))


def to_source(node: Node) -> str:
    if isinstance(node, WeylGen):
        return "W[" + ",".join(fraction_str(c) for c in node.coords) + "]"
    if isinstance(node, ResolventGen):
        return "R(" + _num(node.lam) + ";" + ",".join(fraction_str(c) for c in node.coords) + ")"
    if isinstance(node, ScalarLit):
        z = node.value
        sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
        return f"({_num(z.real)}{sign}{_num(abs(z.imag))}i)"
    if isinstance(node, Add):
        return f"({to_source(node.left)}+{to_source(node.right)})"
    if isinstance(node, Mul):
        return f"({to_source(node.left)}*{to_source(node.right)})"
    if isinstance(node, Adj):
        return f"adj({to_source(node.arg)})"
    base = to_source(node.base)
    if isinstance(node.base, Pow):
        base = f"({base})"
    return f"{base}^{node.exp}"


# -- evaluation -----------------------------------------------------------


def eval_weyl(node: Node, space: SymplecticSpace):
    from .weyl import adjoint, multiply, scalar, weyl_gen

    def go(n):
        if isinstance(n, WeylGen):
            return weyl_gen(space, VecX(n.coords))
        if isinstance(n, ScalarLit):
            return scalar(space, n.value)
        if isinstance(n, Add):
            return go(n.left) + go(n.right)
        if isinstance(n, Mul):
            return multiply(go(n.left), go(n.right))
        if isinstance(n, Adj):
            return adjoint(go(n.arg))
        if isinstance(n, Pow):
            return go(n.base) ** n.exp
        raise ParseError("resolvent generator in a Weyl expression")

    return go(node)


def eval_fock(node: Node, rep):
    from .resolvent import resolvent_matrix

    eye = np.eye(rep.dim, dtype=complex)

    def go(n):
        if isinstance(n, ResolventGen):
            return resolvent_matrix(rep, n.lam, VecX(n.coords))
        if isinstance(n, ScalarLit):
            return n.value * eye
        if isinstance(n, Add):
            return go(n.left) + go(n.right)
        if isinstance(n, Mul):
            return go(n.left) @ go(n.right)
        if isinstance(n, Adj):
            return go(n.arg).conj().T
        if isinstance(n, Pow):
            return np.linalg.matrix_power(go(n.base), n.exp)
        raise ParseError("Weyl generator in a resolvent expression")

    return go(node)


def eval_character(node: Node, chi) -> complex:
    def go(n):
        if isinstance(n, ResolventGen):
            return chi.resolvent(n.lam, VecX(n.coords))
        if isinstance(n, ScalarLit):
            return n.value
        if isinstance(n, Add):
            return go(n.left) + go(n.right)
        if isinstance(n, Mul):
            return go(n.left) * go(n.right)
        if isinstance(n, Adj):
            return go(n.arg).conjugate()
        if isinstance(n, Pow):
            return go(n.base) ** n.exp
        raise ParseError("Weyl generator in a resolvent expression")

    return complex(go(node))
