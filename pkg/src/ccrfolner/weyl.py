"""The *-algebra spanned by Weyl generators W(f).

Products follow W(f) W(g) = exp(-i sigma(f, g) / 2) W(f + g) and
W(f)* = W(-f). Supports are exact rational vectors; coefficients are
complex doubles pruned below ``PRUNE_TOL``.
"""
from __future__ import annotations

import cmath
from typing import Iterable, Mapping

from .errors import DimensionError
from .symplectic import SymplecticSpace, VecX, sigma

PRUNE_TOL = 1e-14


def phase(s) -> complex:
    """exp(-i s / 2) for an exact rational s."""
    if s == 0:
        return 1 + 0j
    return cmath.exp(-0.5j * float(s))


class WeylElement:
    """Finite linear combination of Weyl generators.

    Immutable by convention; arithmetic returns new elements.
    """

    __slots__ = ("space", "terms", "prune_tol")

    def __init__(self, space: SymplecticSpace, terms: Mapping[VecX, complex] | None = None,
                 prune_tol: float = PRUNE_TOL):
        self.space = space
        self.prune_tol = prune_tol
        clean = {}
        for f, c in (terms or {}).items():
            space.check(f)
            c = complex(c)
            if abs(c) >= prune_tol:
                clean[f] = c
        self.terms = clean

    @property
    def support(self) -> frozenset[VecX]:
        return frozenset(self.terms)

    def __len__(self):
        return len(self.terms)

    def coeff(self, f: VecX) -> complex:
        return self.terms.get(f, 0j)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "WeylElement"):
        if other.space.dim != self.space.dim or other.space != self.space:
            raise DimensionError("elements live in different symplectic spaces")

    def __add__(self, other):
        if not isinstance(other, WeylElement):
            other = scalar(self.space, other)
        self._check(other)
        out = dict(self.terms)
        for f, c in other.terms.items():
            out[f] = out.get(f, 0j) + c
        return WeylElement(self.space, out, self.prune_tol)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement(self.space, {f: -c for f, c in self.terms.items()}, self.prune_tol)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, WeylElement):
            return multiply(self, other)
        return WeylElement(self.space, {f: c * other for f, c in self.terms.items()}, self.prune_tol)

    def __rmul__(self, other):
        return WeylElement(self.space, {f: other * c for f, c in self.terms.items()}, self.prune_tol)

    def __pow__(self, k: int):
        if k < 1:
            raise ValueError("only positive integer powers")
        out = self
        for _ in range(k - 1):
            out = multiply(out, self)
        return out

    def adjoint(self):
        return adjoint(self)

    def close_to(self, other: "WeylElement", tol: float = 1e-12) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.coeff(f) - other.coeff(f)) <= tol for f in keys)

    def max_diff(self, other: "WeylElement") -> float:
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.coeff(f) - other.coeff(f)) for f in keys), default=0.0)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = [f"({c.real:.6g}{c.imag:+.6g}i)*W{f}" for f, c in sorted(
            self.terms.items(), key=lambda t: t[0].coords)]
        return " + ".join(parts)


def weyl_gen(space: SymplecticSpace, f) -> WeylElement:
    if not isinstance(f, VecX):
        f = space.vec(f)
    space.check(f)
    return WeylElement(space, {f: 1 + 0j})


def unit(space: SymplecticSpace) -> WeylElement:
    return WeylElement(space, {space.zero(): 1 + 0j})


def scalar(space: SymplecticSpace, c) -> WeylElement:
    return WeylElement(space, {space.zero(): complex(c)})


def from_terms(space: SymplecticSpace, pairs: Iterable[tuple]) -> WeylElement:
    out: dict[VecX, complex] = {}
    for f, c in pairs:
        f = f if isinstance(f, VecX) else space.vec(f)
        out[f] = out.get(f, 0j) + complex(c)
    return WeylElement(space, out)


def multiply(A: WeylElement, B: WeylElement) -> WeylElement:
    A._check(B)
    space = A.space
    out: dict[VecX, complex] = {}
    for f, a in A.terms.items():
        for g, b in B.terms.items():
            h = f + g
            out[h] = out.get(h, 0j) + a * b * phase(sigma(space, f, g))
    return WeylElement(space, out, A.prune_tol)


def adjoint(A: WeylElement) -> WeylElement:
    return WeylElement(A.space, {-f: c.conjugate() for f, c in A.terms.items()}, A.prune_tol)


def trace(A: WeylElement) -> complex:
    """The tracial state: coefficient of W(0)."""
    return A.coeff(A.space.zero())


def l1_bound(A: WeylElement) -> float:
    return float(sum(abs(c) for c in A.terms.values()))


def commutator(A: WeylElement, B: WeylElement) -> WeylElement:
    return multiply(A, B) - multiply(B, A)
