"""Exact rational symplectic spaces.

Coordinates are :class:`fractions.Fraction` throughout so that the form,
lattice membership and support counting are exact. Floating point only
enters once a phase ``exp(-i sigma / 2)`` is materialised elsewhere.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DependentGeneratorsError, DimensionError


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # decimal reading: "0.1" means 1/10, not the nearest binary double
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def fraction_str(x: Fraction) -> str:
    return str(x)


def standard_form(d: int) -> tuple[tuple[Fraction, ...], ...]:
    n = 2 * d
    rows = [[Fraction(0)] * n for _ in range(n)]
    for j in range(d):
        rows[j][d + j] = Fraction(1)
        rows[d + j][j] = Fraction(-1)
    return tuple(tuple(r) for r in rows)


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns (matrix, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [v / piv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                fac = m[i][c]
                m[i] = [a - fac * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    m = [list(r) for r in rows]
    n = len(m)
    sign = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        for i in range(c + 1, n):
            if m[i][c] != 0:
                fac = m[i][c] / m[c][c]
                m[i] = [a - fac * b for a, b in zip(m[i], m[c])]
    out = sign
    for i in range(n):
        out *= m[i][i]
    return out


@dataclass(frozen=True)
class SymplecticSpace:
    """A 2d-dimensional rational space with a non-degenerate skew form.

    ``form`` defaults to the standard block form
    sigma(f, g) = sum_j f_j g_{d+j} - f_{d+j} g_j.
    """

    d: int
    form: tuple[tuple[Fraction, ...], ...] = field(default=None, compare=True)

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise DimensionError(f"dim_pairs must be a positive integer, got {self.d!r}")
        if self.form is None:
            object.__setattr__(self, "form", standard_form(self.d))
            return
        n = 2 * self.d
        form = tuple(tuple(to_fraction(v) for v in row) for row in self.form)
        if len(form) != n or any(len(row) != n for row in form):
            raise DimensionError(f"form must be {n}x{n}")
        for i in range(n):
            for j in range(n):
                if form[i][j] != -form[j][i]:
                    raise ValueError("form matrix is not skew-symmetric")
        if det(form) == 0:
            raise ValueError("form matrix is degenerate")
        object.__setattr__(self, "form", form)

    @property
    def dim(self) -> int:
        return 2 * self.d

    def vec(self, coords: Iterable) -> "VecX":
        v = VecX(tuple(to_fraction(c) for c in coords))
        self.check(v)
        return v

    def zero(self) -> "VecX":
        return VecX((Fraction(0),) * self.dim)

    def basis(self, i: int) -> "VecX":
        c = [Fraction(0)] * self.dim
        c[i] = Fraction(1)
        return VecX(tuple(c))

    def check(self, v: "VecX"):
        if len(v) != self.dim:
            raise DimensionError(f"vector has {len(v)} coordinates, space needs {self.dim}")

    def to_json(self) -> dict:
        out = {"d": self.d}
        if self.form != standard_form(self.d):
            out["form"] = [[fraction_str(x) for x in row] for row in self.form]
        return out

    @classmethod
    def from_json(cls, obj) -> "SymplecticSpace":
        return cls(int(obj["d"]), obj.get("form"))


@dataclass(frozen=True)
class VecX:
    coords: tuple[Fraction, ...]

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __add__(self, other: "VecX") -> "VecX":
        if len(other) != len(self):
            raise DimensionError("dimension mismatch")
        return VecX(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "VecX") -> "VecX":
        return self + (-other)

    def __neg__(self) -> "VecX":
        return VecX(tuple(-a for a in self.coords))

    def scale(self, k) -> "VecX":
        k = to_fraction(k)
        return VecX(tuple(k * a for a in self.coords))

    __rmul__ = scale

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)

    def to_json(self) -> list[str]:
        return [fraction_str(a) for a in self.coords]

    @classmethod
    def from_json(cls, arr) -> "VecX":
        return cls(tuple(to_fraction(a) for a in arr))

    def __str__(self):
        return "(" + ",".join(fraction_str(a) for a in self.coords) + ")"


def sigma(space: SymplecticSpace, f: VecX, g: VecX) -> Fraction:
    """Exact value of the symplectic form f^T M g."""
    space.check(f)
    space.check(g)
    M = space.form
    total = Fraction(0)
    for i, fi in enumerate(f.coords):
        if fi == 0:
            continue
        row = M[i]
        for j, gj in enumerate(g.coords):
            if gj != 0 and row[j] != 0:
                total += fi * row[j] * gj
    return total


def gram(space: SymplecticSpace, gens: Sequence[VecX]) -> list[list[Fraction]]:
    """Matrix of sigma(g_i, g_j) over a generator list."""
    return [[sigma(space, a, b) for b in gens] for a in gens]


def check_independent(gens: Sequence[VecX]):
    if not gens:
        raise ValueError("empty generator list")
    _, pivots = rref([list(g.coords) for g in gens])
    if len(pivots) < len(gens):
        raise DependentGeneratorsError("dependent generators: coefficients would not be unique")


def integer_span_membership(gens: Sequence[VecX], f: VecX) -> tuple[int, ...] | None:
    """Integer coefficients k with sum k_i g_i = f, or None if f is off the lattice.

    Generators must be linearly independent (over Q, hence over Z).
    """
    if not gens:
        raise ValueError("empty generator list")
    n = len(gens)
    dim = len(gens[0])
    if any(len(g) != dim for g in gens) or len(f) != dim:
        raise DimensionError("dimension mismatch")
    check_independent(gens)
    # augmented system: columns are generators, last column is f
    aug = [[gens[j][i] for j in range(n)] + [f[i]] for i in range(dim)]
    m, pivots = rref(aug)
    if n in pivots:
        return None
    coeffs = [Fraction(0)] * n
    for row, c in zip(m, pivots):
        coeffs[c] = row[n]
    if any(c.denominator != 1 for c in coeffs):
        return None
    return tuple(int(c) for c in coeffs)
