"""Følner subspaces for the Weyl *-algebra and their growth ratios.

V is spanned by W(k_1 g_1 + ... + k_n g_n) with every k_i in {1, ..., N}.
Since distinct Weyl generators are linearly independent, dim V is the
number of distinct lattice sums, so monomial ratios reduce to exact set
counting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .symplectic import VecX, sigma, to_fraction
from .weyl import WeylElement, phase

RANK_TOL = 1e-9


@dataclass(frozen=True)
class FolnerSubspace:
    generators: tuple[VecX, ...]
    box_size: int
    support_set: frozenset[VecX]

    @property
    def dim(self) -> int:
        return len(self.support_set)

    @property
    def injective(self) -> bool:
        """True when all N^n lattice sums are distinct."""
        return self.dim == self.box_size ** len(self.generators)


def build_folner_subspace(gens: Sequence[VecX], N: int) -> FolnerSubspace:
    if not gens:
        raise ValueError("empty generator list")
    if N < 1:
        raise ValueError("box size N must be a positive integer")
    dim = len(gens[0])
    if any(len(g) != dim for g in gens):
        raise ValueError("generators live in different spaces")
    gens = tuple(gens)
    # sum along one axis at a time: S_j = S_{j-1} + {g_j, ..., N g_j}
    support = {VecX((Fraction(0),) * dim)}
    for g in gens:
        steps = [g.scale(k) for k in range(1, N + 1)]
        support = {s + t for s in support for t in steps}
    return FolnerSubspace(gens, N, frozenset(support))


def ratio_monomial(g: VecX, V: FolnerSubspace) -> Fraction:
    """|S u (g + S)| / |S| exactly."""
    S = V.support_set
    shifted = {g + s for s in S}
    return Fraction(len(S | shifted), len(S))


@dataclass(frozen=True)
class RatioBracket:
    lower: Fraction
    upper: Fraction
    numeric: float


def ratio_general(A: WeylElement, V: FolnerSubspace, rank_tol: float = RANK_TOL) -> RatioBracket:
    """Bracket on dim(AV + V) / dim(V) for a general element A.

    ``upper`` counts supports; ``numeric`` is the floating rank of the
    spanning family {A W(s)} u {W(s)}.
    """
    if A.is_zero():
        raise ValueError("ratio_general needs a nonzero element")
    S = sorted(V.support_set, key=lambda v: v.coords)
    union = set(S)
    for f in A.terms:
        union.update(f + s for s in S)
    upper = Fraction(len(union), len(S))

    cols = sorted(union, key=lambda v: v.coords)
    index = {v: i for i, v in enumerate(cols)}
    mat = np.zeros((2 * len(S), len(cols)), dtype=complex)
    for r, s in enumerate(S):
        mat[r, index[s]] = 1.0
        for f, c in A.terms.items():
            mat[len(S) + r, index[f + s]] += c * phase(sigma(A.space, f, s))
    sv = np.linalg.svd(mat, compute_uv=False)
    rank = int(np.sum(sv > rank_tol * max(1.0, sv[0])))
    return RatioBracket(Fraction(1), upper, rank / len(S))


def epsilon_plan(eps) -> int:
    """Smallest N with 1 + 1/N < 1 + eps, i.e. floor(1/eps) + 1."""
    e = to_fraction(eps)
    if e <= 0:
        raise ValueError("eps must be positive")
    return math.floor(1 / e) + 1

