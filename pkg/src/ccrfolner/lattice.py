"""Compressions of the trace GNS representation to finite lattice boxes.

On the lattice L = Z g_1 + ... + Z g_n the Weyl generators act by twisted
translations

    pi(W(f)) delta_h = exp(-i sigma(f, h) / 2) delta_{f+h},

and phi_N(A) = P_N pi(A) P_N for the box P_N. The default box is the
symmetric cube {|k_i| <= N}; ``box="onesided"`` uses {1..N}^n instead.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import NotInLatticeError
from .norms import op_norm, trace_norm, two_norm
from .symplectic import SymplecticSpace, VecX, check_independent, gram, integer_span_membership
from .weyl import WeylElement, l1_bound, multiply

MAX_ROWS = 20_000


class LatticeModel:
    def __init__(self, space: SymplecticSpace, gens: Sequence[VecX], N: int,
                 box: str = "symmetric", max_rows: int = MAX_ROWS):
        if box not in ("symmetric", "onesided"):
            raise ValueError(f"box must be 'symmetric' or 'onesided', got {box!r}")
        if N < 0 or (box == "onesided" and N < 1):
            raise ValueError("box radius out of range")
        gens = tuple(g if isinstance(g, VecX) else space.vec(g) for g in gens)
        for g in gens:
            space.check(g)
        check_independent(gens)
        self.space = space
        self.gens = gens
        self.box_radius = N
        self.box = box
        if box == "symmetric":
            self.lo, self.width = -N, 2 * N + 1
        else:
            self.lo, self.width = 1, N
        n = len(gens)
        size = self.width ** n
        if size > max_rows:
            raise ValueError(f"box has {size} points, above the cap of {max_rows} rows")
        axis = range(self.lo, self.lo + self.width)
        self.points = np.array(list(itertools.product(axis, repeat=n)), dtype=np.int64).reshape(-1, n)
        self.gram = np.array([[float(x) for x in row] for row in gram(space, gens)])

    @property
    def n(self) -> int:
        return len(self.gens)

    @property
    def k(self) -> int:
        return self.points.shape[0]

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {tuple(int(x) for x in p): i for i, p in enumerate(self.points)}

    def vector(self, coords: Sequence[int]) -> VecX:
        v = self.space.zero()
        for c, g in zip(coords, self.gens):
            v = v + g.scale(c)
        return v

    def locate(self, f: VecX) -> tuple[int, ...]:
        coords = integer_span_membership(self.gens, f)
        if coords is None:
            raise NotInLatticeError(f, f"not in lattice: {f} is not an integer combination of the generators")
        return coords

    def support_radius(self, A: WeylElement) -> int:
        return max((max((abs(c) for c in self.locate(f)), default=0) for f in A.terms), default=0)

    def __repr__(self):
        return f"LatticeModel(n={self.n}, N={self.box_radius}, box={self.box!r}, k={self.k})"


@dataclass(frozen=True)
class CompressedOp:
    model: LatticeModel
    matrix: np.ndarray


def _assemble(model: LatticeModel, A: WeylElement) -> np.ndarray:
    if A.is_zero():
        return np.zeros((model.k, model.k), dtype=complex)
    offsets = np.array([model.locate(f) for f in A.terms], dtype=np.int64).reshape(-1, model.n)
    coeffs = np.array(list(A.terms.values()), dtype=complex)
    return _kernels.assemble(model.points, offsets, coeffs, model.gram, model.lo, model.width)


def rep_matrix(model: LatticeModel, A: WeylElement) -> CompressedOp:
    return CompressedOp(model, _assemble(model, A))


def mult_defect(model: LatticeModel, A: WeylElement, B: WeylElement) -> float:
    """||phi(AB) - phi(A) phi(B)||_{2,tr}."""
    ma, mb = _assemble(model, A), _assemble(model, B)
    return two_norm(_assemble(model, multiply(A, B)) - ma @ mb)


def norm_report(model: LatticeModel, A: WeylElement) -> dict:
    m = _assemble(model, A)
    return {"compressed_norm": op_norm(m), "l1_bound": l1_bound(A)}


def trace_reproduction(model: LatticeModel, A: WeylElement) -> complex:
    m = _assemble(model, A)
    return complex(np.trace(m) / model.k)


def monomial_hypertrace_prediction(N: int, coords: Sequence[int]) -> float:
    """|B Δ (B - f)| / |B| for the symmetric box B of radius N and lattice offset f."""
    w = 2 * N + 1
    size = w ** len(coords)
    overlap = 1
    for c in coords:
        overlap *= max(0, w - abs(c))
    return 2 * (size - overlap) / size


def hypertrace_commutator(space: SymplecticSpace, gens: Sequence[VecX], N: int, A: WeylElement,
                          R: int | None = None) -> float:
    """Trace norm of rho_N pi(A) - pi(A) rho_N with rho_N = P_N / Tr(P_N).

    Computed on the ambient symmetric box of radius R >= N + (support radius).
    """
    probe = LatticeModel(space, gens, 0)
    r = probe.support_radius(A)
    if R is None:
        R = N + r
    if R < N + r:
        raise ValueError(f"ambient box too small: need R >= {N + r}, got R = {R}")
    ambient = LatticeModel(space, gens, R)
    m = _assemble(ambient, A)
    inner = np.all(np.abs(ambient.points) <= N, axis=1).astype(float)
    rho = inner / inner.sum()
    comm = rho[:, None] * m - m * rho[None, :]
    return trace_norm(comm)

