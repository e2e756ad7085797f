"""Resolvent relations in truncated Fock space and on abelian characters.

Fields are Phi(f) = sum_j f_j Q_j + f_{d+j} P_j with Q = (a + a^dag)/sqrt(2),
P = (a - a^dag)/(i sqrt(2)), so that [Phi(f), Phi(g)] = i sigma(f, g) for
the standard form. Resolvents are R(lambda, f) = (i lambda - Phi(f))^{-1}.
Truncation keeps the lowest M levels of each mode (dimension M^d).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import RelationError
from .norms import op_norm
from .symplectic import SymplecticSpace, VecX, sigma, to_fraction

RELATIONS = ("normalization", "adjoint", "scaling", "resolvent_identity", "product", "commutator")
EXACT_RELATIONS = RELATIONS[:4]


def annihilation(M: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, M, dtype=float)), 1).astype(complex)


def _embed(op: np.ndarray, j: int, d: int) -> np.ndarray:
    M = op.shape[0]
    out = np.ones((1, 1), dtype=complex)
    for i in range(d):
        out = np.kron(out, op if i == j else np.eye(M))
    return out


class FockRep:
    """Truncated Fock representation of d modes with M levels each."""

    def __init__(self, modes: int, levels: int):
        if modes < 1 or levels < 1:
            raise ValueError("modes and levels must be positive")
        self.modes = modes
        self.levels = levels
        self.space = SymplecticSpace(modes)
        a = annihilation(levels)
        q = (a + a.conj().T) / np.sqrt(2)
        p = (a - a.conj().T) / (1j * np.sqrt(2))
        self.Q = [_embed(q, j, modes) for j in range(modes)]
        self.P = [_embed(p, j, modes) for j in range(modes)]
        self._fields: dict[VecX, tuple[np.ndarray, np.ndarray]] = {}

    @property
    def dim(self) -> int:
        return self.levels ** self.modes

    def vec(self, f) -> VecX:
        return f if isinstance(f, VecX) else self.space.vec(f)

    def field(self, f) -> np.ndarray:
        f = self.vec(f)
        self.space.check(f)
        d = self.modes
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for j in range(d):
            if f[j]:
                out += float(f[j]) * self.Q[j]
            if f[d + j]:
                out += float(f[d + j]) * self.P[j]
        return out

    def _eig(self, f: VecX):
        hit = self._fields.get(f)
        if hit is None:
            x, U = np.linalg.eigh(self.field(f))
            hit = self._fields[f] = (x, U)
        return hit

    def resolvent(self, lam: float, f) -> np.ndarray:
        return resolvent_matrix(self, lam, f)

    def low_projector(self, K: int) -> np.ndarray:
        """Diagonal mask of basis states with every mode below level K."""
        if K > self.levels:
            raise ValueError(f"cutoff K={K} exceeds levels M={self.levels}")
        n = np.arange(self.dim)
        keep = np.ones(self.dim, dtype=bool)
        for _ in range(self.modes):
            keep &= (n % self.levels) < K
            n = n // self.levels
        return keep


def _check_lambda(lam, relation="resolvent"):
    if lam == 0:
        raise RelationError(relation, "lambda must be nonzero (lambda in R \\ {0})")


def resolvent_matrix(rep: FockRep, lam: float, f) -> np.ndarray:
    """(i lam - Phi_M(f))^{-1} via the spectral decomposition of Phi_M(f)."""
    _check_lambda(lam)
    x, U = rep._eig(rep.vec(f))
    return (U * (1.0 / (1j * lam - x))) @ U.conj().T


def _compress(X: np.ndarray, keep: np.ndarray) -> np.ndarray:
    return X[np.ix_(keep, keep)]


@dataclass(frozen=True)
class Residual:
    relation: str
    raw: float
    compressed: float

    def to_json(self) -> dict:
        return {"relation": self.relation, "raw": self.raw, "compressed": self.compressed}


def _param(params, key, relation):
    if key not in params:
        raise RelationError(relation, f"missing parameter {key!r}")
    return params[key]


def relation_difference(rep: FockRep, relation: str, params) -> np.ndarray:
    """LHS - RHS of one defining relation, as a matrix on the truncated space."""
    if relation not in RELATIONS:
        raise RelationError(relation, f"unknown relation; expected one of {', '.join(RELATIONS)}")
    lam = float(_param(params, "lam", relation))
    _check_lambda(lam, relation)
    R = rep.resolvent
    eye = np.eye(rep.dim)
    if relation == "normalization":
        return R(lam, rep.space.zero()) - (-1j / lam) * eye
    f = rep.vec(_param(params, "f", relation))
    if relation == "adjoint":
        return R(lam, f).conj().T - R(-lam, f)
    nu = _param(params, "nu", relation)
    _check_lambda(nu, relation)
    if relation == "scaling":
        nu_q = to_fraction(nu)
        return float(nu_q) * R(float(nu_q) * lam, f.scale(nu_q)) - R(lam, f)
    nu = float(nu)
    if relation == "resolvent_identity":
        Rl, Rn = R(lam, f), R(nu, f)
        return Rl - Rn - 1j * (nu - lam) * Rl @ Rn
    g = rep.vec(_param(params, "g", relation))
    s = float(sigma(rep.space, f, g))
    Rf, Rg = R(lam, f), R(nu, g)
    if relation == "product":
        if lam + nu == 0:
            raise RelationError(relation, "lam + nu must be nonzero")
        return Rf @ Rg - R(lam + nu, f + g) @ (Rf + Rg + 1j * s * Rf @ Rf @ Rg)
    return Rf @ Rg - Rg @ Rf - 1j * s * Rf @ Rg @ Rg @ Rf


def relation_residual(rep: FockRep, relation: str, params, K: int) -> Residual:
    if K > rep.levels:
        raise RelationError(relation, f"cutoff K={K} exceeds levels M={rep.levels}")
    diff = relation_difference(rep, relation, params)
    keep = rep.low_projector(K)
    return Residual(relation, op_norm(diff), op_norm(_compress(diff, keep)))


def ccr_check(rep: FockRep, K: int) -> float:
    """||P_K([Q, P] - i) P_K|| for a single mode."""
    if rep.modes != 1:
        raise ValueError("ccr_check is a per-mode check; use a one-mode representation")
    if K > rep.levels:
        raise ValueError(f"cutoff K={K} exceeds levels M={rep.levels}")
    Q, P = rep.Q[0], rep.P[0]
    diff = Q @ P - P @ Q - 1j * np.eye(rep.dim)
    return op_norm(_compress(diff, rep.low_projector(K)))


def field_commutator_defect(rep: FockRep, f, g, K: int) -> float:
    f, g = rep.vec(f), rep.vec(g)
    A, B = rep.field(f), rep.field(g)
    diff = A @ B - B @ A - 1j * float(sigma(rep.space, f, g)) * np.eye(rep.dim)
    return op_norm(_compress(diff, rep.low_projector(K)))


# -- characters of the abelian quotient ------------------------------------


@dataclass(frozen=True)
class Character:
    """chi(R(lam, f)) = (i lam - <mu, f>)^{-1} for a real vector mu.

    Values are computed in exact rational complex arithmetic (floats are
    rationals), so products of character values are exactly multiplicative
    before the final rounding.
    """

    mu: tuple[float, ...]

    def __init__(self, mu: Sequence[float]):
        object.__setattr__(self, "mu", tuple(float(m) for m in mu))

    def pair_exact(self, f: VecX) -> Fraction:
        if len(f) != len(self.mu):
            raise ValueError("character and vector dimensions differ")
        return sum((Fraction(m) * c for m, c in zip(self.mu, f)), Fraction(0))

    def pair(self, f: VecX) -> float:
        return float(self.pair_exact(f))

    def resolvent_exact(self, lam, f: VecX) -> "QC":
        _check_lambda(lam)
        a, l = self.pair_exact(f), Fraction(lam)
        den = a * a + l * l
        return QC(-a / den, -l / den)

    def resolvent(self, lam: float, f: VecX) -> complex:
        return complex(self.resolvent_exact(lam, f))


@dataclass(frozen=True)
class QC:
    """Exact complex rational re + i im."""

    re: Fraction
    im: Fraction

    def __mul__(self, o: "QC") -> "QC":
        return QC(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __sub__(self, o: "QC") -> "QC":
        return QC(self.re - o.re, self.im - o.im)

    def __pow__(self, n: int) -> "QC":
        out = QC(Fraction(1), Fraction(0))
        for _ in range(n):
            out = out * self
        return out

    def conjugate(self) -> "QC":
        return QC(self.re, -self.im)

    def __abs__(self) -> float:
        return math.sqrt(self.re * self.re + self.im * self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


@dataclass(frozen=True)
class ResolventFactor:
    lam: float
    f: VecX
    adjoint: bool = False
    power: int = 1


@dataclass(frozen=True)
class ResolventWord:
    factors: tuple[ResolventFactor, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for fac in self.factors:
            _check_lambda(fac.lam)

    def __mul__(self, other: "ResolventWord") -> "ResolventWord":
        return ResolventWord(self.factors + other.factors)

    def adjoint(self) -> "ResolventWord":
        return ResolventWord(tuple(ResolventFactor(x.lam, x.f, not x.adjoint, x.power)
                                   for x in reversed(self.factors)))


def character_exact(chi: Character, word: ResolventWord) -> QC:
    out = QC(Fraction(1), Fraction(0))
    for fac in word.factors:
        r = chi.resolvent_exact(fac.lam, fac.f)
        if fac.adjoint:
            r = r.conjugate()
        out = out * r ** fac.power
    return out


def character_value(chi: Character, word: ResolventWord) -> complex:
    return complex(character_exact(chi, word))


def fock_value(rep: FockRep, word: ResolventWord) -> np.ndarray:
    out = np.eye(rep.dim, dtype=complex)
    for fac in word.factors:
        r = resolvent_matrix(rep, fac.lam, fac.f)
        if fac.adjoint:
            r = r.conj().T
        out = out @ np.linalg.matrix_power(r, fac.power)
    return out


def scalar_relation_residuals(chi: Character, lam: float, nu: float, f: VecX, g: VecX) -> dict:
    """Residuals of the five sigma-free relations evaluated on chi."""
    r = chi.resolvent
    zero = VecX((Fraction(0),) * len(f))
    nu_q = to_fraction(nu)
    out = {
        "normalization": abs(r(lam, zero) - (-1j / lam)),
        "adjoint": abs(r(lam, f).conjugate() - r(-lam, f)),
        "scaling": abs(float(nu_q) * r(float(nu_q) * lam, f.scale(nu_q)) - r(lam, f)),
        "resolvent_identity": abs(r(lam, f) - r(nu, f) - 1j * (nu - lam) * r(lam, f) * r(nu, f)),
    }
    if lam + nu != 0:
        out["product"] = abs(r(lam, f) * r(nu, g) - r(lam + nu, f + g) * (r(lam, f) + r(nu, g)))
    return out


def character_relation_check(chi: Character, params: Sequence[dict], tol: float = 1e-12) -> dict:
    """Check the sigma-free relations on chi and emit the k = 1 Følner certificate.

    Each params entry supplies lam, nu, f, g. The reported ``sigma_term`` is
    |sigma(f, g) chi(R(lam, f))^2 chi(R(nu, g))|, the part of the product
    relation that the commutator ideal absorbs.
    """
    space = SymplecticSpace(len(chi.mu) // 2)
    rows = []
    domain = []
    trace_err = 0.0
    for idx, p in enumerate(params):
        lam, nu = float(p["lam"]), float(p["nu"])
        f, g = space.vec(p["f"]), space.vec(p["g"])
        res = scalar_relation_residuals(chi, lam, nu, f, g)
        s = float(sigma(space, f, g))
        sig_term = abs(s * chi.resolvent(lam, f) ** 2 * chi.resolvent(nu, g))
        rows.append({"index": idx, "residuals": res, "max_residual": max(res.values()),
                     "sigma": s, "sigma_term": sig_term})
        # k = 1 sample: phi = chi, tr = identity on 1x1 matrices
        for word in (ResolventWord((ResolventFactor(lam, f),)), ResolventWord((ResolventFactor(nu, g),))):
            w, ws = character_exact(chi, word), character_exact(chi, word.adjoint())
            domain.append(max(abs(character_exact(chi, word.adjoint() * word) - ws * w),
                              abs(character_exact(chi, word * word.adjoint()) - w * ws)))
            trace_err = max(trace_err, abs(complex(w) - character_value(chi, word)))
    worst = max((r["max_residual"] for r in rows), default=0.0)
    dist = max(domain, default=0.0)
    return {
        "mu": list(chi.mu),
        "draws": rows,
        "max_residual": worst,
        "mult_domain_distance": dist,
        "trace_error": trace_err,
        "pass": bool(worst <= tol and trace_err == 0.0 and dist == 0.0),
    }
