"""Finite samples of contractive completely positive maps into matrices.

A :class:`CpSample` records phi(X) for a finite list of labelled algebra
elements together with e = phi(1). Complete positivity cannot be checked
from finitely many images; only the necessary conditions (self-adjoint
unit image with spectrum in [0, 1], adjoint compatibility) are validated.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from .errors import SampleError
from .lattice import LatticeModel, _assemble
from .norms import op_norm, two_norm
from .weyl import WeylElement, adjoint, multiply, trace

SPEC_TOL = 1e-10

__all__ = [
    "CpSample", "SpectralSplit", "two_norm", "spectral_split", "unitalize", "unitalizing_basis",
    "synth_ccp", "lattice_sample", "folner_certificate", "mult_domain_distance", "direct_sum",
    "with_products", "default_eps",
]


def adj_label(a: str) -> str:
    return f"adj({a})"


def prod_label(a: str, b: str) -> str:
    return f"{a}*{b}"


@dataclass
class CpSample:
    unit: np.ndarray
    images: dict[str, np.ndarray]
    pairs: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.unit.shape[0]

    def __getitem__(self, label: str) -> np.ndarray:
        try:
            return self.images[label]
        except KeyError:
            raise SampleError(f"sample incomplete: missing label {label!r}") from None

    def validate(self, tol: float = SPEC_TOL):
        e = self.unit
        if op_norm(e - e.conj().T) > tol:
            raise SampleError("unit image is not self-adjoint")
        ev = np.linalg.eigvalsh((e + e.conj().T) / 2)
        if ev.size and (ev.min() < -tol or ev.max() > 1 + tol):
            raise SampleError(f"unit image spectrum [{ev.min():.3g}, {ev.max():.3g}] leaves [0, 1]")
        for label, m in self.images.items():
            partner = self.images.get(adj_label(label))
            if partner is not None and op_norm(partner - m.conj().T) > tol:
                raise SampleError(f"phi(adj({label})) is not phi({label})^dagger")

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "unit": _mat_to_json(self.unit),
            "images": {lab: _mat_to_json(m) for lab, m in self.images.items()},
            "pairs": [list(p) for p in self.pairs],
        }

    @classmethod
    def from_json(cls, obj) -> "CpSample":
        unit = _mat_from_json(obj["unit"])
        if unit.shape != (obj["k"], obj["k"]):
            raise SampleError("unit image size does not match k")
        images = {lab: _mat_from_json(m) for lab, m in obj.get("images", {}).items()}
        for lab, m in images.items():
            if m.shape != unit.shape:
                raise SampleError(f"image {lab!r} has the wrong size")
        return cls(unit, images, [tuple(p) for p in obj.get("pairs", [])])


def _mat_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _mat_from_json(rows) -> np.ndarray:
    arr = np.array(rows, dtype=float)
    if arr.ndim == 2:
        return arr.astype(complex)
    return arr[..., 0] + 1j * arr[..., 1]


def _hermitian_spectrum(e: np.ndarray, tol: float = SPEC_TOL):
    e = np.asarray(e, dtype=complex)
    if e.ndim != 2 or e.shape[0] != e.shape[1]:
        raise ValueError("expected a square matrix")
    if op_norm(e - e.conj().T) > tol:
        raise ValueError("matrix is not self-adjoint")
    lam, vecs = np.linalg.eigh((e + e.conj().T) / 2)
    if lam.size and (lam.min() < -tol or lam.max() > 1 + tol):
        raise ValueError(f"spectrum [{lam.min():.3g}, {lam.max():.3g}] is outside [0, 1]")
    return np.clip(lam, 0.0, 1.0), vecs


@dataclass
class SpectralSplit:
    eps: float
    lambda0: np.ndarray
    lambda_mid: np.ndarray
    lambda1: np.ndarray
    P: np.ndarray
    distance: float
    delta: float
    certified_bound: float

    @property
    def k(self) -> int:
        return self.P.shape[0]

    @property
    def mid_fraction(self) -> float:
        return len(self.lambda_mid) / self.k

    def spectral_distance(self) -> float:
        """||e - P||_{2,tr} from the eigenvalues alone."""
        tot = (np.sum(self.lambda0 ** 2) + np.sum(self.lambda_mid ** 2)
               + np.sum((1 - self.lambda1) ** 2))
        return float(np.sqrt(tot / self.k))


def certified_bound(eps: float, delta: float) -> float:
    # |mid| / k <= delta^2 / (eps - eps^2)^2 because lambda - lambda^2 >= eps - eps^2 on the mid band
    return float(np.sqrt(eps ** 2 + delta ** 2 / (eps - eps ** 2) ** 2))


def spectral_split(e, eps: float) -> SpectralSplit:
    """Split spec(e) into [0, eps], (eps, 1 - eps), [1 - eps, 1] and project onto the top band."""
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2): the mid-band estimate "
                         "min(lambda - lambda^2) = eps - eps^2 requires eps < 1/2")
    e = np.asarray(e, dtype=complex)
    lam, vecs = _hermitian_spectrum(e)
    top = lam >= 1 - eps
    low = lam <= eps
    mid = ~top & ~low
    V1 = vecs[:, top]
    P = V1 @ V1.conj().T
    eh = (e + e.conj().T) / 2
    delta = two_norm(eh - eh @ eh)
    return SpectralSplit(
        eps=float(eps),
        lambda0=lam[low],
        lambda_mid=lam[mid],
        lambda1=lam[top],
        P=P,
        distance=two_norm(eh - P),
        delta=delta,
        certified_bound=certified_bound(eps, delta),
    )


def default_eps(delta: float) -> float:
    return float(min(max(delta ** (2 / 3), 1e-3), 0.49))


def unitalizing_basis(e, eps: float):
    """Orthonormal eigenbasis of E([1 - eps, 1]) and the matching eigenvalues."""
    lam, vecs = _hermitian_spectrum(e)
    top = lam >= 1 - eps
    if not np.any(top):
        raise ValueError("no spectrum near 1: E([1 - eps, 1]) is zero")
    return vecs[:, top], lam[top]


def unitalize(sample: CpSample, eps: float) -> CpSample:
    """psi(X) = f phi(X) f on ran P with f = (P e)^{-1/2}, P = E([1 - eps, 1]).

    The result has size rank(P) and psi(1) is the identity there. When P
    is the full identity the original basis is kept, so psi = phi for
    samples that are already unital.
    """
    V1, lam1 = unitalizing_basis(sample.unit, eps)
    k = sample.k
    if V1.shape[1] == k:
        f = (V1 * lam1 ** -0.5) @ V1.conj().T
        new_unit = f @ sample.unit @ f
        images = {lab: f @ m @ f for lab, m in sample.images.items()}
        return CpSample(new_unit, images, list(sample.pairs))
    # coordinates of ran P: f restricted there is diag(lam^{-1/2})
    W = V1 * lam1 ** -0.5
    images = {lab: W.conj().T @ m @ W for lab, m in sample.images.items()}
    return CpSample(W.conj().T @ sample.unit @ W, images, list(sample.pairs))


def with_products(elements: Mapping[str, WeylElement], pairs: Sequence[tuple[str, str]] = (),
                  adjoints: Sequence[str] = ()) -> tuple[dict[str, WeylElement], list[tuple[str, str, str]]]:
    """Extend a labelled element family by the products and adjoints certificates need."""
    out = dict(elements)
    triples = []
    for a, b in pairs:
        ab = prod_label(a, b)
        out.setdefault(ab, multiply(out[a], out[b]))
        triples.append((a, b, ab))
    for a in adjoints:
        aa = adj_label(a)
        out.setdefault(aa, adjoint(out[a]))
        out.setdefault(prod_label(aa, a), multiply(out[aa], out[a]))
        out.setdefault(prod_label(a, aa), multiply(out[a], out[aa]))
    return out, triples


def random_contraction(k: int, rng: np.random.Generator, spread: float | None = None) -> np.ndarray:
    """Seeded k x k contraction V = diag(s) U with U Haar unitary.

    ``spread=None`` draws singular values uniformly in [0, 1]. Otherwise
    singular values sit within ``spread`` of {0, 1}, so V^dagger V is
    close to a projection.
    """
    z = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    U = q * (np.diag(r) / np.abs(np.diag(r)))
    if spread is None:
        s = rng.uniform(0.0, 1.0, size=k)
    else:
        ones = rng.uniform(size=k) < 0.7
        jitter = spread * rng.uniform(size=k)
        s = np.where(ones, 1.0 - jitter, jitter)
    return s[:, None] * U


def synth_ccp(model: LatticeModel, elements: Mapping[str, WeylElement], seed: int | None = None,
              pairs: Sequence[tuple[str, str, str]] = (), spread: float | None = None,
              contraction=None) -> CpSample:
    """Sample of A -> V^dagger phi_N(A) V for a random (seeded) contraction V."""
    if contraction is None:
        V = random_contraction(model.k, np.random.default_rng(seed), spread)
    else:
        V = np.asarray(contraction, dtype=complex)
        if V.shape != (model.k, model.k):
            raise ValueError(f"contraction must be {model.k}x{model.k}")
        if op_norm(V) > 1 + SPEC_TOL:
            raise ValueError("contraction has norm above 1")
    Vh = V.conj().T
    images = {lab: Vh @ _assemble(model, A) @ V for lab, A in elements.items()}
    return CpSample(Vh @ V, images, list(pairs))


def lattice_sample(model: LatticeModel, elements: Mapping[str, WeylElement],
                   pairs: Sequence[tuple[str, str, str]] = ()) -> CpSample:
    images = {lab: _assemble(model, A) for lab, A in elements.items()}
    return CpSample(np.eye(model.k, dtype=complex), images, list(pairs))


def folner_certificate(sample: CpSample, eps: float, pairs=None, norm_refs: Mapping[str, float] | None = None,
                       elements: Mapping[str, WeylElement] | None = None) -> dict:
    """Check multiplicativity (2-norm) and isometry defects against eps.

    ``elements`` optionally supplies the algebra elements so that the
    report can set tr(phi(A)) beside the Weyl trace tau(A).
    """
    pairs = sample.pairs if pairs is None else [tuple(p) for p in pairs]
    for lab in (norm_refs or {}):
        sample[lab]
    rows = []
    for a, b, ab in pairs:
        d = two_norm(sample[ab] - sample[a] @ sample[b])
        rows.append({"pair": [a, b, ab], "defect": d, "pass": bool(d <= eps)})
    elems = []
    for lab, m in sample.images.items():
        entry = {"label": lab, "compressed_norm": op_norm(m),
                 "trace": complex(np.trace(m) / sample.k)}
        if norm_refs and lab in norm_refs:
            gap = abs(entry["compressed_norm"] - norm_refs[lab])
            entry["norm_gap"] = gap
            entry["pass"] = bool(gap <= eps)
        if elements and lab in elements:
            entry["tau"] = trace(elements[lab])
        elems.append(entry)
    verdict = all(r["pass"] for r in rows) and all(e.get("pass", True) for e in elems)
    return {"eps": eps, "k": sample.k, "pairs": rows, "elements": elems, "pass": verdict}


def mult_domain_distance(sample: CpSample, a: str) -> float:
    """max of the two multiplicative-domain defects for the element labelled ``a``."""
    aa = adj_label(a)
    pa, pad = sample[a], sample[aa]
    d1 = two_norm(sample[prod_label(aa, a)] - pad @ pa)
    d2 = two_norm(sample[prod_label(a, aa)] - pa @ pad)
    return max(d1, d2)


def direct_sum(samples: Sequence[CpSample]) -> CpSample:
    """Block-diagonal sum over samples sharing the same labels."""
    if not samples:
        raise ValueError("empty family")
    labels = list(samples[0].images)
    for s in samples[1:]:
        if set(s.images) != set(labels):
            raise SampleError("direct sum needs identical label sets")
    unit = scipy.linalg.block_diag(*[s.unit for s in samples])
    images = {lab: scipy.linalg.block_diag(*[s.images[lab] for s in samples]) for lab in labels}
    return CpSample(unit.astype(complex), images, list(samples[0].pairs))
