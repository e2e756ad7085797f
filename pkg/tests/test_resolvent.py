import json
import math
from pathlib import Path

import numpy as np
import pytest

from ccrfolner.errors import RelationError
from ccrfolner.norms import op_norm
from ccrfolner.resolvent import (EXACT_RELATIONS, Character, FockRep, ResolventFactor, ResolventWord,
                                 ccr_check, character_exact, character_relation_check, character_value,
                                 field_commutator_defect, fock_value, relation_residual,
                                 resolvent_matrix, scalar_relation_residuals)
from ccrfolner.symplectic import SymplecticSpace, sigma

FIXTURE = json.loads((Path(__file__).parent / "fixtures" / "resolvent_residuals.json").read_text())
SP = SymplecticSpace(1)


def _rand_params(rng, dim=2):
    f = [round(float(x), 3) for x in rng.uniform(-2, 2, dim)]
    g = [round(float(x), 3) for x in rng.uniform(-2, 2, dim)]
    lam = float(rng.choice([-1, 1]) * rng.uniform(0.3, 2))
    nu = float(rng.uniform(0.3, 2))
    return {"lam": lam, "nu": nu, "f": [str(x) for x in f], "g": [str(x) for x in g]}


def test_field_self_adjoint_and_linear(rng):
    rep = FockRep(2, 5)
    sp = rep.space
    for _ in range(10):
        f = sp.vec([int(x) for x in rng.integers(-3, 4, 4)])
        g = sp.vec([int(x) for x in rng.integers(-3, 4, 4)])
        A = rep.field(f)
        assert op_norm(A - A.conj().T) <= 1e-12
        comb = rep.field(f.scale("1/2") + g.scale(-3))
        assert op_norm(comb - 0.5 * A + 3 * rep.field(g)) <= 1e-12


def test_normalization_example():
    rep = FockRep(1, 6)
    np.testing.assert_allclose(resolvent_matrix(rep, 1, [0, 0]), -1j * np.eye(6))
    np.testing.assert_allclose(resolvent_matrix(rep, -2.5, [0, 0]), (1j / 2.5) * np.eye(6))


def test_resolvent_norm_bound(rng):
    rep = FockRep(1, 12)
    for _ in range(30):
        lam = float(rng.uniform(-3, 3)) or 0.1
        f = [str(round(float(x), 2)) for x in rng.uniform(-3, 3, 2)]
        assert op_norm(resolvent_matrix(rep, lam, f)) <= 1 / abs(lam) + 1e-10


def test_lambda_zero_rejected():
    rep = FockRep(1, 4)
    with pytest.raises(RelationError, match="nonzero"):
        resolvent_matrix(rep, 0, [1, 0])
    with pytest.raises(RelationError, match=r"\[scaling\]"):
        relation_residual(rep, "scaling", {"lam": 1, "nu": 0, "f": [1, 0]}, 2)


@pytest.mark.parametrize("M", [8, 16, 32])
def test_exact_relations(M, rng):
    rep = FockRep(1, M)
    for _ in range(5):
        p = _rand_params(rng)
        for rel in EXACT_RELATIONS:
            assert relation_residual(rep, rel, p, 4).raw <= 1e-10, rel


def test_adjoint_and_scaling_examples(rng):
    rep = FockRep(1, 16)
    for _ in range(10):
        p = _rand_params(rng)
        assert relation_residual(rep, "adjoint", p, 4).raw <= 1e-12
    p = {"lam": 1, "nu": 2, "f": [1, 0]}
    assert relation_residual(rep, "scaling", p, 4).raw <= 1e-12


def test_exact_relations_two_modes(rng):
    rep = FockRep(2, 5)
    for _ in range(3):
        p = _rand_params(rng, 4)
        for rel in EXACT_RELATIONS:
            assert relation_residual(rep, rel, p, 3).raw <= 1e-10


def test_relation_errors():
    rep = FockRep(1, 4)
    with pytest.raises(RelationError, match="unknown relation"):
        relation_residual(rep, "bogus", {"lam": 1}, 2)
    with pytest.raises(RelationError, match=r"\[product\] missing parameter 'g'"):
        relation_residual(rep, "product", {"lam": 1, "nu": 1, "f": [1, 0]}, 2)
    with pytest.raises(RelationError, match="exceeds"):
        relation_residual(rep, "adjoint", {"lam": 1, "f": [1, 0]}, 5)
    with pytest.raises(RelationError, match="lam \\+ nu"):
        relation_residual(rep, "product", {"lam": 1, "nu": -1, "f": [1, 0], "g": [0, 1]}, 2)


def test_commutator_relation_example():
    p = {"lam": 1, "nu": 1, "f": [1, 0], "g": [0, 1]}
    vals = [relation_residual(FockRep(1, M), "commutator", p, 4).compressed for M in (16, 32, 64)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] <= vals[0] / 2


@pytest.mark.parametrize("case", range(len(FIXTURE["cases"])))
def test_pinned_residuals(case):
    c = FIXTURE["cases"][case]
    params = {k: c[k] for k in ("f", "g", "lam", "nu")}
    for rel in ("product", "commutator"):
        vals = []
        for M in FIXTURE["levels"]:
            got = relation_residual(FockRep(1, M), rel, params, FIXTURE["cutoff"]).compressed
            assert got == pytest.approx(c[rel][str(M)], rel=1e-6, abs=1e-12)
            vals.append(got)
        assert vals[0] > vals[1] > vals[2]
        assert vals[2] <= vals[0] / 2


def test_ccr_examples():
    assert ccr_check(FockRep(1, 8), 7) <= 1e-12
    assert ccr_check(FockRep(1, 8), 8) == pytest.approx(8, abs=1e-10)
    assert ccr_check(FockRep(1, 2), 1) <= 1e-12
    with pytest.raises(ValueError):
        ccr_check(FockRep(1, 8), 9)
    with pytest.raises(ValueError):
        ccr_check(FockRep(2, 3), 1)


def test_field_commutator(rng):
    rep = FockRep(2, 6)
    sp = rep.space
    for _ in range(10):
        f = sp.vec([int(x) for x in rng.integers(-2, 3, 4)])
        g = sp.vec([int(x) for x in rng.integers(-2, 3, 4)])
        assert field_commutator_defect(rep, f, g, 5) <= 1e-10


def test_fock_word_matches_matrices():
    rep = FockRep(1, 6)
    f = SP.vec([1, 0])
    w = ResolventWord((ResolventFactor(1.0, f), ResolventFactor(2.0, f, adjoint=True, power=2)))
    R1, R2 = resolvent_matrix(rep, 1.0, f), resolvent_matrix(rep, 2.0, f)
    np.testing.assert_allclose(fock_value(rep, w), R1 @ R2.conj().T @ R2.conj().T)
    np.testing.assert_allclose(fock_value(rep, w.adjoint()), fock_value(rep, w).conj().T, atol=1e-14)
    with pytest.raises(RelationError):
        ResolventWord((ResolventFactor(0.0, f),))


def test_character_examples():
    chi = Character([2, 0])
    assert character_value(chi, ResolventWord((ResolventFactor(3.0, SP.zero()),))) == pytest.approx(-1j / 3)
    val = character_value(chi, ResolventWord((ResolventFactor(1.0, SP.vec([1, 0])),)))
    assert val == pytest.approx((-2 - 1j) / 5, abs=1e-15)


def _random_word(rng, n):
    return ResolventWord(tuple(
        ResolventFactor(float(rng.uniform(0.2, 2) * rng.choice([-1, 1])),
                        SP.vec([int(x) for x in rng.integers(-3, 4, 2)]),
                        bool(rng.integers(2)), int(rng.integers(1, 3)))
        for _ in range(n)))


def test_character_multiplicative_and_tracial(rng):
    for _ in range(50):
        chi = Character(rng.uniform(-2, 2, 2))
        A, B = _random_word(rng, 3), _random_word(rng, 2)
        assert character_exact(chi, A * B) == character_exact(chi, A) * character_exact(chi, B)
        assert character_value(chi, A * B) == pytest.approx(character_value(chi, A) * character_value(chi, B),
                                                            rel=1e-14)
        assert character_value(chi, A * B) == character_value(chi, B * A)
        assert character_value(chi, A.adjoint()) == pytest.approx(character_value(chi, A).conjugate(), rel=1e-14)


def test_scalar_resolvent_identity_example():
    for a in (-3.0, 0.0, 0.7, 5.0):
        lhs = 1 / (1j - a) - 1 / (2j - a)
        rhs = 1j * (2 - 1) / ((1j - a) * (2j - a))
        assert abs(lhs - rhs) <= 1e-15


def test_scalar_relations_random(rng):
    for _ in range(100):
        chi = Character(rng.uniform(-3, 3, 2))
        p = _rand_params(rng)
        res = scalar_relation_residuals(chi, p["lam"], p["nu"], SP.vec(p["f"]), SP.vec(p["g"]))
        assert len(res) == 5
        assert max(res.values()) <= 1e-12


def test_isotropic_pair_full_product_relation():
    chi = Character([0.3, -1.1])
    f, g = SP.vec([1, 0]), SP.vec([2, 0])
    assert sigma(SP, f, g) == 0
    rep = character_relation_check(chi, [{"lam": 1.0, "nu": 0.5, "f": f.coords, "g": g.coords}])
    assert rep["draws"][0]["sigma_term"] == 0
    assert rep["draws"][0]["residuals"]["product"] <= 1e-15


def test_character_relation_check(rng):
    chi = Character([0.5, -0.25])
    params = [_rand_params(rng) for _ in range(20)]
    rep = character_relation_check(chi, params)
    assert rep["pass"]
    assert rep["max_residual"] <= 1e-12
    assert rep["mult_domain_distance"] == 0
    assert rep["trace_error"] == 0
    assert any(d["sigma_term"] > 0 for d in rep["draws"])
