import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ccrfolner.errors import ParseError
from ccrfolner.expr import (Add, Adj, Mul, Pow, ResolventGen, ScalarLit, WeylGen, eval_character, eval_fock,
                            eval_weyl, parse_element, split_exprs, to_source)
from ccrfolner.resolvent import Character, FockRep, resolvent_matrix
from ccrfolner.symplectic import SymplecticSpace
from ccrfolner.weyl import adjoint, multiply, weyl_gen

SP = SymplecticSpace(1)


def test_product_example():
    node = parse_element("W[1,0]*W[0,1]", SP)
    assert node == Mul(WeylGen((1, 0)), WeylGen((0, 1)))
    val = eval_weyl(node, SP)
    assert set(val.support) == {SP.vec([1, 1])}
    assert val.coeff(SP.vec([1, 1])) == pytest.approx(cmath.exp(-0.5j))


def test_adjoint_example():
    val = eval_weyl(parse_element("adj(W[1,0])", SP), SP)
    assert val.close_to(weyl_gen(SP, SP.vec([-1, 0])), 0)


def test_rationals_and_whitespace():
    node = parse_element(" W[ 1/2 , -3/4 ] ", SP)
    assert node == WeylGen((Fraction(1, 2), Fraction(-3, 4)))


def test_scalars():
    assert parse_element("(1.5-2i)") == ScalarLit(1.5 - 2j)
    assert parse_element("2i") == ScalarLit(2j)
    assert parse_element("3") == ScalarLit(3 + 0j)


def test_precedence():
    a = parse_element("W[1,0]+W[0,1]*W[1,1]")
    assert isinstance(a, Add) and isinstance(a.right, Mul)
    p = parse_element("2*W[1,0]^3")
    assert isinstance(p.right, Pow) and p.right.exp == 3
    s = parse_element("W[1,0]-W[0,1]")
    assert s == Add(WeylGen((1, 0)), Mul(ScalarLit(-1), WeylGen((0, 1))))


def test_adj_of_product(rng):
    from conftest import random_element
    for _ in range(20):
        a, b = random_element(SP, rng), random_element(SP, rng)
        lhs = adjoint(multiply(a, b))
        rhs = multiply(adjoint(b), adjoint(a))
        assert lhs.close_to(rhs, 1e-12)
    node = parse_element("adj(W[1,0]*(W[0,1]+2i*W[1,-1]))", SP)
    alt = parse_element("(adj(W[0,1])+adj(2i*W[1,-1]))*adj(W[1,0])", SP)
    assert eval_weyl(node, SP).close_to(eval_weyl(alt, SP), 1e-12)


def test_arity_error_position():
    with pytest.raises(ParseError, match="arity") as exc:
        parse_element("W[0,0] + W[1]", SP)
    assert exc.value.pos == 11
    assert "position 11" in str(exc.value)


def test_mixing_rejected():
    with pytest.raises(ParseError, match="cannot mix W and R"):
        parse_element("W[1,0]*R(1;1,0)")


def test_lambda_zero():
    with pytest.raises(ParseError, match="lambda must be nonzero"):
        parse_element("R(0;1,0)")


@pytest.mark.parametrize("src", ["W[1,0", "W[1,0]*", "adj W[1,0]", "W[1,0]^0", "W[1/0,1]", "", "W[1,0])"])
def test_syntax_errors(src):
    with pytest.raises(ParseError):
        parse_element(src, SP)


def test_split_exprs():
    assert split_exprs("W[1,0], adj(W[0,1]*W[1,1]),R(1;1,0)") == ["W[1,0]", "adj(W[0,1]*W[1,1])", "R(1;1,0)"]
    assert split_exprs(" ") == []


def test_resolvent_eval():
    rep = FockRep(1, 6)
    node = parse_element("R(1;1,0)*adj(R(2;0,1))^2")
    R1, R2 = resolvent_matrix(rep, 1, [1, 0]), resolvent_matrix(rep, 2, [0, 1])
    expect = R1 @ (R2.conj().T @ R2.conj().T)
    assert abs(eval_fock(node, rep) - expect).max() < 1e-14
    chi = Character([2, 0])
    assert eval_character(parse_element("R(1;1,0)"), chi) == pytest.approx((-2 - 1j) / 5)
    with pytest.raises(ParseError):
        eval_weyl(parse_element("R(1;1,0)"), SP)


_rat = st.fractions(min_value=-5, max_value=5, max_denominator=6)
_num = st.floats(min_value=-10, max_value=10, allow_nan=False).map(lambda x: round(x, 3))
_leaf = st.one_of(
    st.tuples(_rat, _rat).map(WeylGen),
    st.builds(lambda a, b: ScalarLit(complex(a, b)), _num, _num),
)
_tree = st.recursive(_leaf, lambda kids: st.one_of(
    st.builds(Add, kids, kids), st.builds(Mul, kids, kids), st.builds(Adj, kids),
    st.builds(Pow, kids, st.integers(1, 3))), max_leaves=8)


@settings(max_examples=200, deadline=None)
@given(_tree)
def test_print_parse_round_trip(node):
    assert parse_element(to_source(node), SP) == node


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 5).map(lambda x: round(x, 4)), _rat, _rat)
def test_resolvent_round_trip(lam, a, b):
    node = ResolventGen(lam, (a, b))
    assert parse_element(to_source(node)) == node
