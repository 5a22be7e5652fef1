from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from supercohom.biop import (
    BilinearOperator, OperatorContext, act, act_coeffs, act_generator, apply_operator,
    blocks_to_keys, decompose_components, eval_on_jets, evaluate, generic_jet, iter_keys,
    jet_to_keys, key_order, key_parity, keys_to_blocks, multiplication, reassemble_components,
    weight_of_key, weight_zero_keys,
)
from supercohom.liealg import OSP, Density, basis_bracket, gen_field, gen_hamiltonian, gen_parity
from supercohom.superfield import ParityError, Poly, SuperFunction
from oracle import act_on_key

H = Fraction(1, 2)
WEIGHTS = (Fraction(1, 3), Fraction(-1, 2), Fraction(2, 5))
TESTS = [SuperFunction.monomial(a, b) for a in range(5) for b in (0, 1)]


def keys(parity, max_order=3, xdeg=2):
    return st.sampled_from(list(iter_keys(parity, xdeg, max_order)))


def operators(parity, max_order=3, xdeg=2):
    return st.dictionaries(keys(parity, max_order, xdeg),
                           st.fractions(-3, 3, max_denominator=4).filter(bool), max_size=4)


def test_key_basics():
    k = (1, 1, 2, 1, 0, 0)
    assert key_parity(k) == 0
    assert key_order(k) == Fraction(5, 2)
    assert weight_of_key(k, 0) == 1 - 2 + Fraction(1 - 1, 2)
    assert weight_of_key(k, 1, generator=2) == 0 - 1 + 1 - 1


def test_iter_keys_respects_box_and_parity():
    ks = list(iter_keys(1, 2, Fraction(3, 2)))
    assert ks == sorted(ks)
    assert all(key_parity(k) == 1 and key_order(k) <= Fraction(3, 2) and k[0] <= 2 for k in ks)
    assert all(k[1] == k[3] == k[5] == 0 for k in iter_keys(0, 2, 3, classical=True))


def test_weight_zero_keys_filter():
    for k in weight_zero_keys(0, Fraction(3, 2), Fraction(-1, 2), 3, 4):
        assert weight_of_key(k, Fraction(3, 2)) == Fraction(-1, 2)


def _jet_value(J, F, G):
    """Substitute the components of F and G for the jet symbols."""
    comps = {0: (F.even, G.even), 1: (F.odd, G.odd)}
    out = SuperFunction()
    for (th, p, syms), c in J.items():
        (cf, a), (cg, b) = syms
        term = comps[cf][0].deriv(a) * comps[cg][1].deriv(b) * Poly.monomial(p, c)
        out = out + (SuperFunction(Poly(), term) if th else SuperFunction(term))
    return out


@settings(deadline=None)
@given(st.integers(0, 1).flatmap(operators))
def test_jets_agree_with_direct_evaluation(coeffs):
    J = eval_on_jets(coeffs, generic_jet(), generic_jet())
    for F in TESTS[::3]:
        for G in TESTS[1::3]:
            assert _jet_value(J, F, G) == apply_operator(coeffs, F, G)


@given(st.integers(0, 1).flatmap(operators))
def test_block_key_round_trip(coeffs):
    assert blocks_to_keys(keys_to_blocks(coeffs)) == coeffs
    J = eval_on_jets(coeffs, generic_jet(), generic_jet())
    assert jet_to_keys(J) == coeffs


def test_classical_keys_are_their_own_blocks():
    coeffs = {(1, 0, 2, 0, 0, 0): Fraction(3), (0, 0, 0, 0, 1, 0): Fraction(-1)}
    J = eval_on_jets(coeffs, generic_jet(True), generic_jet(True))
    assert jet_to_keys(J, classical=True) == coeffs


def test_operator_rejects_mixed_parity_and_out_of_box():
    ctx = OperatorContext(0, 0, 1, max_order=2, max_xdeg=1)
    with pytest.raises(ParityError):
        BilinearOperator(ctx, {(0, 0, 0, 0, 0, 0): 1, (0, 1, 0, 0, 0, 0): 1})
    with pytest.raises(ValueError):
        BilinearOperator(ctx, {(2, 0, 0, 0, 0, 0): 1})


def test_evaluate_checks_weights():
    ctx = OperatorContext(*WEIGHTS)
    A = multiplication(ctx)
    F, G = Density(SuperFunction.monomial(1, 0), WEIGHTS[0]), Density(SuperFunction.monomial(0, 1), WEIGHTS[1])
    assert evaluate(A, F, G).value == SuperFunction.monomial(1, 1)
    with pytest.raises(ValueError):
        evaluate(A, G, F)


@settings(deadline=None, max_examples=30)
@given(st.integers(0, 1).flatmap(operators), st.sampled_from(OSP))
def test_action_matches_direct_evaluation(coeffs, g):
    image = act_generator(g, coeffs, WEIGHTS)
    for F in TESTS[::4]:
        for G in TESTS[1::4]:
            want = SuperFunction()
            for k, c in coeffs.items():
                want = want + act_on_key(g, k, WEIGHTS, F, G) * c
            assert apply_operator(image, F, G) == want


def _bracket_action(g, h, coeffs):
    out: dict = {}
    for b, cb in basis_bracket(g, h).items():
        for k, v in act_generator(b, coeffs, WEIGHTS).items():
            out[k] = out.get(k, 0) + cb * v
    return {k: v for k, v in out.items() if v}


@settings(deadline=None, max_examples=25)
@given(st.integers(0, 1).flatmap(lambda p: operators(p, 3, 1)),
       st.sampled_from(OSP), st.sampled_from(OSP))
def test_operator_action_is_a_representation(coeffs, g, h):
    s = -1 if gen_parity(g) * gen_parity(h) else 1
    lhs = act_generator(g, act_generator(h, coeffs, WEIGHTS), WEIGHTS)
    for k, v in act_generator(h, act_generator(g, coeffs, WEIGHTS), WEIGHTS).items():
        lhs[k] = lhs.get(k, 0) - s * v
    lhs = {k: v for k, v in lhs.items() if v}
    assert lhs == _bracket_action(g, h, coeffs)


def test_euler_field_acts_diagonally():
    delta = WEIGHTS[2] - WEIGHTS[0] - WEIGHTS[1]
    for p in (0, 1):
        for k in iter_keys(p, 2, 2):
            assert act_generator(1, {k: Fraction(1)}, WEIGHTS) == (
                {k: weight_of_key(k, delta)} if weight_of_key(k, delta) else {})


def test_act_accepts_field_or_hamiltonian():
    ctx = OperatorContext(*WEIGHTS, max_order=2, max_xdeg=1)
    A = BilinearOperator(ctx, {(0, 0, 1, 0, 0, 0): 1})
    assert act(gen_field(2), A) == act(gen_hamiltonian(2), A)
    assert act(gen_field(2), A).coeffs == act_coeffs(gen_hamiltonian(2), A.coeffs, WEIGHTS)


def test_multiplication_components():
    ctx = OperatorContext(*WEIGHTS)
    comps = decompose_components(multiplication(ctx))
    mult = {(0, 0, 0, 0, 0, 0): Fraction(1)}
    assert [c.coeffs for c in comps] == [mult, {}, mult, mult]


@given(st.integers(0, 1).flatmap(operators))
def test_reassembly_inverts_decomposition(coeffs):
    ctx = OperatorContext(*WEIGHTS)
    parity = key_parity(next(iter(coeffs))) if coeffs else 0
    A = BilinearOperator(ctx, coeffs, parity)
    assert reassemble_components(ctx, parity, decompose_components(A)).coeffs == A.coeffs
