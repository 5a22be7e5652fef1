from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from supercohom.biop import BilinearOperator, OperatorContext, iter_keys, weight_of_key
from supercohom.cohomology import (
    Cochain1, NotACocycle, PairTable, cochain_weights, default_truncation, delta0, delta1,
    dim_h1, dim_h1_relative, grading_operator, independent_classes, is_cocycle, is_trivial,
    sector_h1, sector_parity, solve_coboundary,
)
from supercohom.liealg import OSP
from oracle import h1_counts

H = Fraction(1, 2)
WEIGHTS = (Fraction(1, 3), Fraction(-1, 2), Fraction(2, 5))


def _ctx(w=WEIGHTS, classical=False):
    return OperatorContext(*w, max_order=3, max_xdeg=2, classical=classical)


@pytest.mark.parametrize("parity, mode", [(0, "super"), (1, "super"), (0, "classical")])
def test_delta_squared_vanishes_on_spanning_set(parity, mode):
    classical = mode == "classical"
    ctx = _ctx(classical=classical)
    for key in iter_keys(parity, 2, 2, classical):
        c = delta0(BilinearOperator(ctx, {key: 1}), mode)
        assert is_cocycle(c), key


@settings(deadline=None, max_examples=25)
@given(st.dictionaries(st.sampled_from(list(iter_keys(0, 2, 2))),
                       st.fractions(-2, 2, max_denominator=3).filter(bool), min_size=1, max_size=3))
def test_coboundaries_are_trivial(coeffs):
    c = delta0(BilinearOperator(_ctx(), coeffs))
    res = is_trivial(c)
    assert res.trivial
    assert delta0(res.witness) == c


def test_is_trivial_rejects_non_cocycles():
    c = Cochain1(_ctx(), 0, {0: {(1, 0, 0, 0, 0, 0): 1}})
    assert not is_cocycle(c)
    with pytest.raises(NotACocycle):
        is_trivial(c)


def test_cochain_parity_is_checked():
    with pytest.raises(ValueError):
        Cochain1(_ctx(), 0, {3: {(0, 0, 0, 0, 0, 0): 1}})


def test_cochain_arithmetic():
    a = Cochain1(_ctx(), 0, {0: {(0, 0, 0, 0, 0, 0): 1}})
    b = Cochain1(_ctx(), 0, {0: {(0, 0, 0, 0, 0, 0): 2}, 1: {(1, 0, 0, 0, 0, 0): 1}})
    assert (a * 2 - b).values == {1: {(1, 0, 0, 0, 0, 0): -1}}
    assert (a - a).is_zero()


def test_pair_table_is_graded_antisymmetric():
    t = PairTable(_ctx(), {(0, 1): {(0, 0, 0, 0, 0, 0): Fraction(1)},
                           (3, 4): {(0, 0, 0, 0, 0, 0): Fraction(2)}})
    assert t.value(1, 0) == {(0, 0, 0, 0, 0, 0): -1}
    assert t.value(4, 3) == {(0, 0, 0, 0, 0, 0): 2}


def test_grading_operator_is_diagonal_on_basis_cochains():
    delta = WEIGHTS[2] - WEIGHTS[0] - WEIGHTS[1]
    for g in OSP:
        par = (g >= 3)
        for key in iter_keys(par, 2, 2):
            c = Cochain1(_ctx(), 0, {g: {key: Fraction(1)}})
            w = weight_of_key(key, delta, g)
            assert grading_operator(c).values == ({g: {key: w}} if w else {})
            assert cochain_weights(c) == {w}


def test_homogeneous_classical_cocycle_has_one_eigenvalue():
    # h'' f g' style cocycle at the resonant point (0, 0, 1)
    c = dim_h1(0, 0, 1, mode="classical").basis
    for cocycle in c:
        assert len(cochain_weights(cocycle)) == 1


def test_truncation_defaults():
    assert default_truncation(0, 0, 1) == (5, 3)
    assert default_truncation(0, 0, 0) == (3, 3)
    assert sector_parity(Fraction(3, 2)) == 1
    assert sector_parity(Fraction(2)) == 0
    assert sector_parity(Fraction(1, 3)) is None


@pytest.mark.parametrize("weights, order, xdeg, parity", [
    ((0, 0, 1), 2, 1, 0),
    ((-H, -H, 1), 2, 1, 0),
    ((0, 0, H), 2, 1, 1),
    ((Fraction(1, 3), Fraction(1, 5), Fraction(23, 15)), 2, 1, 0),
])
def test_engine_matches_evaluation_oracle(weights, order, xdeg, parity):
    w = tuple(Fraction(x) for x in weights)
    res = sector_h1(w, "super", parity, order, xdeg, fast=True, want_basis=False)
    assert (res.dim_z, res.dim) == h1_counts(w, order, xdeg, parity)


@pytest.mark.parametrize("triple", [(0, 0, 1), (-H, -H, 1), (Fraction(1, 3), 0, Fraction(4, 3))])
def test_fast_path_agrees_with_full_complex(triple):
    fast = dim_h1(*triple, order=3, xdeg=2, stabilize=False, want_basis=False)
    full = dim_h1(*triple, order=3, xdeg=2, stabilize=False, fast=False, want_basis=False)
    assert fast.dim == full.dim


def test_shortcut_and_its_bypass():
    r = dim_h1(Fraction(1, 7), Fraction(2, 7), 0)
    assert r.dim == 0 and r.shortcut and r.parity == "zero"
    r = dim_h1(Fraction(1, 7), Fraction(2, 7), 0, shortcut=False, order=3, xdeg=2)
    assert r.dim == 0 and not r.shortcut


def test_basis_elements_are_independent_nontrivial_cocycles():
    r = dim_h1(0, 0, 1, mode="classical")
    assert r.dim == 3 and r.stabilized
    assert all(is_cocycle(c) for c in r.basis)
    assert all(not is_trivial(c).trivial for c in r.basis)
    assert independent_classes(r.basis) == 3


def test_relative_vanishes_at_resonance():
    assert dim_h1_relative(0, 0, H) == 0
    assert dim_h1_relative(0, 0, 1) == 0


def test_solve_coboundary_none_for_nontrivial():
    c = dim_h1(0, 0, 1).basis[0]
    assert solve_coboundary(c) is None


def test_unknown_mode():
    with pytest.raises(ValueError):
        dim_h1(0, 0, 1, mode="bogus")


def test_history_records_stabilization():
    r = dim_h1(-1, -1, Fraction(5, 2), want_basis=False)
    assert r.stabilized
    assert r.history[0][0] == default_truncation(-1, -1, Fraction(5, 2))[0]
    assert r.history[-1][2] == r.dim
