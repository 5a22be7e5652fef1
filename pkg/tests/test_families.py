from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from supercohom.biop import BilinearOperator, OperatorContext
from supercohom.cohomology import delta0, dim_h1, is_cocycle, is_trivial, independent_classes
from supercohom.families import (
    FormulaInconsistent, InapplicableParameters, case1a_even, cd_identity, classical_cocycle,
    classical_family_basis, classify, coef_residuals, coboundary_witness, d_from_c, family_terms,
    gbinom, invariant_trilinear, normal_form_cochain, normalize, recurrence_residuals, singular_even_i,
    super_family_basis, super_family_members, swap_arguments, to_h_notation,
)
from supercohom.superfield import Poly
from strategies import small_rationals

H = Fraction(1, 2)


# ------------------------------------------------------------------ gbinom

@pytest.mark.parametrize("x, i, want", [(-1, 2, 1), (H, 2, Fraction(-1, 8)), (3, 5, 0), (7, 0, 1)])
def test_gbinom_values(x, i, want):
    assert gbinom(x, i) == want


@settings(max_examples=100)
@given(small_rationals, st.integers(1, 10))
def test_gbinom_pascal(x, i):
    assert gbinom(x, i) == gbinom(x - 1, i) + gbinom(x - 1, i - 1)


# ----------------------------------------------------------- classification

@pytest.mark.parametrize("triple, tag, k, s, t", [
    ((-H, -H, 1), "super_resonant", 1, 1, 1),
    ((0, 0, 1), "resonant", 0, 0, 0),
    ((Fraction(1, 3), 0, Fraction(4, 3)), "weakly_resonant", 0, None, None),
    ((Fraction(1, 7), Fraction(2, 7), 0), "none", None, None, None),
    ((Fraction(1, 3), Fraction(1, 5), Fraction(1, 3) + Fraction(1, 5) + 1), "weakly_resonant", 0, None, None),
])
def test_classify_examples(triple, tag, k, s, t):
    r = classify(*triple)
    assert (r.tag, r.k, r.s, r.t) == (tag, k, s, t)


def test_both_tags_reported():
    r = classify(Fraction(1, 3), Fraction(1, 5), Fraction(1, 3) + Fraction(1, 5) + 1)
    assert (r.classical_tag, r.super_tag) == ("weakly_resonant", "weakly_super_resonant")
    r = classify(Fraction(1, 3), Fraction(1, 5), Fraction(1, 3) + Fraction(1, 5) + Fraction(3, 2))
    assert (r.tag, r.classical_tag) == ("weakly_super_resonant", "none")


grid_weights = st.integers(-4, 2).map(lambda n: Fraction(n, 2))


@given(grid_weights, grid_weights, st.integers(-1, 8))
def test_classification_invariants(lam, nu, twice_gap):
    mu = lam + nu + Fraction(twice_gap, 2)
    r = classify(lam, nu, mu)
    delta = mu - lam - nu
    if r.tag == "resonant":
        k = delta - 1
        assert k == r.k and k >= 0 and (r.s, r.t) == (-2 * lam, -2 * nu)
        assert r.s <= k and r.t <= k and r.s + r.t >= k
    if r.tag == "super_resonant":
        assert 1 <= r.s and 1 <= r.t
        assert r.s + r.t >= int(r.k + H) + 1
    if r.tag == "weakly_resonant":
        assert delta.denominator == 1 and r.classical_tag == "weakly_resonant"
    if r.tag == "none":
        assert "resonant" not in (r.classical_tag, r.super_tag)


# --------------------------------------------------------- classical families

def test_a1_at_zero_gap_is_h_prime_fg():
    c = classical_cocycle("a1", 0, 0, 0)
    hn = to_h_notation(c)
    assert not hn.alpha and not hn.gamma
    assert hn.beta == {(0, 0, 0, 0, 0, 0): 1}


def test_a1_generic_k0():
    lam, nu = Fraction(1, 3), Fraction(2, 7)
    hder, terms = family_terms("a1", lam, nu, lam + nu + 1)
    assert hder == 1
    assert terms == {(0, 1): 1, (1, 0): -nu / lam}


def test_b_family():
    assert family_terms("b", -H, -H, 1) == (2, {(0, 1): 1})


def test_inapplicable_reports_index():
    with pytest.raises(InapplicableParameters, match="i=1"):
        family_terms("a1", 0, 0, 2)


def test_unknown_family():
    with pytest.raises(ValueError):
        family_terms("z", 0, 0, 1)


@pytest.mark.parametrize("k", range(5))
def test_c_plus_d_identity(k):
    for s in range(k + 1):
        got, expected = cd_identity(k, s)
        assert got == expected


@pytest.mark.parametrize("triple", [(0, 0, 1), (-H, -H, 1), (-1, -H, Fraction(5, 2)),
                                    (Fraction(1, 3), 0, Fraction(4, 3)), (-2, -2, -2)])
def test_classical_basis_is_a_basis(triple):
    fams = classical_family_basis(*triple)
    assert len(fams) == dim_h1(*triple, mode="classical", want_basis=False).dim
    cocycles = [c for _, c in fams]
    assert all(is_cocycle(c) for c in cocycles)
    assert independent_classes(cocycles) == len(cocycles)


# --------------------------------------------------------------- normal form

def test_normalize_h_free_is_unchanged():
    c = classical_cocycle("c", 0, 0, 1)
    nf = normalize(c)
    assert nf.normal_form == c and not nf.witness


def test_normalize_constant_coefficient_coboundary():
    lam, nu, mu = Fraction(1, 3), Fraction(1, 5), Fraction(3)
    v = BilinearOperator(OperatorContext(lam, nu, mu, 4, 3, classical=True),
                         {(0, 0, 1, 0, 1, 0): Fraction(1), (0, 0, 0, 0, 2, 0): Fraction(2)})
    c = delta0(v, "classical")
    nf = normalize(c)
    hn = to_h_notation(nf.normal_form)
    assert not hn.alpha
    assert all(r == 0 for r in coef_residuals(nf.beta, nf.gamma, lam, nu, mu).values())
    assert is_trivial(nf.normal_form).trivial


def test_normalize_resonant_basis_satisfies_beta_relation():
    for c in dim_h1(0, 0, 1, mode="classical").basis:
        nf = normalize(c)
        assert all(r == 0 for r in coef_residuals(nf.beta, nf.gamma, 0, 0, 1).values())


def test_normalize_rejects_non_cocycle():
    c = classical_cocycle("a1", 0, 0, 0) * 1
    c.values[0] = {(0, 0, 0, 0, 0, 0): Fraction(1)}
    with pytest.raises(ValueError):
        normalize(c)


@pytest.mark.parametrize("lam, nu, mu, k, beta", [
    (Fraction(1, 3), Fraction(1, 5), 2, 1, {0: 1, 1: 2, 2: -1}),
    (Fraction(2, 7), 0, Fraction(9, 2), 2, {0: 1, 3: 1}),
])
def test_coboundary_witness_reproduces_cocycle(lam, nu, mu, k, beta):
    c = normal_form_cochain(lam, nu, mu, k, beta)
    assert is_cocycle(c)
    w = coboundary_witness(lam, nu, mu, k, beta)
    assert delta0(BilinearOperator(c.ctx.widen(1, 2), w), "classical") == c


def test_coboundary_witness_needs_off_resonance():
    with pytest.raises(InapplicableParameters):
        coboundary_witness(0, 0, 2, 1, {0: 1})


# ---------------------------------------------------------------- trilinear

def _invariance_holds(op, h, f, g):
    """Check F(A)' + mu F'A = A(Fh' - F'h/2, f, g) + A(h, Ff' + lam F'f, g)
    + A(h, f, Fg' + nu F'g) for F in {1, x, x^2}."""
    lam, nu, mu = op.lam, op.nu, op.mu
    for e in range(3):
        F = Poly.monomial(e)
        Fp = F.deriv()
        A = op.apply(h, f, g)
        lhs = F * A.deriv() + Fp * A * mu
        rhs = (op.apply(F * h.deriv() - Fp * h * H, f, g)
               + op.apply(h, F * f.deriv() + Fp * f * lam, g)
               + op.apply(h, f, F * g.deriv() + Fp * g * nu))
        if lhs != rhs:
            return False
    return True


def test_trilinear_k0_is_multiplication():
    ops = invariant_trilinear(Fraction(1, 3), Fraction(2, 7), 0)
    assert len(ops) == 1 and ops[0].d == () and ops[0].c[0] != 0


def test_trilinear_k1_matches_printed_relation():
    lam, nu = Fraction(1, 3), Fraction(2, 7)
    for op in invariant_trilinear(lam, nu, 1):
        c0, c1 = op.c
        assert op.d == (2 * lam * c1 + 2 * nu * c0,)


@pytest.mark.parametrize("lam, nu", [(H, H), (Fraction(1, 3), Fraction(2, 7)), (-1, Fraction(3, 4))])
@pytest.mark.parametrize("k", range(6))
def test_trilinear_solutions_are_invariant_and_satisfy_recurrence(lam, nu, k):
    tests = [Poly((1,)), Poly((0, 1))]
    polys = [Poly((1, 2, 0, 1)), Poly((0, 0, 3, 0, 0, 1)), Poly.monomial(k + 2)]
    for op in invariant_trilinear(lam, nu, k):
        assert all(r == 0 for r in recurrence_residuals(op))
        assert list(op.d) == d_from_c(lam, nu, k, op.c)
        for h in tests:
            for f in polys:
                for g in polys:
                    assert _invariance_holds(op, h, f, g)


def test_trilinear_brute_force_dimension_at_half():
    # independent solve: unknown c_i, d_i, impose invariance on polynomial data
    from supercohom.families import TrilinearOperator
    from supercohom.linalg import nullspace
    lam = nu = H
    k = 2
    unknowns = [("c", i) for i in range(k + 1)] + [("d", i) for i in range(k)]
    tests = [Poly((1,)), Poly((0, 1))]
    polys = [Poly.monomial(n) for n in range(k + 3)]
    rows: dict = {}
    cols = []
    for kind, i in unknowns:
        c = [Fraction(0)] * (k + 1)
        d = [Fraction(0)] * k
        (c if kind == "c" else d)[i] = Fraction(1)
        op = TrilinearOperator(lam, nu, k, tuple(c), tuple(d))
        col = {}
        for e in range(3):
            F = Poly.monomial(e)
            Fp = F.deriv()
            for a, h in enumerate(tests):
                for p, f in enumerate(polys):
                    for q, g in enumerate(polys):
                        A = op.apply(h, f, g)
                        defect = (F * A.deriv() + Fp * A * op.mu
                                  - op.apply(F * h.deriv() - Fp * h * H, f, g)
                                  - op.apply(h, F * f.deriv() + Fp * f * lam, g)
                                  - op.apply(h, f, F * g.deriv() + Fp * g * nu))
                        for n, v in enumerate(defect.coeffs):
                            if v:
                                col[rows.setdefault((e, a, p, q, n), len(rows))] = v
        cols.append(col)
    assert len(nullspace(cols)) == len(invariant_trilinear(lam, nu, k))


# ------------------------------------------------------------ super families

def test_case1a_at_weakly_super_resonant_point():
    m = case1a_even(Fraction(1, 3), Fraction(1, 5), Fraction(1, 3) + Fraction(1, 5) + 1)
    assert m.ok and is_cocycle(m.cochain)


def test_singular_even_i_at_origin():
    m = singular_even_i(0, 0, 1)
    assert m.ok
    assert not is_trivial(m.cochain).trivial


def test_swap_is_an_involution():
    coeffs = {(0, 0, 1, 1, 0, 1): Fraction(2), (1, 1, 0, 0, 2, 0): Fraction(-1),
              (0, 1, 0, 1, 1, 0): Fraction(3)}
    assert swap_arguments(swap_arguments(coeffs)) == coeffs


def test_members_never_pass_unverified():
    for m in super_family_members(-H, -H, 1):
        if m.ok:
            assert is_cocycle(m.cochain)
            assert not is_trivial(m.cochain).trivial


def test_family_basis_falls_back_to_engine():
    rep = super_family_basis(0, -1, Fraction(3, 2), want_basis=True)
    assert rep.source == "engine"
    assert len(rep.basis) == rep.engine_dim
    assert rep.discrepancies


def test_family_basis_closed_form_when_verified():
    rep = super_family_basis(0, 0, 1)
    assert rep.source == "closed-form" and rep.independent == rep.engine_dim == 1


def test_formula_inconsistent_carries_residual():
    err = FormulaInconsistent("boom", {"x": 1})
    assert err.residual == {"x": 1}
