"""Closed-form content: resonance classes, generalized binomials, explicit
cocycle families, normal forms and invariant trilinear operators.

Every constructor builds its operator from the closed formula and then checks
it against the coboundary map.  Formulas that fail the check are never
patched: :func:`super_family_basis` reports the failure and falls back to a
basis produced by the rank engine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .biop import OperatorContext, _add_into, blocks_to_keys, keys_to_blocks, weight_zero_keys
from .cohomology import (
    Cochain1, NotACocycle, _Index, delta0_raw, delta1, delta1_raw, dim_h1,
    generator_pairs, independent_classes, is_cocycle, is_trivial,
)
from .linalg import nullspace, solve
from .liealg import ODD, OSP, SL2, ad_weight, gen_parity
from .superfield import Q, fmt_q

HALF = Fraction(1, 2)


class InapplicableParameters(ValueError):
    """A family formula is undefined at the requested parameters."""


class FormulaInconsistent(ValueError):
    """A closed formula was built but fails the cocycle check."""

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


# ------------------------------------------------------------------ numbers

def gbinom(x, i: int) -> Fraction:
    """x(x-1)...(x-i+1)/i! for rational x."""
    if i < 0:
        return Fraction(0)
    x = Q(x)
    out = Fraction(1)
    for n in range(i):
        out *= x - n
    return out / math.factorial(i)


def _as_nat(q: Fraction, upper=None) -> int | None:
    """q as a natural number (optionally <= upper), else None."""
    if q.denominator != 1 or q < 0:
        return None
    n = int(q)
    if upper is not None and n > upper:
        return None
    return n


def _half_indices(lam: Fraction, nu: Fraction):
    """(s, t) with (lambda, nu) = (-s/2, -t/2) and s, t natural, else None."""
    s, t = _as_nat(-2 * lam), _as_nat(-2 * nu)
    if s is None or t is None:
        return None
    return s, t


# ----------------------------------------------------------- classification

@dataclass(frozen=True)
class ResonanceClass:
    tag: str
    k: Fraction | None = None
    s: int | None = None
    t: int | None = None
    classical_tag: str = "none"
    super_tag: str = "none"

    def to_json(self) -> dict:
        out = {"class": self.tag}
        if self.k is not None:
            out["k"] = fmt_q(self.k)
        if self.s is not None:
            out["s"] = self.s
            out["t"] = self.t
        out["classical"] = self.classical_tag
        out["super"] = self.super_tag
        return out


def _classical_tag(lam, nu, mu):
    delta = mu - lam - nu
    if _as_nat(delta) is None:
        return "none", None
    k = delta - 1
    st = _half_indices(lam, nu)
    if k >= 0 and st and st[0] <= k and st[1] <= k and sum(st) >= k:
        return "resonant", k
    return "weakly_resonant", k


def _super_tag(lam, nu, mu):
    delta = mu - lam - nu
    if (2 * delta).denominator != 1 or delta < 0:
        return "none", None
    k = delta - 1
    fk = math.floor(k)
    fk_half = math.floor(k + HALF)
    st = _half_indices(lam, nu)
    if k >= 0 and st and 1 <= min(st) and max(st) <= fk and sum(st) >= fk_half + 1:
        return "super_resonant", k
    # the implication is vacuous unless (lambda, nu) sits on the half-integer grid
    if st is None or max(st) > fk + 1 or sum(st) < fk_half:
        return "weakly_super_resonant", k
    return "none", k


def classify(lam, nu, mu) -> ResonanceClass:
    """Resonance tag of a triple.

    The combined tag prefers super resonance, then classical resonance, then
    the two weak notions; both individual tags are reported alongside.
    """
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    ctag, ck = _classical_tag(lam, nu, mu)
    stag, sk = _super_tag(lam, nu, mu)
    st = _half_indices(lam, nu)
    for tag, k in (("super_resonant", sk), ("resonant", ck), ("weakly_resonant", ck),
                   ("weakly_super_resonant", sk)):
        if tag in (ctag, stag):
            s, t = st if st else (None, None)
            return ResonanceClass(tag, k, s, t, ctag, stag)
    return ResonanceClass("none", None, None, None, ctag, stag)


# ---------------------------------------------------------- building blocks

def h_derivative(g: int, order: int) -> dict:
    """Polynomial {x-degree: coeff} of h^(order), where X_g = X_h or X_{h theta}."""
    deg = {0: 0, 1: 1, 2: 2, 3: 0, 4: 1}[g]
    if order > deg:
        return {}
    return {deg - order: Fraction(math.factorial(deg), math.factorial(deg - order))}


class BlockBuilder:
    """Accumulates terms ``coeff * h^(a) * x-poly * (f_cf)^(i) (g_cg)^(j)`` in
    output component ``out`` for each generator, then converts to keys."""

    def __init__(self):
        self.blocks: dict = {}

    def add(self, g: int, hder: int, out: int, cf: int, cg: int, i: int, j: int, coeff):
        coeff = Q(coeff)
        if not coeff or i < 0 or j < 0:
            return
        for m, c in h_derivative(g, hder).items():
            blk = self.blocks.setdefault(g, {}).setdefault((out, cf, cg), {})
            _add_into(blk, (m, i, j), c * coeff)

    def add_family(self, gens, hder: int, out: int, cf: int, cg: int, terms: dict, scale=1):
        """``terms``: {(i, j): coeff} of a classical operator h^(hder) f^(i) g^(j)."""
        for g in gens:
            for (i, j), c in terms.items():
                self.add(g, hder, out, cf, cg, i, j, Q(scale) * c)

    def values(self, classical: bool = False) -> dict:
        out = {}
        for g, blocks in self.blocks.items():
            if classical:
                keys = {(p, 0, a, 0, b, 0): c for (p, a, b), c in blocks.get((0, 0, 0), {}).items()}
            else:
                keys = blocks_to_keys(blocks)
            if keys:
                out[g] = keys
        return out


def _ctx(lam, nu, mu, classical=False, values=None) -> OperatorContext:
    order, deg = 2, 3
    for v in (values or {}).values():
        for k in v:
            deg = max(deg, k[0])
            order = max(order, math.ceil(k[2] + k[4] + Fraction(k[3] + k[5], 2)))
    return OperatorContext(lam, nu, mu, order, deg, classical)


def cochain_from_values(lam, nu, mu, parity, values, mode="super") -> Cochain1:
    return Cochain1(_ctx(lam, nu, mu, mode == "classical", values), parity, values, mode)


# ----------------------------------------------------- classical families

def _need(cond: bool, message: str):
    if not cond:
        raise InapplicableParameters(message)


def _inverse_gbinom(x, i, name):
    b = gbinom(x, i)
    if b == 0:
        raise InapplicableParameters(f"gbinom({name}, i) vanishes at i={i}")
    return 1 / b


def family_terms(family: str, lam, nu, mu) -> tuple[int, dict]:
    """(order of h-derivative, {(i, j): coeff}) for a classical family."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    delta = mu - lam - nu
    _need(_as_nat(delta) is not None, "mu - lambda - nu must be a natural number")
    k = int(delta) - 1
    st = _half_indices(lam, nu)
    terms = {}
    if family == "a1":
        for i in range(k + 2):
            terms[(i, k + 1 - i)] = (gbinom(k + 1, i) * gbinom(2 * nu + k, i)
                                     * _inverse_gbinom(-2 * lam, i, "-2*lambda"))
        return 1, terms
    if family == "a2":
        for i in range(k + 2):
            j = k + 1 - i
            terms[(i, j)] = (gbinom(k + 1, i) * gbinom(2 * lam + k, j)
                             * _inverse_gbinom(-2 * nu, j, "-2*nu"))
        return 1, terms
    _need(st is not None, "family needs (lambda, nu) = (-s/2, -t/2) with s, t natural")
    s, t = st
    if family == "a4":
        _need(s <= k and t <= k and s + t < k, "family a4 needs s, t <= k and s + t < k")
        for i in range(s + 1, k - t + 1):
            terms[(i, k + 1 - i)] = (-1) ** i * gbinom(k + 1, i) * gbinom(k - t - s - 1, i - s - 1)
        return 1, terms
    _need(k >= 0 and s <= k and t <= k and s + t >= k,
          "family needs a resonant triple (s, t <= k and s + t >= k)")
    if family == "b":
        return 2, {(k - t, t): Fraction(1)}
    if family == "c":
        for i in range(s + 1):
            terms[(i, k + 1 - i)] = (gbinom(k + 1, i) * gbinom(k - t, i)
                                     * _inverse_gbinom(s, i, "s"))
        return 1, terms
    if family == "d":
        for i in range(s + 1, k + 2):
            j = k + 1 - i
            terms[(i, j)] = (gbinom(k + 1, i) * gbinom(k - s, j)
                             * _inverse_gbinom(t, j, "t"))
        return 1, terms
    raise ValueError(f"unknown family {family!r}")


CLASSICAL_FAMILIES = ("a1", "a2", "a4", "b", "c", "d")


def classical_cocycle(family: str, lam, nu, mu, check: bool = True) -> Cochain1:
    """One of the sl(2) families as a classical cochain."""
    hder, terms = family_terms(family, lam, nu, mu)
    bb = BlockBuilder()
    bb.add_family(SL2, hder, 0, 0, 0, terms)
    c = cochain_from_values(lam, nu, mu, 0, bb.values(classical=True), "classical")
    if check and not is_cocycle(c):
        raise FormulaInconsistent(f"family {family} fails the cocycle check",
                                  delta1(c).entries)
    return c


def classical_family_basis(lam, nu, mu) -> list[tuple[str, Cochain1]]:
    """The families that generate H^1(sl(2)) for this triple."""
    cls = classify(lam, nu, mu).classical_tag
    if cls == "resonant":
        names = ["b", "c", "d"]
    elif cls == "weakly_resonant":
        names = ["a1", "a2", "a4"]
    else:
        return []
    out = []
    for name in names:
        try:
            out.append((name, classical_cocycle(name, lam, nu, mu)))
        except InapplicableParameters:
            continue
        if cls == "weakly_resonant":
            break
    return out


def cd_identity(k: int, s: int) -> tuple[dict, dict]:
    """(c + d terms, terms of h'(fg)^(k+1)) at (lambda, nu) = (-s/2, -(k-s)/2)."""
    _need(0 <= s <= k, "need 0 <= s <= k")
    lam, nu = Fraction(-s, 2), Fraction(-(k - s), 2)
    mu = lam + nu + k + 1
    total: dict = {}
    for fam in ("c", "d"):
        _, terms = family_terms(fam, lam, nu, mu)
        for ij, c in terms.items():
            total[ij] = total.get(ij, 0) + c
    total = {ij: c for ij, c in total.items() if c}
    expected = {(i, k + 1 - i): Fraction(math.comb(k + 1, i)) for i in range(k + 2)}
    return total, expected


def operator_from_terms(lam, nu, mu, terms: dict) -> dict:
    """Constant-coefficient classical operator {key: coeff} from {(i, j): coeff}."""
    return {(0, 0, i, 0, j, 0): c for (i, j), c in terms.items() if c}


# ------------------------------------------------------- h-notation / normal form

@dataclass
class HNotation:
    """c(X_h) = alpha*h + beta*h' + gamma*h'' with operator-valued alpha, beta, gamma."""

    alpha: dict
    beta: dict
    gamma: dict


def _shift(op: dict, dm: int, scale=1) -> dict:
    return {(k[0] + dm,) + tuple(k[1:]): c * scale for k, c in op.items()}


def _plus(*ops: dict) -> dict:
    out: dict = {}
    for op in ops:
        for k, c in op.items():
            _add_into(out, k, c)
    return out


def to_h_notation(c: Cochain1) -> HNotation:
    alpha = dict(c.values.get(0, {}))
    beta = _plus(c.values.get(1, {}), _shift(alpha, 1, -1))
    gamma = _plus(c.values.get(2, {}), _shift(alpha, 2, -1), _shift(beta, 1, -2))
    gamma = {k: v / 2 for k, v in gamma.items()}
    return HNotation(alpha, beta, gamma)


def from_h_notation(lam, nu, mu, hn: HNotation, classical=True) -> Cochain1:
    vals = {
        0: dict(hn.alpha),
        1: _plus(_shift(hn.alpha, 1), hn.beta),
        2: _plus(_shift(hn.alpha, 2), _shift(hn.beta, 1, 2), {k: 2 * v for k, v in hn.gamma.items()}),
    }
    return cochain_from_values(lam, nu, mu, 0, {g: v for g, v in vals.items() if v},
                               "classical" if classical else "super")


def _antiderivative(op: dict) -> dict:
    return {(k[0] + 1,) + tuple(k[1:]): c / (k[0] + 1) for k, c in op.items()}


@dataclass
class NormalForm:
    normal_form: Cochain1
    witness: dict  # classical operator {key: coeff}
    beta: dict  # {(i, j): coeff}
    gamma: dict


def normalize(c: Cochain1) -> NormalForm:
    """Remove the h-terms of a classical cocycle by subtracting a coboundary."""
    if c.mode != "classical":
        raise ValueError("normalize works on classical cochains")
    if not is_cocycle(c):
        raise NotACocycle("delta1(c) != 0")
    ctx = c.ctx
    witness: dict = {}
    cur = c
    # the antiderivative step lowers the x-degree of alpha; iterate until gone
    for _ in range(64):
        alpha = to_h_notation(cur).alpha
        if not alpha:
            break
        b = _antiderivative(alpha)
        witness = _plus(witness, b)
        d = delta0_raw(b, 0, ctx.weights, SL2, True)
        cur = cochain_from_values(ctx.lam, ctx.nu, ctx.mu, 0,
                                  {g: _plus(cur.values.get(g, {}), {k: -v for k, v in d.get(g, {}).items()})
                                   for g in SL2}, "classical")
    hn = to_h_notation(cur)
    if hn.alpha or any(k[0] for k in hn.beta) or any(k[0] for k in hn.gamma):
        raise RuntimeError("normal form still has h-terms or variable coefficients")
    beta = {(k[2], k[4]): v for k, v in hn.beta.items()}
    gamma = {(k[2], k[4]): v for k, v in hn.gamma.items()}
    return NormalForm(cur, witness, beta, gamma)


def coef_residuals(beta: dict, gamma: dict, lam, nu, mu) -> dict:
    """Left-hand sides of the normal-form relation, grouped by (k, i)."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    delta = mu - lam - nu
    ks = {i + j - 1 for (i, j) in beta} | {i + j for (i, j) in gamma}
    out = {}
    for k in ks:
        for i in range(k + 1):
            b1 = beta.get((i + 1, k - i), 0)
            b0 = beta.get((i, k + 1 - i), 0)
            g0 = gamma.get((i, k - i), 0)
            r = 2 * (delta - k - 1) * g0 + (i + 1) * (i + 2 * lam) * b1 \
                + (k + 1 - i) * (k - i + 2 * nu) * b0
            out[(k, i)] = r
    return out


def normal_form_cochain(lam, nu, mu, k: int, beta: dict, gamma: dict | None = None) -> Cochain1:
    """Classical cochain sum beta_i h' f^(i) g^(k+1-i) + gamma_i h'' f^(i) g^(k-i).

    With ``gamma=None`` the h''-coefficients are solved from the normal-form
    relation (requires mu - lambda - nu != k + 1).
    """
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    delta = mu - lam - nu
    if gamma is None:
        if delta == k + 1:
            raise InapplicableParameters("mu - lambda - nu = k + 1 leaves gamma undetermined")
        gamma = {}
        for i in range(k + 1):
            num = (i + 1) * (i + 2 * lam) * Q(beta.get(i + 1, 0)) \
                + (k + 1 - i) * (k - i + 2 * nu) * Q(beta.get(i, 0))
            gamma[i] = -num / (2 * (delta - k - 1))
    hn = HNotation({}, operator_from_terms(lam, nu, mu, {(i, k + 1 - i): Q(b) for i, b in beta.items()}),
                   operator_from_terms(lam, nu, mu, {(i, k - i): Q(g) for i, g in gamma.items()}))
    return from_h_notation(lam, nu, mu, hn)


def coboundary_witness(lam, nu, mu, k: int, beta: dict) -> dict:
    """b = (mu - lambda - nu - k - 1)^{-1} sum beta_i f^(i) g^(k+1-i)."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    delta = mu - lam - nu
    if delta == k + 1:
        raise InapplicableParameters("mu - lambda - nu = k + 1: no witness")
    return {(0, 0, i, 0, k + 1 - i, 0): Q(b) / (delta - k - 1) for i, b in beta.items() if b}


# ----------------------------------------------------- invariant trilinear maps

@dataclass
class TrilinearOperator:
    """A(h, f, g) = sum c_i h f^(i) g^(k-i) + sum d_i h' f^(i) g^(k-1-i)."""

    lam: Fraction
    nu: Fraction
    k: int
    c: tuple
    d: tuple

    @property
    def mu(self) -> Fraction:
        return self.lam + self.nu + self.k - HALF

    def apply(self, h, f, g):
        """Evaluate on polynomials (``Poly``)."""
        out = None
        for i, ci in enumerate(self.c):
            if ci:
                term = h * f.deriv(i) * g.deriv(self.k - i) * ci
                out = term if out is None else out + term
        for i, di in enumerate(self.d):
            if di:
                term = h.deriv() * f.deriv(i) * g.deriv(self.k - 1 - i) * di
                out = term if out is None else out + term
        return out


def _trilinear_unknowns(k: int):
    return [("c", i) for i in range(k + 1)] + [("d", i) for i in range(k)]


def invariant_trilinear(lam, nu, k: int) -> list[TrilinearOperator]:
    """Basis of sl(2)-invariant A: H (x) F_lam (x) F_nu -> F_mu, mu = lam+nu+k-1/2.

    H is spanned by 1 and x (weight -1/2), so h'' = 0 throughout.  Invariance
    under X_F, F in {1, x, x^2}, is imposed on jet symbols and solved exactly.
    """
    lam, nu = Q(lam), Q(nu)
    mu = lam + nu + k - HALF
    unknowns = _trilinear_unknowns(k)
    rows = _Index()
    cols = []
    for kind, i in unknowns:
        col: dict = {}
        for F in (0, 1, 2):
            for mono, coeff in _invariance_defect(kind, i, k, F, lam, nu, mu).items():
                col[rows[(F, mono)]] = coeff
        cols.append(col)
    sols = nullspace(cols)
    out = []
    for rel in sols:
        c = [Fraction(0)] * (k + 1)
        d = [Fraction(0)] * k
        for j, v in rel.items():
            kind, i = unknowns[j]
            (c if kind == "c" else d)[i] = v
        out.append(TrilinearOperator(lam, nu, k, tuple(c), tuple(d)))
    return out


def _invariance_defect(kind, i, k, F, lam, nu, mu) -> dict:
    """Jet expansion of  F(A)' + mu F' A - A(Fh' - F'h/2, f, g) - A(h, Ff' + lam F'f, g)
    - A(h, f, Fg' + nu F'g)  for A a single basis term.

    Jets: h -> (a), f -> (i), g -> (j) derivative orders, with h^(2) = 0; the
    vector field coefficient F = x^e is kept as an explicit x-power.
    Monomials are (x-power, a, i, j).
    """
    # term is coefficient * h^(a) f^(p) g^(q)
    a, p, q = (0, i, k - i) if kind == "c" else (1, i, k - 1 - i)
    e = F
    out: dict = {}

    def add(xp, aa, pp, qq, c):
        if aa >= 2 or c == 0 or xp < 0:
            return
        _add_into(out, (xp, aa, pp, qq), c)

    def dpow(n):
        # derivative of x^e, n times: coeff and power
        if n > e:
            return 0, 0
        return math.factorial(e) // math.factorial(e - n), e - n

    # F * (h^(a) f^(p) g^(q))'
    c0, x0 = dpow(0)
    add(x0, a + 1, p, q, c0)
    add(x0, a, p + 1, q, c0)
    add(x0, a, p, q + 1, c0)
    # mu F' A
    c1, x1 = dpow(1)
    add(x1, a, p, q, mu * c1)

    # A(phi, f, g) with phi = F h' - F' h / 2 : its a-th derivative via Leibniz
    def leibniz(n, first_coeff, first_shift, second_coeff, second_shift, slot):
        # (F^(first_shift) u^(1) ... ) derivative n times, where u is the slot function
        # returns list of (coeff, xpow, slot-derivative order)
        res = []
        for r in range(n + 1):
            b = math.comb(n, r)
            cf, xf = dpow(first_shift + r)
            if cf:
                res.append((b * first_coeff * cf, xf, n - r + 1))
            cs, xs = dpow(second_shift + r)
            if cs:
                res.append((b * second_coeff * cs, xs, n - r))
        return res

    for coeff, xp, order in leibniz(a, Fraction(1), 0, -HALF, 1, "h"):
        add(xp, order, p, q, -coeff)
    for coeff, xp, order in leibniz(p, Fraction(1), 0, lam, 1, "f"):
        add(xp, a, order, q, -coeff)
    for coeff, xp, order in leibniz(q, Fraction(1), 0, nu, 1, "g"):
        add(xp, a, p, order, -coeff)
    return out


def recurrence_residuals(op: TrilinearOperator) -> list[Fraction]:
    """Left-hand sides of the three-term recurrence for the c-coefficients."""
    lam, nu, k, c = op.lam, op.nu, op.k, op.c
    out = []
    for i in range(k - 1):
        r = ((i + 1) * (i + 2) * (i + 2 * lam) * (i + 2 * lam + 1) * c[i + 2]
             + 2 * (i + 1) * (k - i - 1) * (i + 2 * lam) * (k - i - 2 + 2 * nu) * c[i + 1]
             + (k - i - 1) * (k - i) * (k - i - 2 + 2 * nu) * (k - i - 1 + 2 * nu) * c[i])
        out.append(r)
    return out


def d_from_c(lam, nu, k: int, c) -> list[Fraction]:
    """The h'-coefficients forced by invariance."""
    lam, nu = Q(lam), Q(nu)
    return [(i + 1) * (i + 2 * lam) * c[i + 1] + (k - i) * (k - i - 1 + 2 * nu) * c[i]
            for i in range(k)]


# ------------------------------------------------------ extension to osp(1|2)

def extend_to_osp(lam, nu, mu, parity: int, sl2_values: dict) -> dict | None:
    """Odd-generator values completing ``sl2_values`` to an osp(1|2) cocycle.

    Searches the weight-0 keys (the sl(2) part is taken to be weight 0, which
    holds for every closed formula here).  Returns None when no extension
    exists.
    """
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    delta = mu - lam - nu
    weights = (lam, nu, mu)
    order = max(2, math.ceil(2 * delta) + 3)
    for v in sl2_values.values():
        for k in v:
            order = max(order, math.ceil(k[2] + k[4] + Fraction(k[3] + k[5], 2)) + 1)
    xdeg = max([3] + [k[0] + 1 for v in sl2_values.values() for k in v])
    unknowns = [(g, k) for g in ODD
                for k in weight_zero_keys((parity + 1) % 2, delta, ad_weight(g), xdeg, order)]
    rows = _Index()
    pairs = generator_pairs(OSP)
    cols = []
    for g0, key in unknowns:
        table = delta1_raw({g0: {key: Fraction(1)}}, parity, weights, OSP, False, pairs)
        cols.append({rows[(gh, k)]: c for gh, v in table.items() for k, c in v.items()})
    base = delta1_raw(sl2_values, parity, weights, OSP, False, pairs)
    rhs = {rows[(gh, k)]: -c for gh, v in base.items() for k, c in v.items()}
    sol = solve(cols, rhs)
    if sol is None:
        return None
    out: dict = {}
    for j, c in sol.items():
        g, k = unknowns[j]
        out.setdefault(g, {})[k] = c
    return out


def _odd_unknown_columns(lam, nu, mu, parity, order, xdeg, rows):
    delta = mu - lam - nu
    cols = []
    for g0 in ODD:
        for key in weight_zero_keys((parity + 1) % 2, delta, ad_weight(g0), xdeg, order):
            table = delta1_raw({g0: {key: Fraction(1)}}, parity, (lam, nu, mu), OSP)
            cols.append({rows[(gh, k)]: c for gh, v in table.items() for k, c in v.items()})
    return cols


def extension_space(lam, nu, mu, parity: int, candidates: list[dict]) -> list[dict]:
    """Combinations of sl(2) cochains that extend to osp(1|2) cocycles.

    Returns a basis of coefficient vectors ``{candidate index: coeff}``.
    """
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    delta = mu - lam - nu
    order = max(2, math.ceil(2 * delta) + 3)
    xdeg = 3
    for cand in candidates:
        for v in cand.values():
            for k in v:
                order = max(order, math.ceil(k[2] + k[4] + Fraction(k[3] + k[5], 2)) + 1)
                xdeg = max(xdeg, k[0] + 1)
    rows = _Index()
    cand_cols = []
    for cand in candidates:
        table = delta1_raw(cand, parity, (lam, nu, mu), OSP)
        cand_cols.append({rows[(gh, k)]: c for gh, v in table.items() for k, c in v.items()})
    odd_cols = _odd_unknown_columns(lam, nu, mu, parity, order, xdeg, rows)
    n = len(candidates)
    rels = nullspace(cand_cols + odd_cols)
    vecs = [{j: c for j, c in r.items() if j < n} for r in rels]
    # keep an independent set of the projections
    from .linalg import Echelon
    E = Echelon()
    out = []
    for v in vecs:
        if v and E.add(v) is None and E.rank() > len(out):
            out.append(v)
    return out


# --------------------------------------------------------- super families

@dataclass
class FamilyMember:
    name: str
    cochain: Cochain1 | None
    ok: bool
    note: str = ""


def _block_params(lam, nu, mu, out, cf, cg):
    return lam + HALF * cf, nu + HALF * cg, mu + HALF * out


def _block_terms(family, lam, nu, mu, out, cf, cg):
    return family_terms(family, *_block_params(lam, nu, mu, out, cf, cg))


def _verify(name, lam, nu, mu, parity, values) -> FamilyMember:
    try:
        c = cochain_from_values(lam, nu, mu, parity, values)
    except ValueError as exc:
        return FamilyMember(name, None, False, f"formula inconsistent: {exc}")
    table = delta1(c)
    if not table.is_zero():
        return FamilyMember(name, c, False, "formula inconsistent: delta1 != 0")
    if is_trivial(c, check=False).trivial:
        return FamilyMember(name, c, False, "verified cocycle but a coboundary")
    return FamilyMember(name, c, True)


def _with_extension(name, lam, nu, mu, parity, bb: BlockBuilder, printed_odd=None) -> FamilyMember:
    sl2 = {g: v for g, v in bb.values().items() if g in SL2}
    if printed_odd is not None:
        vals = dict(sl2)
        vals.update(printed_odd.values())
        member = _verify(name, lam, nu, mu, parity, vals)
        if member.ok or "coboundary" in member.note:
            return member
        note = member.note + "; printed extension rejected"
    else:
        note = ""
    ext = extend_to_osp(lam, nu, mu, parity, sl2)
    if ext is None:
        return FamilyMember(name, cochain_from_values(lam, nu, mu, parity, sl2), False,
                            (note + "; " if note else "") + "sl(2) part admits no extension")
    vals = dict(sl2)
    vals.update(ext)
    member = _verify(name, lam, nu, mu, parity, vals)
    if note:
        member.note = (note + "; solved extension used" + ("" if member.ok else "; " + member.note))
    return member


def case1a_even(lam, nu, mu) -> FamilyMember:
    """Weakly super resonant, integer mu-lam-nu = k+1, lambda off the half-integer grid."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    k = int(mu - lam - nu) - 1
    _need(lam != 0, "case needs lambda != 0")
    a1 = Fraction(1)
    a4 = a1
    a3 = (2 * lam + k + 1) * a1 / (2 * lam)
    a2 = -(k + 1) * a1 / (2 * lam)
    bb = BlockBuilder()
    for coeff, (out, cf, cg) in ((a1, (0, 0, 0)), (a2, (0, 1, 1)), (a3, (1, 1, 0)), (a4, (1, 0, 1))):
        _, terms = _block_terms("a1", lam, nu, mu, out, cf, cg)
        bb.add_family(SL2, 1, out, cf, cg, terms, coeff)
    odd = BlockBuilder()
    for i in range(k + 2):
        odd.add(4, 1, 1, 0, 0, i, k + 1 - i,
                a1 * gbinom(k + 1, i) * gbinom(2 * nu + k, i) / gbinom(-2 * lam, i))
    odd.add(4, 1, 1, 1, 1, 0, k, -a1 * Fraction(k + 1) / (2 * lam))
    for i in range(1, k + 1):
        odd.add(4, 1, 1, 1, 1, i, k - i,
                -a1 * gbinom(k, i) * gbinom(2 * nu + k - 1, i) / gbinom(-2 * lam, i))
    return _with_extension("case1a", lam, nu, mu, 0, bb, odd)


def case1b_even(lam, nu, mu) -> FamilyMember:
    """Weakly super resonant on the grid: (lam, nu) = (-s/2, -t/2), s + t < k."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    k = int(mu - lam - nu) - 1
    s, t = _half_indices(lam, nu)
    a3 = Fraction(1)
    a2 = -Fraction(k + 1, k - s + 1) * a3
    a4 = -Fraction(k - t + 1, k - s + 1) * a3
    a1 = -Fraction(k - t - s, k - s + 1) * a3
    bb = BlockBuilder()
    for coeff, (out, cf, cg) in ((a1, (0, 0, 0)), (a2, (0, 1, 1)), (a3, (1, 1, 0)), (a4, (1, 0, 1))):
        try:
            _, terms = _block_terms("a4", lam, nu, mu, out, cf, cg)
        except InapplicableParameters:
            continue
        bb.add_family(SL2, 1, out, cf, cg, terms, coeff)
    odd = BlockBuilder()
    pre = -a3 / (k - s + 1)
    for i in range(s + 1, k - t + 1):
        odd.add(4, 1, 1, 0, 0, i, k - i,
                pre * (k - t + 1) * (-1) ** i * gbinom(k + 1, i) * gbinom(k - t - s - 1, i - s - 1))
    for i in range(s, k - t + 1):
        odd.add(4, 1, 1, 1, 1, i, k - i,
                pre * (k + 1) * (-1) ** i * gbinom(k + 1, i) * gbinom(k - t - s - 1, i - s - 1))
    return _with_extension("case1b", lam, nu, mu, 0, bb, odd)


def case1_odd(lam, nu, mu) -> FamilyMember:
    """Weakly super resonant with mu-lam-nu = k + 3/2, lambda off the grid."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    k = int(mu - lam - nu - Fraction(3, 2))
    a1 = Fraction(1)
    den = 2 * nu + k + 1
    _need(den != 0, "case needs 2*nu + k + 1 != 0")
    a2 = -2 * lam / den * a1
    a3 = (2 * nu + 2 * lam + k + 1) / den * a1
    a4 = 2 * lam / den * a1
    bb = BlockBuilder()
    for coeff, (out, cf, cg) in ((a1, (1, 0, 0)), (a2, (1, 1, 1)), (a3, (0, 1, 0)), (a4, (0, 0, 1))):
        _, terms = _block_terms("a1", lam, nu, mu, out, cf, cg)
        bb.add_family(SL2, 1, out, cf, cg, terms, coeff)
    return _with_extension("case1odd", lam, nu, mu, 1, bb)


def case2_members(lam, nu, mu) -> list[FamilyMember]:
    """Super resonant, integer case: the B + C + D decomposition, one member per
    free coefficient after the printed relations."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    k = int(mu - lam - nu) - 1
    s, t = _half_indices(lam, nu)
    out = []
    b_slots = [
        (0, 0, 0, k - t, t), (0, 1, 1, k - t, t - 1), (1, 1, 0, k - t, t), (1, 0, 1, k - t + 1, t - 1),
    ]
    for n, (o, cf, cg, i, j) in enumerate(b_slots, start=1):
        bb = BlockBuilder()
        bb.add_family(SL2, 2, o, cf, cg, {(i, j): Fraction(1)})
        out.append(_with_extension(f"case2_beta{n}", lam, nu, mu, 0, bb))
    g1 = Fraction(1)
    gam = {(0, 0, 0): g1, (1, 0, 1): g1, (1, 1, 0): Fraction(s - k - 1, s) * g1,
           (0, 1, 1): Fraction(k + 1, s) * g1}
    d1 = Fraction(1)
    dlt = {(0, 0, 0): d1, (1, 1, 0): d1, (1, 0, 1): Fraction(t - k - 1, t) * d1,
           (0, 1, 1): -Fraction(k + 1, t) * d1}
    for name, fam, coeffs in (("case2_gamma", "c", gam), ("case2_delta", "d", dlt)):
        bb = BlockBuilder()
        try:
            for (o, cf, cg), coeff in coeffs.items():
                _, terms = _block_terms(fam, lam, nu, mu, o, cf, cg)
                bb.add_family(SL2, 1, o, cf, cg, terms, coeff)
        except InapplicableParameters as exc:
            out.append(FamilyMember(name, None, False, f"block family undefined: {exc}"))
            continue
        out.append(_with_extension(name, lam, nu, mu, 0, bb))
    return out


def singular_even_i(lam, nu, mu) -> FamilyMember:
    """(lam, nu) = (-s/2, -(k-s)/2), mu - lam - nu = k + 1."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    k = int(mu - lam - nu) - 1
    s, _ = _half_indices(lam, nu)
    bb = BlockBuilder()
    bb.add(1, 1, 0, 1, 1, s, k - s, 1)
    bb.add(2, 1, 0, 1, 1, s, k - s, 1)
    for g in SL2:
        bb.add(g, 1, 1, 0, 1, s + 1, k - s, 1)
        bb.add(g, 1, 1, 1, 0, s, k - s + 1, -1)
    return _with_extension("singular_even_i", lam, nu, mu, 0, bb)


def singular_even_ii(lam, nu, mu) -> FamilyMember:
    """(lam, nu) = (-s/2, -(k+1)/2), s in 1..k, with alpha1 = -alpha2 = alpha3."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    k = int(mu - lam - nu) - 1
    s, t = _half_indices(lam, nu)
    if s == k + 1 and t != k + 1:
        return _mirror(singular_even_ii, lam, nu, mu, "singular_even_ii")
    bb = BlockBuilder()
    for i in range(s + 1, k + 2):
        bb.add_family(SL2, 1, 0, 0, 0, {(i, k + 1 - i): gbinom(k - s, i - s - 1)})
    for i in range(s, k + 1):
        bb.add_family(SL2, 1, 0, 1, 1, {(i, k - i): -gbinom(k - s, i - s)})
    for i in range(s, k + 2):
        bb.add_family(SL2, 1, 1, 1, 0, {(i, k + 1 - i): gbinom(k - s + 1, i - s)})
    return _with_extension("singular_even_ii", lam, nu, mu, 0, bb)


def swap_arguments(coeffs: dict) -> dict:
    """The operator (F, G) -> A(G, F), with the Koszul sign on theta-components."""
    blocks = keys_to_blocks(coeffs)
    swapped = {}
    for (o, cf, cg), terms in blocks.items():
        sign = -1 if cf and cg else 1
        swapped[(o, cg, cf)] = {(p, b, a): sign * c for (p, a, b), c in terms.items()}
    return blocks_to_keys(swapped)


def _mirror(builder, lam, nu, mu, name) -> FamilyMember:
    """Build at (nu, lam) and swap the arguments."""
    m = builder(nu, lam, mu)
    if m.cochain is None:
        return m
    vals = {g: swap_arguments(v) for g, v in m.cochain.values.items()}
    return _verify(name, lam, nu, mu, m.cochain.parity, vals)


def singular_odd_kminus1(lam, nu, mu) -> FamilyMember:
    """(0, 0) with mu - lam - nu = 1/2: printed restriction and extension."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    a = Fraction(1)
    bb = BlockBuilder()
    # alpha1 = alpha2 = -alpha3 = -alpha4 = -alpha6 = a, alpha5 = 0
    for g in SL2:
        bb.add(g, 1, 0, 1, 0, 0, 0, a)
        bb.add(g, 1, 0, 0, 1, 0, 0, a)
        bb.add(g, 1, 1, 0, 0, 0, 1, -a)
        bb.add(g, 1, 1, 0, 0, 1, 0, -a)
        bb.add(g, 2, 1, 0, 0, 0, 0, -a)
    odd = BlockBuilder()
    # theta alpha4 h1' F G, alpha4 = -a
    for o, cf, cg in ((1, 0, 0),):
        odd.add(4, 1, o, cf, cg, 0, 0, -a)
    return _with_extension("singular_odd_kminus1", lam, nu, mu, 1, bb, odd)


def singular_odd_ii(lam, nu, mu) -> list[FamilyMember]:
    """(lam, nu) = (-(k+1)/2, -(k+1)/2): theta h'' terms in two blocks."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    k = int(mu - lam - nu - Fraction(3, 2))
    out = []
    for name, (o, cf, cg, i, j) in (("alpha1", (1, 0, 0, 0, k + 1)), ("beta1", (1, 1, 1, 0, k))):
        bb = BlockBuilder()
        bb.add_family(SL2, 2, o, cf, cg, {(i, j): Fraction(1)})
        out.append(_with_extension(f"singular_odd_ii_{name}", lam, nu, mu, 1, bb))
    return out


def singular_odd_iii(lam, nu, mu) -> list[FamilyMember]:
    """(lam, nu) = (-(k+1)/2, -t/2), t in 1..k: B + C + D with printed relations."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    k = int(mu - lam - nu - Fraction(3, 2))
    s, t = _half_indices(lam, nu)
    if t == k + 1 and s != k + 1:
        return [_mirror(lambda a, b, c: singular_odd_iii(a, b, c)[0], lam, nu, mu, "singular_odd_iii")]
    out = []
    for n, (o, cf, cg, i, j) in enumerate(
            [(1, 0, 0, k - t + 1, t), (1, 1, 1, k - t + 1, t - 1), (0, 1, 0, k - t, t)], start=1):
        bb = BlockBuilder()
        bb.add_family(SL2, 2, o, cf, cg, {(i, j): Fraction(1)})
        out.append(_with_extension(f"singular_odd_iii_beta{n}", lam, nu, mu, 1, bb))
    # delta family: delta1 = -delta2 = -delta3
    try:
        bb = BlockBuilder()
        for (o, cf, cg), coeff in (((1, 0, 0), 1), ((1, 1, 1), -1), ((0, 1, 0), -1)):
            _, terms = _block_terms("d", lam, nu, mu, o, cf, cg)
            bb.add_family(SL2, 1, o, cf, cg, terms, coeff)
        out.append(_with_extension("singular_odd_iii_delta", lam, nu, mu, 1, bb))
    except InapplicableParameters as exc:
        out.append(FamilyMember("singular_odd_iii_delta", None, False, str(exc)))
    # gamma family tied to the a1 block
    try:
        bb = BlockBuilder()
        a1 = Fraction(1)
        _, terms = _block_terms("a1", lam, nu, mu, 0, 0, 1)
        bb.add_family(SL2, 1, 0, 0, 1, terms, a1)
        for (o, cf, cg), coeff in (((1, 0, 0), -a1), ((1, 1, 1), Fraction(-t, k + 1) * a1),
                                   ((0, 1, 0), Fraction(k + 1 - t, k + 1) * a1)):
            _, terms = _block_terms("c", lam, nu, mu, o, cf, cg)
            bb.add_family(SL2, 1, o, cf, cg, terms, coeff)
        out.append(_with_extension("singular_odd_iii_gamma", lam, nu, mu, 1, bb))
    except InapplicableParameters as exc:
        out.append(FamilyMember("singular_odd_iii_gamma", None, False, str(exc)))
    return out


def singular_odd_iv(lam, nu, mu) -> list[FamilyMember]:
    """(lam, nu) = (-s/2, -(k+1-s)/2): the printed h''-relations only."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    k = int(mu - lam - nu - Fraction(3, 2))
    s, t = _half_indices(lam, nu)
    b4 = Fraction(1)
    b2 = -Fraction(k - s + 1, k + 2) * b4
    b1 = -Fraction(s, k + 3) * b4
    bb = BlockBuilder()
    bb.add_family(SL2, 2, 0, 1, 0, {(s - 1, k - s + 1): b1})
    bb.add_family(SL2, 2, 0, 0, 1, {(s, k - s): b2})
    bb.add_family(SL2, 2, 1, 0, 0, {(k - t, t): b4})
    return [_with_extension("singular_odd_iv_beta", lam, nu, mu, 1, bb)]


def super_family_members(lam, nu, mu) -> list[FamilyMember]:
    """All closed-form super cocycles applicable to the triple, verified."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    delta = mu - lam - nu
    cls = classify(lam, nu, mu)
    st = _half_indices(lam, nu)
    if (2 * delta).denominator != 1 or delta < 0:
        return []
    integer = delta.denominator == 1
    if cls.super_tag == "super_resonant" and integer:
        return case2_members(lam, nu, mu)
    if integer:
        k = int(delta) - 1
        if st is None:
            return [case1a_even(lam, nu, mu)] if lam != 0 else []
        s, t = st
        if s + t == k:
            return [singular_even_i(lam, nu, mu)]
        if (s == k + 1) != (t == k + 1) and s + t >= k + 2:
            return [singular_even_ii(lam, nu, mu)]
        if s + t < k:
            return [case1b_even(lam, nu, mu)]
        return []
    k = int(delta - Fraction(3, 2))
    if st is None:
        return [case1_odd(lam, nu, mu)]
    s, t = st
    if k == -1 and (s, t) == (0, 0):
        return [singular_odd_kminus1(lam, nu, mu)]
    if k >= 1 and s == t == k + 1:
        return singular_odd_ii(lam, nu, mu)
    if k >= 1 and (s == k + 1) != (t == k + 1) and min(s, t) >= 1:
        return singular_odd_iii(lam, nu, mu)
    if k >= 1 and s + t == k + 1 and s * t != 0:
        return singular_odd_iv(lam, nu, mu)
    return []


@dataclass
class FamilyReport:
    lam: Fraction
    nu: Fraction
    mu: Fraction
    members: list
    independent: int
    engine_dim: int
    basis: list = field(default_factory=list)
    source: str = "closed-form"
    discrepancies: list = field(default_factory=list)


def super_family_basis(lam, nu, mu, **opts) -> FamilyReport:
    """Closed-form cocycles where they verify; the engine basis otherwise."""
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    members = super_family_members(lam, nu, mu)
    good = [m.cochain for m in members if m.ok]
    indep = independent_classes(good) if good else 0
    engine = dim_h1(lam, nu, mu, **opts)
    report = FamilyReport(lam, nu, mu, members, indep, engine.dim)
    report.discrepancies = [f"{m.name}: {m.note}" for m in members if not m.ok]
    if indep == engine.dim and len(good) == indep:
        report.basis = good
    else:
        report.basis = engine.basis
        report.source = "engine"
        report.discrepancies.append(
            f"closed forms give {indep} independent classes, engine finds {engine.dim}")
    return report
