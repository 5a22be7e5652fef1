"""Bilinear differential operators F_lambda (x) F_nu -> F_mu on R^{1|1}.

Canonical basis
---------------
A key ``(m, tau, i, ef, j, eg)`` denotes the bilinear map::

    (F, G) -> x^m theta^tau * (d_x^i d_theta^ef F) * (d_x^j d_theta^eg G)

with ``d_theta(f0 + f1 theta) = f1``.  These maps are linearly independent,
so an operator is a sparse ``{key: Fraction}`` dict.

Formal jets
-----------
Operators are evaluated on *generic* densities whose component jets are
formal symbols ``(c, a)`` meaning ``d_x^a`` of component ``c`` (0 = the
theta-free part f0, 1 = the theta-coefficient f1).  A jet is a dict
``{(th, p, syms): coeff}`` for ``coeff * x^p * theta^th * prod(syms)``; the
first symbol belongs to F, the second to G.  The action of a contact field on
an operator is computed on jets and read back into keys by pattern matching,
which needs no linear solves.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from .liealg import Density, gen_hamiltonian, gen_parity
from .superfield import (
    ParityError, Poly, Q, SuperFunction, eta, fmt_q,
)

Key = tuple  # (m, tau, i, ef, j, eg)
HALF = Fraction(1, 2)


def key_parity(key: Key) -> int:
    return (key[1] + key[3] + key[5]) % 2


def key_order(key: Key) -> Fraction:
    """Derivative order, counting d_theta as half of d_x."""
    return key[2] + key[4] + Fraction(key[3] + key[5], 2)


def weight_of_key(key: Key, delta, generator: int | None = None) -> Fraction:
    """Eigenvalue of X_x on the key operator (minus ad-weight of ``generator``).

    ``delta = mu - lambda - nu``.  With a generator, this is the eigenvalue of
    the grading operator on the basis cochain ``X_generator -> key``.
    """
    m, tau, i, ef, j, eg = key
    w = m - i - j + Fraction(tau - ef - eg, 2) + Q(delta)
    if generator is not None:
        from .liealg import ad_weight
        w -= ad_weight(generator)
    return w


@dataclass(frozen=True)
class OperatorContext:
    """Weights and truncation bounds shared by a family of operators."""

    lam: Fraction
    nu: Fraction
    mu: Fraction
    max_order: int = 6
    max_xdeg: int = 3
    classical: bool = False

    def __post_init__(self):
        for name in ("lam", "nu", "mu"):
            object.__setattr__(self, name, Q(getattr(self, name)))

    @property
    def delta(self) -> Fraction:
        return self.mu - self.lam - self.nu

    @property
    def weights(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.lam, self.nu, self.mu)

    def admits(self, key: Key) -> bool:
        if self.classical and (key[1] or key[3] or key[5]):
            return False
        return key[0] <= self.max_xdeg and key_order(key) <= self.max_order

    def widen(self, dxdeg: int = 1, dorder: int = 0) -> "OperatorContext":
        return replace(self, max_xdeg=self.max_xdeg + dxdeg, max_order=self.max_order + dorder)


def iter_keys(parity: int, max_xdeg: int, max_order, classical: bool = False) -> Iterator[Key]:
    """All canonical keys of a parity inside the (x-degree, order) box, sorted."""
    twice = int(2 * Q(max_order))
    combos = [(0, 0, 0)] if classical else [
        (t, a, b) for t in (0, 1) for a in (0, 1) for b in (0, 1)]
    out = []
    for tau, ef, eg in combos:
        if (tau + ef + eg) % 2 != parity:
            continue
        for i in range(twice // 2 + 1):
            for j in range(twice // 2 + 1):
                if 2 * (i + j) + ef + eg > twice:
                    continue
                for m in range(max_xdeg + 1):
                    out.append((m, tau, i, ef, j, eg))
    return iter(sorted(out))


def weight_zero_keys(parity: int, delta, target_weight, max_xdeg: int, max_order,
                     classical: bool = False) -> list[Key]:
    """Keys of given parity with ``weight_of_key == target_weight`` (sorted)."""
    delta = Q(delta)
    target_weight = Q(target_weight)
    twice = int(2 * Q(max_order))
    combos = [(0, 0, 0)] if classical else [
        (t, a, b) for t in (0, 1) for a in (0, 1) for b in (0, 1)]
    out = []
    for tau, ef, eg in combos:
        if (tau + ef + eg) % 2 != parity:
            continue
        for i in range(twice // 2 + 1):
            for j in range(twice // 2 + 1):
                if 2 * (i + j) + ef + eg > twice:
                    continue
                m = target_weight + i + j - Fraction(tau - ef - eg, 2) - delta
                if m.denominator == 1 and 0 <= m <= max_xdeg:
                    out.append((int(m), tau, i, ef, j, eg))
    return sorted(out)


# ------------------------------------------------------------------ jets

def _add_into(acc: dict, key, c):
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def jet_dx(J: dict) -> dict:
    out: dict = {}
    for (th, p, syms), c in J.items():
        if p:
            _add_into(out, (th, p - 1, syms), c * p)
        for n, (comp, a) in enumerate(syms):
            new = syms[:n] + ((comp, a + 1),) + syms[n + 1:]
            _add_into(out, (th, p, new), c)
    return out


def jet_dtheta(J: dict) -> dict:
    return {(0, p, syms): c for (th, p, syms), c in J.items() if th == 1}


def jet_times_theta(J: dict) -> dict:
    return {(1, p, syms): c for (th, p, syms), c in J.items() if th == 0}


def jet_scale(J: dict, s) -> dict:
    if not s:
        return {}
    return {k: c * s for k, c in J.items()}


def jet_add(*Js: dict) -> dict:
    out: dict = {}
    for J in Js:
        for k, c in J.items():
            _add_into(out, k, c)
    return out


def jet_mul(J1: dict, J2: dict) -> dict:
    out: dict = {}
    for (t1, p1, s1), c1 in J1.items():
        for (t2, p2, s2), c2 in J2.items():
            if t1 and t2:
                continue
            _add_into(out, (t1 + t2, p1 + p2, s1 + s2), c1 * c2)
    return out


def sf_to_jet(F: SuperFunction) -> dict:
    J = {}
    for th, poly in ((0, F.even), (1, F.odd)):
        for p, c in enumerate(poly.coeffs):
            if c:
                J[(th, p, ())] = c
    return J


def lie_jet(H: SuperFunction, weight, J: dict) -> dict:
    """L^weight_{X_H} applied to a jet: H J' + 1/2 eta(H) eta_bar(J) + weight H' J."""
    dJ = jet_dx(J)
    eta_bar_J = jet_add(jet_dtheta(J), jet_scale(jet_times_theta(dJ), -1))
    out = jet_mul(sf_to_jet(H), dJ)
    out = jet_add(out, jet_scale(jet_mul(sf_to_jet(eta(H)), eta_bar_J), HALF))
    w = Q(weight)
    if w:
        out = jet_add(out, jet_scale(jet_mul(sf_to_jet(H.dx()), J), w))
    return out


def generic_jet(classical: bool = False) -> dict:
    """Generic density f0 + f1 theta (or just f0 in the classical setting)."""
    J = {(0, 0, ((0, 0),)): Fraction(1)}
    if not classical:
        J[(1, 0, ((1, 0),))] = Fraction(1)
    return J


def eval_key_on_jets(key: Key, JF: dict, JG: dict) -> dict:
    m, tau, i, ef, j, eg = key
    L = JF
    for _ in range(i):
        L = jet_dx(L)
    if ef:
        L = jet_dtheta(L)
    R = JG
    for _ in range(j):
        R = jet_dx(R)
    if eg:
        R = jet_dtheta(R)
    out = jet_mul(L, R)
    if m:
        out = {(th, p + m, s): c for (th, p, s), c in out.items()}
    if tau:
        out = jet_times_theta(out)
    return out


def eval_on_jets(coeffs: dict, JF: dict, JG: dict) -> dict:
    out: dict = {}
    for key, c in coeffs.items():
        for k, v in eval_key_on_jets(key, JF, JG).items():
            _add_into(out, k, v * c)
    return out


class ExtractionError(RuntimeError):
    """A jet term did not match any canonical key (internal inconsistency)."""


def jet_to_blocks(J: dict) -> dict:
    """Bilinear jet -> ``{(out, cf, cg): {(p, a, b): coeff}}`` component blocks."""
    blocks: dict = {}
    for (th, p, syms), c in J.items():
        if len(syms) != 2:
            raise ExtractionError(f"non-bilinear jet term {syms}")
        (cf, a), (cg, b) = syms
        blocks.setdefault((th, cf, cg), {})[(p, a, b)] = c
    return blocks


def blocks_to_keys(blocks: dict) -> dict:
    """Invert the unitriangular key -> block relation."""
    def B(o, f, g):
        return blocks.get((o, f, g), {})

    K = {}
    K[(0, 0, 0)] = dict(B(0, 0, 0))
    K[(0, 1, 0)] = dict(B(0, 1, 0))
    K[(0, 0, 1)] = dict(B(0, 0, 1))
    K[(0, 1, 1)] = dict(B(0, 1, 1))
    K[(1, 0, 0)] = dict(B(1, 0, 0))
    K[(1, 1, 0)] = jet_add(B(1, 1, 0), jet_scale(K[(0, 0, 0)], -1))
    K[(1, 0, 1)] = jet_add(B(1, 0, 1), jet_scale(K[(0, 0, 0)], -1))
    K[(1, 1, 1)] = jet_add(B(1, 1, 1), jet_scale(K[(0, 1, 0)], -1),
                           jet_scale(K[(0, 0, 1)], -1))
    out = {}
    for (tau, ef, eg), terms in K.items():
        for (p, a, b), c in terms.items():
            if c:
                out[(p, tau, a, ef, b, eg)] = c
    return out


def keys_to_blocks(coeffs: dict, classical: bool = False) -> dict:
    return jet_to_blocks(eval_on_jets(coeffs, generic_jet(classical), generic_jet(classical)))


def jet_to_keys(J: dict, classical: bool = False) -> dict:
    blocks = jet_to_blocks(J)
    if classical:
        bad = [b for b in blocks if b != (0, 0, 0)]
        if bad:
            raise ExtractionError(f"classical operator produced theta blocks {bad}")
        # on theta-free functions a key is its own (0; 0, 0) block
        return {(p, 0, a, 0, b, 0): c for (p, a, b), c in blocks.get((0, 0, 0), {}).items() if c}
    return blocks_to_keys(blocks)


# --------------------------------------------------------------- operators

@dataclass(frozen=True, eq=False)
class BilinearOperator:
    """Sparse combination of canonical keys in a fixed weight context."""

    ctx: OperatorContext
    coeffs: dict = field(default_factory=dict)
    parity: int | None = None

    def __post_init__(self):
        clean = {tuple(k): Q(c) for k, c in self.coeffs.items() if c}
        object.__setattr__(self, "coeffs", clean)
        pars = {key_parity(k) for k in clean}
        if len(pars) > 1:
            raise ParityError("operator mixes parities")
        if pars:
            p = pars.pop()
            if self.parity is not None and self.parity != p:
                raise ParityError(f"declared parity {self.parity} but keys have parity {p}")
            object.__setattr__(self, "parity", p)
        for k in clean:
            if not self.ctx.admits(k):
                raise ValueError(f"key {k} outside context bounds {self.ctx}")

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, BilinearOperator):
            return NotImplemented
        return self.ctx.weights == other.ctx.weights and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx.weights, tuple(sorted(self.coeffs.items()))))

    def _combine(self, other: "BilinearOperator", s) -> "BilinearOperator":
        if self.ctx.weights != other.ctx.weights:
            raise ValueError("weight contexts differ")
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            _add_into(out, k, c * s)
        ctx = self.ctx if all(self.ctx.admits(k) for k in out) else other.ctx
        return BilinearOperator(ctx, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return BilinearOperator(self.ctx, {k: -c for k, c in self.coeffs.items()}, self.parity)

    def __mul__(self, s):
        return BilinearOperator(self.ctx, {k: c * Q(s) for k, c in self.coeffs.items()}, self.parity)

    __rmul__ = __mul__

    @property
    def order(self) -> Fraction:
        return max((key_order(k) for k in self.coeffs), default=Fraction(0))

    def to_records(self) -> list[dict]:
        return [
            {"m": k[0], "tau": k[1], "i": k[2], "ef": k[3], "j": k[4], "eg": k[5],
             "coeff": fmt_q(c)}
            for k, c in sorted(self.coeffs.items())
        ]

    @classmethod
    def from_records(cls, ctx: OperatorContext, records: Iterable[dict]) -> "BilinearOperator":
        return cls(ctx, {(r["m"], r["tau"], r["i"], r["ef"], r["j"], r["eg"]): Q(r["coeff"])
                         for r in records})

    def __repr__(self):
        return f"BilinearOperator({self.to_records()})"


def multiplication(ctx: OperatorContext) -> BilinearOperator:
    return BilinearOperator(ctx, {(0, 0, 0, 0, 0, 0): 1})


def _apply_key(key: Key, F: SuperFunction, G: SuperFunction) -> SuperFunction:
    m, tau, i, ef, j, eg = key
    L = F.dx(i) if i else F
    if ef:
        L = L.dtheta()
    R = G.dx(j) if j else G
    if eg:
        R = R.dtheta()
    out = L * R
    if m:
        out = out * SuperFunction(Poly.monomial(m))
    if tau:
        out = out.times_theta()
    return out


def evaluate(A: BilinearOperator, F: Density, G: Density) -> Density:
    if F.weight != A.ctx.lam or G.weight != A.ctx.nu:
        raise ValueError(
            f"weights ({F.weight}, {G.weight}) do not match context ({A.ctx.lam}, {A.ctx.nu})")
    out = SuperFunction()
    for key, c in A.coeffs.items():
        out = out + _apply_key(key, F.value, G.value) * c
    return Density(out, A.ctx.mu)


def apply_operator(coeffs: dict, F: SuperFunction, G: SuperFunction) -> SuperFunction:
    out = SuperFunction()
    for key, c in coeffs.items():
        out = out + _apply_key(key, F, G) * c
    return out


# ------------------------------------------------------------------ action

@lru_cache(maxsize=None)
def _act_key(H_even: tuple, H_odd: tuple, key: Key, lam: Fraction, nu: Fraction,
             mu: Fraction, classical: bool) -> tuple:
    H = SuperFunction(Poly(H_even), Poly(H_odd))
    pH = H.parity()
    pA = key_parity(key)
    JF = generic_jet(classical)
    JG = generic_jet(classical)
    first = lie_jet(H, mu, eval_key_on_jets(key, JF, JG))
    second = eval_key_on_jets(key, lie_jet(H, lam, JF), JG)
    third = eval_key_on_jets(key, JF, lie_jet(H, nu, JG))
    if pH:
        # Koszul sign (-1)^{|H||F|}: F's odd part is its theta-component
        third = {k: (-c if k[2][0][0] == 1 else c) for k, c in third.items()}
    sign = -1 if (pA * pH) % 2 else 1
    J = jet_add(first, jet_scale(jet_add(second, third), -sign))
    if classical:
        J = {k: c for k, c in J.items() if k[0] == 0}
    return tuple(sorted(jet_to_keys(J, classical).items()))


def act_coeffs(H: SuperFunction, coeffs: dict, weights, classical: bool = False) -> dict:
    """X_H . A on raw key dicts (H parity-homogeneous)."""
    lam, nu, mu = (Q(w) for w in weights)
    out: dict = {}
    he, ho = H.even.coeffs, H.odd.coeffs
    for key, c in coeffs.items():
        for k, v in _act_key(he, ho, key, lam, nu, mu, classical):
            _add_into(out, k, v * c)
    return out


def act(X, A: BilinearOperator) -> BilinearOperator:
    """X_H . A = L^mu o A - (-1)^{|A||H|} A o L^{(lambda, nu)}."""
    H = X.hamiltonian if hasattr(X, "hamiltonian") else X
    if A.is_zero():
        return BilinearOperator(A.ctx.widen())
    out = act_coeffs(H, A.coeffs, A.ctx.weights, A.ctx.classical)
    return BilinearOperator(A.ctx.widen(), out)


def act_generator(g: int, coeffs: dict, weights, classical: bool = False) -> dict:
    return act_coeffs(gen_hamiltonian(g), coeffs, weights, classical)


# ------------------------------------------------------------ decomposition

# slots per parity, in the order printed for the even/odd decompositions;
# each slot is (out component, F component, G component) plus weight shifts
EVEN_SLOTS = ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0))
ODD_SLOTS = ((1, 0, 0), (1, 1, 1), (0, 0, 1), (0, 1, 0))


def slot_weights(ctx: OperatorContext, slot) -> tuple[Fraction, Fraction, Fraction]:
    out, cf, cg = slot
    return (ctx.lam + HALF * cf, ctx.nu + HALF * cg, ctx.mu + HALF * out)


def decompose_components(A: BilinearOperator) -> list[BilinearOperator]:
    """The four classical (theta-free) operators hidden in a homogeneous A.

    The parity-change functor is the identity on underlying data: the slot
    ``(out, cf, cg)`` collects ``x^p f_cf^(a) g_cg^(b)`` contributing to the
    ``out`` component, read as a classical operator between densities of the
    shifted weights.
    """
    parity = A.parity if A.parity is not None else 0
    slots = EVEN_SLOTS if parity == 0 else ODD_SLOTS
    blocks = keys_to_blocks(A.coeffs)
    comps = []
    for slot in slots:
        lam, nu, mu = slot_weights(A.ctx, slot)
        ctx = OperatorContext(lam, nu, mu, A.ctx.max_order + 1, A.ctx.max_xdeg, classical=True)
        terms = blocks.get(slot, {})
        comps.append(BilinearOperator(ctx, {(p, 0, a, 0, b, 0): c for (p, a, b), c in terms.items()}))
    return comps


def reassemble_components(ctx: OperatorContext, parity: int, comps) -> BilinearOperator:
    slots = EVEN_SLOTS if parity == 0 else ODD_SLOTS
    blocks = {}
    for slot, comp in zip(slots, comps):
        terms = {(k[0], k[2], k[4]): c for k, c in comp.coeffs.items()}
        if terms:
            blocks[slot] = terms
    return BilinearOperator(ctx, blocks_to_keys(blocks))
