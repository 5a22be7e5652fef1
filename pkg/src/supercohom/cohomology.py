"""Chevalley-Eilenberg cochains of osp(1|2) (or sl(2)) with values in
bilinear differential operators, and the exact computation of H^1.

Conventions::

    (delta v)(g)      = (-1)^{p(g) p(v)} g.v
    (delta U)(g, h)   = (-1)^{p(g) p(U)} g.U(h) - (-1)^{p(h)(p(g)+p(U))} h.U(g) - U([g, h])

A 1-cochain of parity p assigns to X_g an operator of parity p + p(g).

Computing H^1
-------------
The grading ``L c = X_x.c(.) - c([X_x, .])`` is diagonal on the key basis and
equals ``delta i_{X_x} + i_{X_x} delta``; a cocycle of nonzero weight w is the
coboundary of ``c(X_x)/w``.  The fast path therefore works only with weight-0
cochains, which also pins the parity sector (even iff mu - lambda - nu is an
integer).  The full path keeps every weight inside the truncation box and is
used as a cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .biop import (
    BilinearOperator, OperatorContext, _add_into, act_generator, iter_keys,
    key_order, key_parity, weight_of_key, weight_zero_keys,
)
from .liealg import GEN_NAMES, ODD, OSP, SL2, ad_weight, basis_bracket, gen_parity
from .linalg import Echelon, extend_basis, intersect_with_coordinate_subspace, nullspace, rank, solve
from .superfield import Q, fmt_q

MODES = ("super", "classical", "relative")
C0_ORDER_HEADROOM = 0


class NotACocycle(ValueError):
    pass


class Inconclusive(RuntimeError):
    pass


def mode_generators(mode: str) -> tuple[int, ...]:
    return {"super": OSP, "classical": SL2, "relative": ODD}[mode]


def algebra_generators(mode: str) -> tuple[int, ...]:
    return SL2 if mode == "classical" else OSP


def generator_pairs(gens: Sequence[int]) -> list[tuple[int, int]]:
    """Unordered pairs g <= h; an equal pair only for odd generators."""
    return [(g, h) for g in gens for h in gens
            if g < h or (g == h and gen_parity(g))]


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


# ----------------------------------------------------------------- cochains

@dataclass
class Cochain1:
    """Assignment X_g -> operator for each generator of the algebra."""

    ctx: OperatorContext
    parity: int
    values: dict = field(default_factory=dict)  # g -> {key: coeff}
    mode: str = "super"

    def __post_init__(self):
        clean = {}
        for g, v in self.values.items():
            coeffs = v.coeffs if isinstance(v, BilinearOperator) else v
            coeffs = {k: Q(c) for k, c in coeffs.items() if c}
            for k in coeffs:
                if key_parity(k) != (self.parity + gen_parity(g)) % 2:
                    raise ValueError(
                        f"value on {GEN_NAMES[g]} has key {k} of the wrong parity")
            if coeffs:
                clean[g] = coeffs
        self.values = clean

    def value(self, g: int) -> BilinearOperator:
        ctx = self.ctx
        coeffs = self.values.get(g, {})
        if any(not ctx.admits(k) for k in coeffs):
            ctx = _box_for(coeffs, ctx)
        return BilinearOperator(ctx, coeffs)

    def is_zero(self) -> bool:
        return not self.values

    def __add__(self, other: "Cochain1") -> "Cochain1":
        vals = {g: dict(v) for g, v in self.values.items()}
        for g, v in other.values.items():
            acc = vals.setdefault(g, {})
            for k, c in v.items():
                _add_into(acc, k, c)
        return Cochain1(self.ctx, self.parity, vals, self.mode)

    def __mul__(self, s) -> "Cochain1":
        s = Q(s)
        return Cochain1(self.ctx, self.parity,
                        {g: {k: c * s for k, c in v.items()} for g, v in self.values.items()},
                        self.mode)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + other * -1

    def __eq__(self, other):
        return (isinstance(other, Cochain1) and self.values == other.values
                and self.ctx.weights == other.ctx.weights)

    def to_json(self) -> dict:
        return {GEN_NAMES[g]: self.value(g).to_records() for g in sorted(self.values)}

    def vector(self, index: dict) -> dict:
        return {index[(g, k)]: c for g, v in self.values.items() for k, c in v.items()}


def _box_for(coeffs: dict, ctx: OperatorContext) -> OperatorContext:
    deg = max([ctx.max_xdeg] + [k[0] for k in coeffs])
    order = max([ctx.max_order] + [math.ceil(key_order(k)) for k in coeffs])
    return OperatorContext(ctx.lam, ctx.nu, ctx.mu, order, deg, ctx.classical)


@dataclass
class PairTable:
    """Values of a 2-cochain on unordered generator pairs."""

    ctx: OperatorContext
    entries: dict  # (g, h) with g <= h -> {key: coeff}

    def value(self, g: int, h: int) -> dict:
        if g <= h:
            return self.entries.get((g, h), {})
        s = -_sign(gen_parity(g) * gen_parity(h))
        return {k: s * c for k, c in self.entries.get((h, g), {}).items()}

    def is_zero(self) -> bool:
        return all(not v for v in self.entries.values())


# --------------------------------------------------------------- coboundary

def delta0_raw(v: dict, parity: int, weights, gens: Sequence[int], classical=False) -> dict:
    out = {}
    for g in gens:
        val = act_generator(g, v, weights, classical)
        if gen_parity(g) * parity % 2:
            val = {k: -c for k, c in val.items()}
        if val:
            out[g] = val
    return out


def delta1_raw(values: dict, parity: int, weights, gens: Sequence[int], classical=False,
               pairs: Iterable | None = None) -> dict:
    out = {}
    for g, h in (pairs if pairs is not None else generator_pairs(gens)):
        pg, ph = gen_parity(g), gen_parity(h)
        acc: dict = {}
        if h in values:
            for k, c in act_generator(g, values[h], weights, classical).items():
                _add_into(acc, k, _sign(pg * parity) * c)
        if g in values:
            for k, c in act_generator(h, values[g], weights, classical).items():
                _add_into(acc, k, -_sign(ph * (pg + parity)) * c)
        for b, cb in basis_bracket(g, h).items():
            for k, c in values.get(b, {}).items():
                _add_into(acc, k, -cb * c)
        if acc:
            out[(g, h)] = acc
    return out


def delta0(v: BilinearOperator, mode: str = "super") -> Cochain1:
    p = v.parity or 0
    gens = algebra_generators(mode)
    vals = delta0_raw(v.coeffs, p, v.ctx.weights, gens, v.ctx.classical)
    return Cochain1(v.ctx.widen(), p, vals, mode)


def delta1(c: Cochain1) -> PairTable:
    gens = algebra_generators(c.mode)
    return PairTable(c.ctx.widen(), delta1_raw(c.values, c.parity, c.ctx.weights, gens,
                                               c.ctx.classical))


def is_cocycle(c: Cochain1) -> bool:
    return delta1(c).is_zero()


def grading_operator(c: Cochain1) -> Cochain1:
    """X_x.c(.) - c([X_x, .]), computed generator-wise."""
    out = {}
    for g, v in c.values.items():
        val = act_generator(1, v, c.ctx.weights, c.ctx.classical)
        for k, cc in v.items():
            _add_into(val, k, -ad_weight(g) * cc)
        out[g] = val
    return Cochain1(c.ctx.widen(), c.parity, out, c.mode)


def cochain_weights(c: Cochain1) -> set:
    return {weight_of_key(k, c.ctx.delta, g) for g, v in c.values.items() for k in v}


# ------------------------------------------------------------- H^1 pipeline

def default_truncation(lam, nu, mu) -> tuple[int, int]:
    delta = Q(mu) - Q(lam) - Q(nu)
    return max(2, math.ceil(2 * delta) + 3), 3


def sector_parity(delta: Fraction) -> int | None:
    """Parity of the only sector that can carry cohomology."""
    two = 2 * delta
    if two.denominator != 1:
        return None
    return 0 if delta.denominator == 1 else 1


@dataclass
class SectorResult:
    parity: int
    dim: int
    dim_z: int
    dim_b: int
    basis: list


@dataclass
class H1Result:
    lam: Fraction
    nu: Fraction
    mu: Fraction
    mode: str
    dim: int
    parity: str
    stabilized: bool
    order: int
    xdeg: int
    basis: list = field(default_factory=list)
    shortcut: bool = False
    history: list = field(default_factory=list)
    sectors: dict = field(default_factory=dict)

    def to_json(self, with_basis: bool = True) -> dict:
        out = {
            "lambda": fmt_q(self.lam), "nu": fmt_q(self.nu), "mu": fmt_q(self.mu),
            "mode": self.mode, "parity": self.parity, "dim": self.dim,
            "stabilized": self.stabilized, "order": self.order, "xdeg": self.xdeg,
            "shortcut": self.shortcut,
        }
        out["basis"] = [c.to_json() for c in self.basis] if with_basis else []
        return out


def cochain1_basis(mode: str, parity: int, delta, order, xdeg: int, fast: bool) -> list:
    classical = mode == "classical"
    out = []
    for g in mode_generators(mode):
        p = (parity + gen_parity(g)) % 2
        if fast:
            keys = weight_zero_keys(p, delta, ad_weight(g), xdeg, order, classical)
        else:
            keys = list(iter_keys(p, xdeg, order, classical))
        out.extend((g, k) for k in keys)
    return out


def cochain0_basis(mode: str, parity: int, delta, order, xdeg: int, fast: bool) -> list:
    classical = mode == "classical"
    if fast:
        return weight_zero_keys(parity, delta, 0, xdeg, order, classical)
    return list(iter_keys(parity, xdeg, order, classical))


class _Index(dict):
    """Registry assigning consecutive integers to hashable labels."""

    def __missing__(self, label):
        n = len(self)
        self[label] = n
        return n


def _delta1_column(g0: int, key, parity: int, weights, gens, classical) -> dict:
    pairs = [(g, h) for (g, h) in generator_pairs(gens)
             if g0 in (g, h) or g0 in basis_bracket(g, h)]
    return delta1_raw({g0: {key: Fraction(1)}}, parity, weights, gens, classical, pairs)


def sector_h1(weights, mode: str, parity: int, order, xdeg: int, fast: bool = True,
              want_basis: bool = True) -> SectorResult:
    """dim Z - dim B for one parity sector inside the truncation box."""
    lam, nu, mu = weights
    delta = mu - lam - nu
    classical = mode == "classical"
    gens = algebra_generators(mode)
    basis = cochain1_basis(mode, parity, delta, order, xdeg, fast)
    coord = _Index()
    for label in basis:
        coord[label]
    n_inside = len(coord)

    rows = _Index()
    columns = []
    for g0, key in basis:
        table = _delta1_column(g0, key, parity, weights, gens, classical)
        columns.append({rows[(gh, k)]: c for gh, v in table.items() for k, c in v.items()})
    z_rel = nullspace(columns)
    z_vecs = [{j: c for j, c in r.items()} for r in z_rel]

    # coboundaries from a C^0 box with x-degree headroom
    c0 = cochain0_basis(mode, parity, delta, order + C0_ORDER_HEADROOM, xdeg + 2, fast)
    if mode == "relative":
        c0_vecs = _invariant_elements(c0, weights, parity)
    else:
        c0_vecs = [{k: Fraction(1)} for k in c0]
    images = []
    for v in c0_vecs:
        img = delta0_raw(v, parity, weights, mode_generators(mode), classical)
        if mode == "relative" and any(g in img for g in SL2):
            raise AssertionError("invariant element with nonzero sl(2) coboundary")
        images.append({coord[(g, k)]: c for g, vv in img.items() for k, c in vv.items()})
    b_vecs = intersect_with_coordinate_subspace(images, lambda i: i < n_inside)
    dim_b = rank(b_vecs)
    dim = len(z_vecs) - dim_b

    reps = []
    if want_basis and dim:
        picks = extend_basis(b_vecs, z_vecs)
        ctx = OperatorContext(lam, nu, mu, order, xdeg, classical)
        for n in picks:
            vals: dict = {}
            for j, c in z_vecs[n].items():
                g, k = basis[j]
                vals.setdefault(g, {})[k] = c
            reps.append(Cochain1(ctx, parity, vals, mode))
    return SectorResult(parity, dim, len(z_vecs), dim_b, reps)


def _invariant_elements(keys: list, weights, parity: int) -> list[dict]:
    """sl(2)-invariant operators spanned by ``keys``."""
    rows = _Index()
    cols = []
    for k in keys:
        col = {}
        for g in SL2:
            for kk, c in act_generator(g, {k: Fraction(1)}, weights).items():
                col[rows[(g, kk)]] = c
        cols.append(col)
    return [{keys[j]: c for j, c in rel.items()} for rel in nullspace(cols)]


def dim_h1(lam, nu, mu, mode: str = "super", order: int | None = None,
           xdeg: int | None = None, fast: bool = True, parity: str = "auto",
           shortcut: bool = True, stabilize: bool = True, max_order: int | None = None,
           max_xdeg: int = 6, want_basis: bool = True) -> H1Result:
    """Dimension of H^1 with a stabilization check across truncations.

    ``parity`` is ``"auto"`` (the sector allowed by the weight argument, or
    both when the full path is requested), ``"even"``, ``"odd"`` or ``"both"``.
    ``max_order`` defaults to 12, raised to leave room for one stabilization
    step above the default truncation when the weight gap is large.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    lam, nu, mu = Q(lam), Q(nu), Q(mu)
    delta = mu - lam - nu
    N0, D0 = default_truncation(lam, nu, mu)
    N = N0 if order is None else order
    D = D0 if xdeg is None else xdeg
    if max_order is None:
        max_order = max(12, N + 1)

    two = 2 * delta
    if shortcut and (two.denominator != 1 or two < -1):
        return H1Result(lam, nu, mu, mode, 0, "zero", True, N, D, shortcut=True)

    if mode == "classical":
        sectors = [0]
    elif parity == "even":
        sectors = [0]
    elif parity == "odd":
        sectors = [1]
    elif parity == "both" or not fast:
        sectors = [0, 1]
    else:
        sp = sector_parity(delta)
        sectors = [sp] if sp is not None else []
        if mode == "relative":
            sectors = [0, 1]

    def run(n, d, basis):
        res = {p: sector_h1((lam, nu, mu), mode, p, n, d, fast, basis) for p in sectors}
        return res

    history = []
    current = run(N, D, want_basis)
    history.append((N, D, sum(r.dim for r in current.values())))
    stabilized = not stabilize
    while stabilize:
        if N + 1 > max_order or D + 1 > max_xdeg:
            break
        nxt = run(N + 1, D + 1, False)
        total = sum(r.dim for r in nxt.values())
        history.append((N + 1, D + 1, total))
        if total == history[-2][2]:
            stabilized = True
            break
        N, D = N + 1, D + 1
        current = run(N, D, want_basis)
        history[-1] = (N, D, sum(r.dim for r in current.values()))

    dim = sum(r.dim for r in current.values())
    nonzero = [p for p, r in current.items() if r.dim]
    if not nonzero:
        ptag = "zero"
    elif len(nonzero) == 1:
        ptag = "even" if nonzero[0] == 0 else "odd"
    else:
        ptag = "mixed"
    basis = [c for p in sorted(current) for c in current[p].basis]
    return H1Result(lam, nu, mu, mode, dim, ptag, stabilized, N, D, basis,
                    False, history, {p: r.dim for p, r in current.items()})


def dim_h1_relative(lam, nu, mu, **opts) -> int:
    """H^1(osp(1|2), sl(2); D): cocycles vanishing on sl(2) modulo d(invariants)."""
    return dim_h1(lam, nu, mu, mode="relative", **opts).dim


# ------------------------------------------------------------- triviality

@dataclass
class TrivialityResult:
    trivial: bool
    witness: BilinearOperator | None


def solve_coboundary(c: Cochain1, extra_order: int = 1, extra_xdeg: int = 2):
    """Find v with delta0(v) == c inside a box around c's support, or None."""
    ctx = c.ctx
    classical = ctx.classical
    gens = algebra_generators(c.mode)
    all_keys = [k for v in c.values.values() for k in v]
    if not all_keys:
        return BilinearOperator(ctx, {})
    deg = max(k[0] for k in all_keys) + extra_xdeg
    order = max(math.ceil(key_order(k)) for k in all_keys) + extra_order
    weights = cochain_weights(c)
    cand = [k for k in iter_keys(c.parity, deg, order, classical)
            if weight_of_key(k, ctx.delta) in weights]
    if c.mode == "relative":
        cand_vecs = _invariant_elements(cand, ctx.weights, c.parity)
    else:
        cand_vecs = [{k: Fraction(1)} for k in cand]
    coord = _Index()
    cols = []
    for v in cand_vecs:
        img = delta0_raw(v, c.parity, ctx.weights, gens, classical)
        cols.append({coord[(g, k)]: x for g, vv in img.items() for k, x in vv.items()})
    target = {coord[(g, k)]: x for g, vv in c.values.items() for k, x in vv.items()}
    sol = solve(cols, target)
    if sol is None:
        return None
    w: dict = {}
    for j, a in sol.items():
        for k, x in cand_vecs[j].items():
            _add_into(w, k, a * x)
    wctx = OperatorContext(ctx.lam, ctx.nu, ctx.mu, order, deg, classical)
    return BilinearOperator(wctx, w, c.parity)


def is_trivial(c: Cochain1, check: bool = True) -> TrivialityResult:
    if check and not is_cocycle(c):
        raise NotACocycle("delta1(c) != 0")
    w = solve_coboundary(c)
    if w is None:
        # a witness, when one exists, never needs more than this headroom
        w = solve_coboundary(c, extra_order=2, extra_xdeg=3)
    return TrivialityResult(w is not None, w)


def independent_classes(cocycles: Sequence[Cochain1], extra_order: int = 1,
                        extra_xdeg: int = 2) -> int:
    """Number of cocycles independent modulo coboundaries."""
    if not cocycles:
        return 0
    c0 = cocycles[0]
    ctx, mode, parity = c0.ctx, c0.mode, c0.parity
    classical = ctx.classical
    gens = algebra_generators(mode)
    all_keys = [k for c in cocycles for v in c.values.values() for k in v]
    if not all_keys:
        return 0
    deg = max(k[0] for k in all_keys) + extra_xdeg
    order = max(math.ceil(key_order(k)) for k in all_keys) + extra_order
    weights = set().union(*(cochain_weights(c) for c in cocycles))
    cand = [k for k in iter_keys(parity, deg, order, classical)
            if weight_of_key(k, ctx.delta) in weights]
    vecs = [{k: Fraction(1)} for k in cand] if mode != "relative" else \
        _invariant_elements(cand, ctx.weights, parity)
    coord = _Index()
    E = Echelon()
    for v in vecs:
        img = delta0_raw(v, parity, ctx.weights, gens, classical)
        E.add({coord[(g, k)]: x for g, vv in img.items() for k, x in vv.items()})
    before = E.rank()
    for c in cocycles:
        E.add({coord[(g, k)]: x for g, vv in c.values.items() for k, x in vv.items()})
    return E.rank() - before
