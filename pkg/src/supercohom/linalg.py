"""Exact sparse linear algebra over the rationals.

Vectors are ``{index: Fraction}`` dicts with integer indices.  The workhorse
is :class:`Echelon`, an incrementally built echelon basis whose pivots are the
smallest indices of their vectors.  Reduction only ever introduces larger
indices, so a min-heap walk reduces a vector completely in one pass.

Everything is deterministic: the result depends only on the order in which
vectors are inserted.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Iterable, Sequence

Vector = dict


def _axpy(y: dict, a, x: dict) -> None:
    """y += a * x in place, dropping zeros."""
    for k, v in x.items():
        s = y.get(k, 0) + a * v
        if s:
            y[k] = s
        else:
            y.pop(k, None)


class Echelon:
    """Echelon basis with optional bookkeeping of insertion combinations.

    With ``track=True`` every stored row remembers which inserted vectors it
    is made of, so a vector that reduces to zero yields a linear relation
    among the inputs (a nullspace vector of the matrix whose columns are the
    inserted vectors).
    """

    def __init__(self, track: bool = False):
        self.rows: dict[int, dict] = {}
        self.combos: dict[int, dict] = {}
        self.track = track

    def __len__(self):
        return len(self.rows)

    def reduce(self, v: dict, combo: dict | None = None) -> tuple[dict, dict | None]:
        v = dict(v)
        heap = list(v)
        heapq.heapify(heap)
        seen = set()
        while heap:
            k = heapq.heappop(heap)
            if k in seen:
                continue
            seen.add(k)
            c = v.get(k)
            if not c or k not in self.rows:
                continue
            row = self.rows[k]
            _axpy(v, -c, row)
            if combo is not None:
                _axpy(combo, -c, self.combos[k])
            for kk in row:
                if kk not in seen:
                    heapq.heappush(heap, kk)
        return v, combo

    def add(self, v: dict, label=None) -> dict | None:
        """Insert ``v``.  Returns the relation found if ``v`` was dependent
        (only when tracking), else None."""
        combo = {label: Fraction(1)} if self.track else None
        r, combo = self.reduce(v, combo)
        if not r:
            return combo if self.track else None
        p = min(r)
        inv = 1 / Fraction(r[p])
        r = {k: c * inv for k, c in r.items()}
        self.rows[p] = r
        if self.track:
            self.combos[p] = {k: c * inv for k, c in combo.items()}
        return None

    def contains(self, v: dict) -> bool:
        r, _ = self.reduce(v)
        return not r

    def rank(self) -> int:
        return len(self.rows)


def rank(vectors: Iterable[dict]) -> int:
    E = Echelon()
    for v in vectors:
        E.add(v)
    return E.rank()


def nullspace(columns: Sequence[dict]) -> list[dict]:
    """Basis of ``{c : sum_j c_j columns[j] = 0}`` as dicts over column indices."""
    E = Echelon(track=True)
    out = []
    for j, col in enumerate(columns):
        rel = E.add(col, label=j)
        if rel is not None:
            out.append(rel)
    return out


def combine(columns: Sequence[dict], coeffs: dict) -> dict:
    out: dict = {}
    for j, c in coeffs.items():
        _axpy(out, c, columns[j])
    return out


def intersect_with_coordinate_subspace(columns: Sequence[dict], inside) -> list[dict]:
    """Spanning set of ``span(columns)`` intersected with the coordinate
    subspace of indices satisfying ``inside(index)``."""
    outside = [{k: c for k, c in col.items() if not inside(k)} for col in columns]
    rels = nullspace(outside)
    return [combine(columns, r) for r in rels]


def extend_basis(base: Iterable[dict], candidates: Sequence[dict]) -> list[int]:
    """Indices of ``candidates`` that extend ``span(base)``, chosen greedily."""
    E = Echelon()
    for v in base:
        E.add(v)
    picked = []
    for n, v in enumerate(candidates):
        before = E.rank()
        E.add(v)
        if E.rank() > before:
            picked.append(n)
    return picked


def solve(columns: Sequence[dict], rhs: dict) -> dict | None:
    """One solution c of ``sum_j c_j columns[j] = rhs`` (free variables zero)."""
    E = Echelon(track=True)
    for j, col in enumerate(columns):
        E.add(col, label=j)
    r, combo = E.reduce(rhs, {})
    if r:
        return None
    return {j: -c for j, c in combo.items() if c}
