"""Polynomial superfunctions on the superline R^{1|1}.

A superfunction is ``F = f0(x) + f1(x)*theta`` with ``theta**2 == 0``.  Only
polynomial coefficients are modelled; every operator used elsewhere in the
package is polynomial-differential, so this is exact for our purposes.

All scalars are :class:`fractions.Fraction`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Scalar = Union[int, Fraction]


def Q(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def fmt_q(q: Fraction) -> str:
    """Render a rational as ``"p"`` or ``"p/q"``."""
    q = Q(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class ParityError(ValueError):
    """Raised when a parity-sensitive operation receives a mixed element."""


@dataclass(frozen=True)
class Poly:
    """Univariate polynomial in x with Fraction coefficients, lowest degree first."""

    coeffs: tuple = ()

    def __post_init__(self):
        c = [Q(a) for a in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def monomial(cls, deg: int, coeff: Scalar = 1) -> "Poly":
        return cls((0,) * deg + (coeff,))

    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls((c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "Poly":
        return Poly(tuple(-a for a in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = Q(other)
            return Poly(tuple(c * a for a in self.coeffs))
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def deriv(self, n: int = 1) -> "Poly":
        c = self.coeffs
        for _ in range(n):
            c = tuple(k * c[k] for k in range(1, len(c)))
        return Poly(c)

    def __call__(self, x: Scalar) -> Fraction:
        acc = Fraction(0)
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc


ZERO_POLY = Poly()


@dataclass(frozen=True)
class SuperFunction:
    """``even + odd*theta``; both parts are :class:`Poly`."""

    even: Poly = ZERO_POLY
    odd: Poly = ZERO_POLY

    @classmethod
    def from_parts(cls, even: Iterable = (), odd: Iterable = ()) -> "SuperFunction":
        return cls(Poly(tuple(even)), Poly(tuple(odd)))

    @classmethod
    def monomial(cls, xdeg: int, thdeg: int, coeff: Scalar = 1) -> "SuperFunction":
        p = Poly.monomial(xdeg, coeff)
        return cls(p, ZERO_POLY) if thdeg == 0 else cls(ZERO_POLY, p)

    def is_zero(self) -> bool:
        return self.even.is_zero() and self.odd.is_zero()

    def parity(self) -> int:
        """0 for even, 1 for odd; zero counts as even. Mixed input raises."""
        if not self.odd:
            return 0
        if not self.even:
            return 1
        raise ParityError(f"mixed-parity superfunction {self}")

    def split(self) -> tuple["SuperFunction", "SuperFunction"]:
        return SuperFunction(self.even), SuperFunction(ZERO_POLY, self.odd)

    def __add__(self, other: "SuperFunction") -> "SuperFunction":
        return SuperFunction(self.even + other.even, self.odd + other.odd)

    def __neg__(self) -> "SuperFunction":
        return SuperFunction(-self.even, -self.odd)

    def __sub__(self, other: "SuperFunction") -> "SuperFunction":
        return self + (-other)

    def __mul__(self, other) -> "SuperFunction":
        if not isinstance(other, SuperFunction):
            c = Q(other)
            return SuperFunction(self.even * c, self.odd * c)
        # theta**2 = 0; a single odd generator makes the product commutative
        return SuperFunction(self.even * other.even,
                             self.even * other.odd + self.odd * other.even)

    __rmul__ = __mul__

    def dx(self, n: int = 1) -> "SuperFunction":
        return SuperFunction(self.even.deriv(n), self.odd.deriv(n))

    def dtheta(self) -> "SuperFunction":
        return SuperFunction(self.odd, ZERO_POLY)

    def times_theta(self) -> "SuperFunction":
        return SuperFunction(ZERO_POLY, self.even)

    def __str__(self):
        return format_superfunction(self)

    def __repr__(self):
        return f"SuperFunction({format_superfunction(self)!r})"


X = SuperFunction(Poly.monomial(1))
THETA = SuperFunction(ZERO_POLY, Poly.const(1))
ONE = SuperFunction(Poly.const(1))


def eta(F: SuperFunction) -> SuperFunction:
    """d/dtheta + theta d/dx."""
    return F.dtheta() + F.dx().times_theta()


def eta_bar(F: SuperFunction) -> SuperFunction:
    """d/dtheta - theta d/dx."""
    return F.dtheta() - F.dx().times_theta()


def contact_bracket(F: SuperFunction, G: SuperFunction) -> SuperFunction:
    """{F, G} = F G' - F' G + 1/2 eta(F) eta_bar(G), extended bilinearly."""
    return F * G.dx() - F.dx() * G + eta(F) * eta_bar(G) * Fraction(1, 2)


# ---------------------------------------------------------------- text I/O

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(theta)|(x)|(\^)|(\*)|(\+)|(-)|(\()|(\)))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.strip()
    kinds = ("num", "theta", "x", "^", "*", "+", "-", "(", ")")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected input at {text[pos:]!r}")
        for kind, val in zip(kinds, m.groups()):
            if val is not None:
                out.append((kind, val))
                break
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, kind=None):
        if self.i >= len(self.toks):
            raise ValueError("unexpected end of input")
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ValueError(f"expected {kind}, got {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self) -> SuperFunction:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term() * sign
        while self.peek() in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
            acc = acc + self.term() * sign
        return acc

    def term(self) -> SuperFunction:
        acc = self.power()
        while self.peek() == "*":
            self.take()
            acc = acc * self.power()
        return acc

    def power(self) -> SuperFunction:
        base = self.atom()
        if self.peek() == "^":
            self.take()
            n = int(self.take("num")[1])
            out = ONE
            for _ in range(n):
                out = out * base
            return out
        return base

    def atom(self) -> SuperFunction:
        kind, val = self.take()
        if kind == "num":
            return ONE * Fraction(val)
        if kind == "x":
            return X
        if kind == "theta":
            return THETA
        if kind == "(":
            inner = self.expr()
            self.take(")")
            return inner
        if kind == "-":
            return -self.atom()
        raise ValueError(f"unexpected token {val!r}")


def parse_superfunction(text: str) -> SuperFunction:
    """Parse expressions such as ``"3/2*x*theta"`` or ``"x + 2*theta"``."""
    p = _Parser(_tokenize(text))
    out = p.expr()
    if p.i != len(p.toks):
        raise ValueError(f"trailing input in {text!r}")
    return out


def format_superfunction(F: SuperFunction) -> str:
    """Deterministic printer; terms sorted by x-degree then theta-degree."""
    terms = []
    for deg in range(max(len(F.even.coeffs), len(F.odd.coeffs))):
        for th, poly in ((0, F.even), (1, F.odd)):
            if deg < len(poly.coeffs) and poly.coeffs[deg]:
                terms.append((poly.coeffs[deg], deg, th))
    if not terms:
        return "0"
    out = ""
    for n, (c, deg, th) in enumerate(terms):
        factors = []
        if deg == 1:
            factors.append("x")
        elif deg > 1:
            factors.append(f"x^{deg}")
        if th:
            factors.append("theta")
        mag = abs(c)
        if mag != 1 or not factors:
            factors.insert(0, fmt_q(mag))
        body = "*".join(factors)
        if n == 0:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out
