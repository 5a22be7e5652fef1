"""Contact vector fields, the osp(1|2) basis, and weighted densities.

The generator order ``X_1, X_x, X_{x^2}, X_theta, X_{x theta}`` is fixed
globally; every matrix in the package is indexed against it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .superfield import (
    ONE, THETA, X, ParityError, Q, SuperFunction, contact_bracket, eta,
    eta_bar, format_superfunction, fmt_q,
)


@dataclass(frozen=True)
class ContactField:
    """The contact vector field X_H = H d/dx + 1/2 eta(H) eta_bar."""

    hamiltonian: SuperFunction

    @property
    def parity(self) -> int:
        return self.hamiltonian.parity()

    def __call__(self, F: SuperFunction) -> SuperFunction:
        H = self.hamiltonian
        return H * F.dx() + eta(H) * eta_bar(F) * Fraction(1, 2)

    def __str__(self):
        return f"X[{format_superfunction(self.hamiltonian)}]"


def bracket(X1: ContactField, X2: ContactField) -> ContactField:
    return ContactField(contact_bracket(X1.hamiltonian, X2.hamiltonian))


# (name, x-degree, theta-degree)
GENERATORS = (("1", 0, 0), ("x", 1, 0), ("x2", 2, 0), ("theta", 0, 1), ("xtheta", 1, 1))
GEN_NAMES = tuple(g[0] for g in GENERATORS)
LATEX_NAMES = ("X_1", "X_x", "X_{x^2}", "X_theta", "X_{x theta}")
SL2 = (0, 1, 2)
ODD = (3, 4)
OSP = (0, 1, 2, 3, 4)


def gen_parity(g: int) -> int:
    return GENERATORS[g][2]


def gen_hamiltonian(g: int) -> SuperFunction:
    _, a, b = GENERATORS[g]
    return SuperFunction.monomial(a, b)


def gen_field(g: int) -> ContactField:
    return ContactField(gen_hamiltonian(g))


def ad_weight(g: int) -> Fraction:
    """Eigenvalue of ad X_x on generator g: [X_x, X_g] = w X_g."""
    _, a, b = GENERATORS[g]
    return Fraction(2 * a + b - 2, 2)


def expand_in_basis(H: SuperFunction) -> dict[int, Fraction]:
    """Coordinates of X_H in the osp(1|2) basis; raises if X_H is outside it."""
    out = {}
    for g, (_, a, b) in enumerate(GENERATORS):
        poly = H.odd if b else H.even
        if a < len(poly.coeffs) and poly.coeffs[a]:
            out[g] = poly.coeffs[a]
    rebuilt = SuperFunction()
    for g, c in out.items():
        rebuilt = rebuilt + gen_hamiltonian(g) * c
    if rebuilt != H:
        raise ValueError(f"{format_superfunction(H)} is not in osp(1|2)")
    return out


def structure_constants() -> dict[tuple[int, int], dict[int, Fraction]]:
    """The 15 brackets [X_g, X_h], g <= h, expanded in the basis."""
    table = {}
    for g in OSP:
        for h in OSP:
            if g <= h:
                table[(g, h)] = expand_in_basis(
                    contact_bracket(gen_hamiltonian(g), gen_hamiltonian(h)))
    return table


_BRACKETS: dict[tuple[int, int], dict[int, Fraction]] = {}


def basis_bracket(g: int, h: int) -> dict[int, Fraction]:
    """[X_g, X_h] for any ordered pair (cached)."""
    if not _BRACKETS:
        for g1 in OSP:
            for h1 in OSP:
                _BRACKETS[(g1, h1)] = expand_in_basis(
                    contact_bracket(gen_hamiltonian(g1), gen_hamiltonian(h1)))
    return _BRACKETS[(g, h)]


# ---------------------------------------------------------------- densities

@dataclass(frozen=True)
class Density:
    """F alpha^weight."""

    value: SuperFunction
    weight: Fraction

    def __post_init__(self):
        object.__setattr__(self, "weight", Q(self.weight))

    def __str__(self):
        return f"({format_superfunction(self.value)})*alpha^{fmt_q(self.weight)}"


def lie_derivative_fn(X: ContactField, F: SuperFunction, weight) -> SuperFunction:
    """L^lambda_{X_H}(F) = X_H(F) + lambda H' F."""
    return X(F) + X.hamiltonian.dx() * F * Q(weight)


def lie_derivative(X: ContactField, d: Density) -> Density:
    return Density(lie_derivative_fn(X, d.value, d.weight), d.weight)


def lie_derivative_pair(X: ContactField, F: Density, G: Density):
    """Leibniz rule on F (x) G.

    Returns ``((LF, G), (F, LG))`` with the Koszul sign (-1)^{|X||F|} folded
    into the second leg's right factor.
    """
    pX = X.parity
    try:
        pF = F.value.parity()
    except ParityError:
        if not pX:
            pF = 0  # no sign needed for even fields
        else:
            raise
    first = (lie_derivative(X, F), G)
    LG = lie_derivative(X, G)
    if pX * pF:
        LG = Density(-LG.value, LG.weight)
    return first, (F, LG)


__all__ = [
    "ContactField", "Density", "GENERATORS", "GEN_NAMES", "LATEX_NAMES", "SL2",
    "ODD", "OSP", "ONE", "THETA", "X", "ad_weight", "basis_bracket", "bracket",
    "expand_in_basis", "gen_field", "gen_hamiltonian", "gen_parity",
    "lie_derivative", "lie_derivative_fn", "lie_derivative_pair",
    "structure_constants",
]
