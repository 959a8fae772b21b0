"""Polynomial algebra of the noncommutative 3-torus and its lattice representation.

Monomials are normalised as ``x^k = e^{i pi theta k2 k3} U^k1 V^k2 W^k3`` with
``WV = e^{2 pi i theta} VW`` and ``U`` central.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Tuple

from .exact import ExactPhase, Number
from .operators import Operator, Site

MonomialIndex = Tuple[int, int, int]

SUPPORTED_ORDERS = (2, 3, 4, 6)

# Action of the generator h on the (V, W) exponents, one matrix per group order.
A_MATRICES: dict[int, tuple[tuple[int, int], tuple[int, int]]] = {
    2: ((-1, 0), (0, -1)),
    3: ((-1, -1), (1, 0)),
    4: ((0, -1), (1, 0)),
    6: ((0, -1), (1, 1)),
}

HALF = Fraction(1, 2)


def _dot(a: int, b: int, x, y):
    # entries are 0 or ±1; avoid int*Fraction, which is slow
    if a == 0:
        return y if b == 1 else (-y if b == -1 else b * y)
    if b == 0:
        return x if a == 1 else (-x if a == -1 else a * x)
    return a * x + b * y


def apply_matrix(A, pair):
    (a, b), (c, d) = A
    x, y = pair
    return (_dot(a, b, x, y), _dot(c, d, x, y))


def a_matrix(N: int):
    if N not in A_MATRICES:
        raise ValueError(f"unsupported group order N={N}; expected one of {SUPPORTED_ORDERS}")
    return A_MATRICES[N]


@dataclass(frozen=True, order=True)
class SpinStructure:
    """Offsets ``(eps1, eps2, eps3)``, each 0 or 1/2."""

    eps1: Fraction = Fraction(0)
    eps2: Fraction = Fraction(0)
    eps3: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("eps1", "eps2", "eps3"):
            value = Fraction(getattr(self, name))
            if value not in (0, HALF):
                raise ValueError(f"{name} must be 0 or 1/2, got {value}")
            object.__setattr__(self, name, value)

    @property
    def eps(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.eps1, self.eps2, self.eps3)

    def contains(self, mu) -> bool:
        return all((Fraction(m) - e).denominator == 1 for m, e in zip(mu, self.eps))

    @classmethod
    def all(cls) -> list["SpinStructure"]:
        vals = (Fraction(0), HALF)
        return [cls(a, b, c) for a in vals for b in vals for c in vals]

    def __str__(self) -> str:
        return "(" + ",".join(str(e) for e in self.eps) + ")"


def lattice_site(mu, parity: int = 1, spin: Optional[SpinStructure] = None) -> Site:
    mu = tuple(Fraction(m) for m in mu)
    if spin is not None and not spin.contains(mu):
        raise ValueError(f"site {mu} is not on the lattice Z^3 + {spin}")
    if parity not in (1, -1):
        raise ValueError("parity must be +1 or -1")
    return Site(mu, parity)


def _theta_phase(b: Fraction, theta: Optional[Fraction]) -> ExactPhase:
    # theta=None keeps θ symbolic; a rational marker specialises e^{iπθb}
    if theta is None:
        return ExactPhase(0, b)
    return ExactPhase(b * Fraction(theta) / 2, 0)


def monomial_product(k: MonomialIndex, l: MonomialIndex) -> tuple[ExactPhase, MonomialIndex]:
    """``x^k x^l = phase * x^(k+l)``."""
    phase = ExactPhase(0, k[2] * l[1] - k[1] * l[2])
    return phase, (k[0] + l[0], k[1] + l[1], k[2] + l[2])


def represent(k: MonomialIndex, site: Site, theta: Optional[Fraction] = None) -> tuple[ExactPhase, Site]:
    """Image of ``e_mu`` under ``pi(x^k)``; the representation is diagonal in parity."""
    mu = site.mu
    b = k[2] * mu[1] - mu[2] * k[1]
    shifted = (mu[0] + k[0], mu[1] + k[1], mu[2] + k[2])
    return _theta_phase(b, theta), Site(shifted, site.parity)


def act_on_monomial(N: int, k: MonomialIndex) -> tuple[ExactPhase, MonomialIndex]:
    """``h |> x^k = e^{2 pi i k1/N} x^(k1, A(k2,k3))``."""
    A = a_matrix(N)
    k2, k3 = apply_matrix(A, (k[1], k[2]))
    return ExactPhase(Fraction(k[0], N), 0), (k[0], k2, k3)


class AlgebraElement:
    """Finite sum of monomials with exact coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[MonomialIndex, Number] | None = None):
        self.coeffs = {tuple(k): Number.of(c) for k, c in (coeffs or {}).items()
                       if not Number.of(c).is_zero()}

    @classmethod
    def monomial(cls, k: MonomialIndex, coeff=1) -> "AlgebraElement":
        return cls({tuple(k): Number.of(coeff)})

    @classmethod
    def identity(cls) -> "AlgebraElement":
        return cls.monomial((0, 0, 0))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return AlgebraElement(out)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + other.scale(-1)

    def scale(self, s) -> "AlgebraElement":
        return AlgebraElement({k: c * Number.of(s) for k, c in self.coeffs.items()})

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        out: dict[MonomialIndex, Number] = {}
        for k, c in self.coeffs.items():
            for l, d in other.coeffs.items():
                phase, m = monomial_product(k, l)
                term = c * d * phase
                out[m] = out[m] + term if m in out else term
        return AlgebraElement(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        return all((self.coeffs.get(k, Number()) - other.coeffs.get(k, Number())).is_zero()
                   for k in keys)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return "AlgebraElement(" + ", ".join(f"{k}: {c!r}" for k, c in sorted(self.coeffs.items())) + ")"


def algebra_act(N: int, elem: AlgebraElement) -> AlgebraElement:
    out: dict[MonomialIndex, Number] = {}
    for k, c in elem.coeffs.items():
        phase, m = act_on_monomial(N, k)
        out[m] = out[m] + c * phase if m in out else c * phase
    return AlgebraElement(out)


def average(N: int, elem: AlgebraElement) -> AlgebraElement:
    """``sum_j h^j |> elem``: an element of the fixed-point subalgebra (up to 1/N)."""
    total, cur = AlgebraElement(), elem
    for _ in range(N):
        total = total + cur
        cur = algebra_act(N, cur)
    return total


GENERATORS: dict[str, MonomialIndex] = {"U": (1, 0, 0), "V": (0, 1, 0), "W": (0, 0, 1)}


def monomial_operator(k: MonomialIndex, theta: Optional[Fraction] = None) -> Operator:
    def column(site: Site):
        phase, target = represent(k, site, theta)
        return {target: Number.of(phase)}
    return Operator(column, name=f"x^{tuple(k)}")


def pi_operator(elem: AlgebraElement, theta: Optional[Fraction] = None) -> Operator:
    """Bounded operator ``pi(elem)`` on both parity copies."""
    items = list(elem.coeffs.items())

    def column(site: Site):
        out = {}
        for k, c in items:
            phase, target = represent(k, site, theta)
            val = c * phase
            out[target] = out[target] + val if target in out else val
        return out
    return Operator(column, name="pi")
