"""Exact scalars: unit phases and linear combinations of them.

A phase is ``exp(2*pi*i*a + i*pi*theta*b)`` with rational ``a`` (taken mod 1)
and rational ``b``.  ``theta`` is never given a numeric value; since it is
irrational, phases with different ``b`` are linearly independent over the
cyclotomic numbers, and the roots of unity attached to one ``b`` are compared
after reduction modulo the relevant cyclotomic polynomial.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

from gmpy2 import mpq

Rational = Union[int, Fraction]

# Value used when a phase has to be turned into a complex float.  Only for
# diagnostics and for deciding the sign of an exactly real number.
THETA_NUMERIC = (math.sqrt(5) - 1) / 2


class ExactPhase:
    """Unit complex number ``exp(2*pi*i*a) * exp(i*pi*theta*b)``."""

    # stored as reduced integer pairs: a = an/ad in [0, 1), b = bn/bd
    __slots__ = ("an", "ad", "bn", "bd", "_hash")

    def __init__(self, a: Rational = 0, b: Rational = 0):
        if isinstance(a, int):
            an, ad = 0, 1
        else:
            an, ad = a.numerator, a.denominator
            an %= ad
        if isinstance(b, int):
            bn, bd = b, 1
        else:
            bn, bd = b.numerator, b.denominator
        self._set(an, ad, bn, bd)

    def _set(self, an, ad, bn, bd):
        self.an, self.ad, self.bn, self.bd = an, ad, bn, bd
        self._hash = hash((an, ad, bn, bd))

    @classmethod
    def _raw(cls, an: int, ad: int, bn: int, bd: int) -> "ExactPhase":
        g = math.gcd(an, ad)
        if g != 1:
            an //= g
            ad //= g
        an %= ad
        g = math.gcd(bn, bd)
        if g != 1:
            bn //= g
            bd //= g
        obj = object.__new__(cls)
        obj._set(an, ad, bn, bd)
        return obj

    @property
    def a(self) -> Fraction:
        return Fraction(self.an, self.ad, _normalize=False)

    @property
    def b(self) -> Fraction:
        return Fraction(self.bn, self.bd, _normalize=False)

    @classmethod
    def turn(cls, a: Rational) -> "ExactPhase":
        return cls(a, 0)

    @classmethod
    def theta(cls, b: Rational) -> "ExactPhase":
        return cls(0, b)

    def __mul__(self, other: "ExactPhase") -> "ExactPhase":
        if not isinstance(other, ExactPhase):
            return NotImplemented
        if other.an == 0 and other.bn == 0:
            return self
        if self.an == 0 and self.bn == 0:
            return other
        return ExactPhase._raw(self.an * other.ad + other.an * self.ad, self.ad * other.ad,
                               self.bn * other.bd + other.bn * self.bd, self.bd * other.bd)

    def __truediv__(self, other: "ExactPhase") -> "ExactPhase":
        return self * other.conjugate()

    def __pow__(self, n: int) -> "ExactPhase":
        return ExactPhase._raw(self.an * n, self.ad, self.bn * n, self.bd)

    def conjugate(self) -> "ExactPhase":
        return ExactPhase._raw(-self.an, self.ad, -self.bn, self.bd)

    def is_one(self) -> bool:
        return self.an == 0 and self.bn == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, ExactPhase):
            return (self.an == other.an and self.ad == other.ad
                    and self.bn == other.bn and self.bd == other.bd)
        return NotImplemented

    def __hash__(self) -> int:
        return self._hash

    def __complex__(self) -> complex:
        return self.evaluate()

    def evaluate(self, theta: float = THETA_NUMERIC) -> complex:
        return cmath.exp(2j * math.pi * self.an / self.ad + 1j * math.pi * theta * self.bn / self.bd)

    def __repr__(self) -> str:
        return f"ExactPhase(a={self.a}, b={self.b})"

    def __str__(self) -> str:
        parts = []
        if self.an:
            parts.append(f"e^(2πi·{self.a})")
        if self.bn:
            parts.append(f"e^(iπθ·{self.b})")
        return "·".join(parts) or "1"


ONE_PHASE = ExactPhase()

_SCALARS = (int, Fraction, type(mpq()))
_ZERO = mpq(0)
_ONE = mpq(1)


# --- cyclotomic reduction ---------------------------------------------------

def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # integer polynomials, lowest degree first, den monic
    num = list(num)
    dq = len(den) - 1
    if len(num) - 1 < dq:
        return [0], num
    quot = [0] * (len(num) - dq)
    for i in range(len(num) - 1, dq - 1, -1):
        c = num[i]
        if c:
            quot[i - dq] = c
            for j, d in enumerate(den):
                num[i - dq + j] -= c * d
    return quot, num[:dq]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (lowest degree first) of the n-th cyclotomic polynomial."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
            assert not any(rem)
    return tuple(poly)


def _reduce_mod_cyclotomic(coeffs: list[Fraction], n: int) -> list[Fraction]:
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    coeffs = list(coeffs)
    for i in range(len(coeffs) - 1, deg - 1, -1):
        c = coeffs[i]
        if c:
            for j, d in enumerate(phi):
                if d:
                    coeffs[i - deg + j] -= c * d
    return coeffs[:deg]


def _units(n: int) -> list[int]:
    return [j for j in range(1, n + 1) if math.gcd(j, n) == 1]


# --- exact numbers ----------------------------------------------------------

class Number:
    """Finite rational linear combination of :class:`ExactPhase` values.

    Instances are immutable.  Equality is exact and semantic, so numbers are
    unhashable.
    """

    __slots__ = ("terms", "_zero")

    def __init__(self, terms: dict[ExactPhase, Rational] | None = None):
        # coefficients are kept as gmpy2 rationals once they pass through arithmetic
        self.terms = {p: c for p, c in (terms or {}).items() if c}
        self._zero: bool | None = None if self.terms else True

    @classmethod
    def of(cls, value: Union["Number", ExactPhase, Rational]) -> "Number":
        if isinstance(value, Number):
            return value
        if isinstance(value, ExactPhase):
            return cls({value: _ONE})
        return cls({ONE_PHASE: mpq(value)})

    @classmethod
    def root_of_unity(cls, a: Rational, coeff: Rational = 1) -> "Number":
        return cls({ExactPhase(a): mpq(coeff)})

    # arithmetic

    def __add__(self, other) -> "Number":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if not other.terms:
            return self
        terms = dict(self.terms)
        for p, c in other.terms.items():
            terms[p] = terms.get(p, 0) + c
        return Number(terms)

    __radd__ = __add__

    def __neg__(self) -> "Number":
        return Number({p: -c for p, c in self.terms.items()})

    def __sub__(self, other) -> "Number":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Number":
        return (-self) + other

    def __mul__(self, other) -> "Number":
        if isinstance(other, _SCALARS):
            return Number({p: c * other for p, c in self.terms.items()})
        if isinstance(other, ExactPhase):
            return Number({p * other: c for p, c in self.terms.items()})
        if not isinstance(other, Number):
            return NotImplemented
        # a single term multiplies by one phase, which permutes the terms
        if len(other.terms) == 1 or len(self.terms) == 1:
            big, small = (self, other) if len(other.terms) == 1 else (other, self)
            (q, d), = small.terms.items()
            if q.is_one():
                return big if d == 1 else Number({p: c * d for p, c in big.terms.items()})
            return Number({p * q: c * d for p, c in big.terms.items()})
        terms: dict[ExactPhase, Fraction] = {}
        for p, c in self.terms.items():
            for q, d in other.terms.items():
                r = p * q
                terms[r] = terms.get(r, 0) + c * d
        return Number(terms)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Number":
        if isinstance(other, _SCALARS):
            other = mpq(other)
            return Number({p: c / other for p, c in self.terms.items()})
        return self * _coerce(other).inverse()

    def __rtruediv__(self, other) -> "Number":
        return _coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "Number":
        if n < 0:
            return self.inverse() ** (-n)
        out = Number.of(1)
        for _ in range(n):
            out = out * self
        return out

    def conjugate(self) -> "Number":
        return Number({p.conjugate(): c for p, c in self.terms.items()})

    def abs2(self) -> "Number":
        return self * self.conjugate()

    # exact comparison

    def _groups(self) -> dict[tuple[int, int], dict[tuple[int, int], Rational]]:
        # θ-degree (bn, bd) -> {turn (an, ad): coefficient}
        groups: dict = {}
        for p, c in self.terms.items():
            groups.setdefault((p.bn, p.bd), {})[(p.an, p.ad)] = c
        return groups

    @staticmethod
    def _reduced(group) -> tuple[int, list]:
        n = 1
        for _, ad in group:
            n = n * ad // math.gcd(n, ad)
        coeffs = [_ZERO] * n
        for (an, ad), c in group.items():
            coeffs[an * (n // ad)] += c
        return n, _reduce_mod_cyclotomic(coeffs, n)

    def is_zero(self) -> bool:
        if self._zero is None:
            zero = True
            for group in self._groups().values():
                if len(group) == 1:
                    zero = False
                    break
                _, red = self._reduced(group)
                if any(red):
                    zero = False
                    break
            self._zero = zero
        return self._zero

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def theta_degrees(self) -> set[Fraction]:
        """θ-coefficients present after exact cancellation."""
        out = set()
        for (bn, bd), group in self._groups().items():
            if len(group) == 1 or any(self._reduced(group)[1]):
                out.add(Fraction(bn, bd))
        return out

    def is_rational(self) -> bool:
        try:
            self.to_rational()
        except ValueError:
            return False
        return True

    def to_rational(self) -> Fraction:
        groups = self._groups()
        value = _ZERO
        for (bn, _), group in groups.items():
            _, red = self._reduced(group)
            if bn != 0:
                if any(red):
                    raise ValueError(f"{self!r} is not rational")
                continue
            if any(red[1:]):
                raise ValueError(f"{self!r} is not rational")
            value += red[0] if red else 0
        return Fraction(int(value.numerator), int(value.denominator))

    def inverse(self) -> "Number":
        """Multiplicative inverse via the norm over the cyclotomic field."""
        groups = self._groups()
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        live = [b for b in groups if len(groups[b]) == 1 or any(self._reduced(groups[b])[1])]
        if len(live) != 1:
            raise ValueError("only single θ-degree numbers are invertible")
        bn, bd = live[0]
        group = groups[(bn, bd)]
        if len(group) == 1:
            ((an, ad), c), = group.items()
            return Number({ExactPhase._raw(-an, ad, -bn, bd): 1 / mpq(c)})
        n = 1
        for _, ad in group:
            n = n * ad // math.gcd(n, ad)
        base = Number({ExactPhase._raw(an, ad, 0, 1): c for (an, ad), c in group.items()})
        cofactor = Number.of(1)
        for j in _units(n):
            if j % n == 1 % n:
                continue
            cofactor = cofactor * Number({ExactPhase._raw(an * j, ad, 0, 1): c
                                          for (an, ad), c in group.items()})
        norm = (base * cofactor).to_rational()
        return cofactor * ExactPhase._raw(0, 1, -bn, bd) / norm

    # numerics and display

    def evaluate(self, theta: float = THETA_NUMERIC) -> complex:
        return sum((float(c) * p.evaluate(theta) for p, c in self.terms.items()), 0j)

    def __complex__(self) -> complex:
        return self.evaluate()

    def real_sign(self) -> int:
        """Sign of a number known to be real and nonzero-or-zero exactly."""
        if self.is_zero():
            return 0
        value = self.evaluate()
        if abs(value.imag) > 1e-9 * max(1.0, abs(value)):
            raise ValueError(f"{self!r} is not real")
        return 1 if value.real > 0 else -1

    def __repr__(self) -> str:
        if not self.terms:
            return "Number(0)"
        body = " + ".join(f"{format_fraction(c)}·{p}" for p, c in sorted(
            self.terms.items(), key=lambda t: (t[0].b, t[0].a)))
        return f"Number({body})"


def _coerce(value) -> Number | None:
    if isinstance(value, Number):
        return value
    if isinstance(value, (*_SCALARS, ExactPhase)):
        return Number.of(value)
    return None


ZERO = Number()
ONE = Number.of(1)
I = Number.root_of_unity(Fraction(1, 4))


def as_fraction(value: Union[str, Rational]) -> Fraction:
    """Parse ``"p/q"``, integers or fractions into a :class:`Fraction`."""
    return Fraction(value)


def format_fraction(value: Rational) -> str:
    value = Fraction(int(value.numerator), int(value.denominator))
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


# --- square roots of rationals -----------------------------------------------

def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _sqrt_prime(p: int) -> Number:
    if p == 2:
        return Number({ExactPhase(Fraction(1, 8)): Fraction(1), ExactPhase(Fraction(-1, 8)): Fraction(1)})
    # quadratic Gauss sum: sqrt(p) for p = 1 mod 4, i*sqrt(p) for p = 3 mod 4
    gauss = Number({ExactPhase(Fraction(a, p)): Fraction(1 if pow(a, (p - 1) // 2, p) == 1 else -1)
                    for a in range(1, p)})
    return gauss if p % 4 == 1 else gauss * ExactPhase(Fraction(-1, 4))


def sqrt_rational(q: Rational) -> Number:
    """Exact principal square root of a rational as a cyclotomic number."""
    q = Fraction(q)
    if q == 0:
        return ZERO
    radicand = abs(q.numerator) * q.denominator
    square, free = 1, 1
    for p, e in _factor(radicand).items():
        square *= p ** (e // 2)
        if e % 2:
            free *= p
    out = Number.of(Fraction(square, q.denominator))
    for p in _factor(free):
        out = out * _sqrt_prime(p)
    if q < 0:
        out = out * I
    return out


def product(values: Iterable[Number]) -> Number:
    out = ONE
    for v in values:
        out = out * v
    return out
