"""Sparse operators on the lattice Hilbert space and verification reports.

Operators are defined column by column on basis sites of the infinite
lattice, so there is no truncation error: a "window" only chooses which
basis vectors a check is evaluated on.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .exact import Number


class Site:
    """Basis vector ``e_{mu, parity}``; parity is +1 or -1."""

    __slots__ = ("mu", "parity", "_hash")

    def __init__(self, mu: tuple[Fraction, Fraction, Fraction], parity: int):
        self.mu = mu
        self.parity = parity
        # Fraction.__hash__ is slow; sites are dict keys everywhere
        self._hash = hash(tuple((m.numerator, m.denominator) for m in mu) + (parity,))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if not isinstance(other, Site):
            return NotImplemented
        return self._hash == other._hash and self.parity == other.parity and self.mu == other.mu

    def __iter__(self):
        return iter((self.mu, self.parity))

    def __repr__(self) -> str:
        return f"Site({self.mu!r}, {self.parity})"

    def __str__(self) -> str:
        mu = ",".join(str(m) for m in self.mu)
        return f"({mu};{'+' if self.parity > 0 else '-'})"


Vector = dict  # Site -> Number


def basis(site: Site) -> Vector:
    return {site: Number.of(1)}


def add_into(out: Vector, site: Site, value: Number) -> None:
    prev = out.get(site)
    out[site] = value if prev is None else prev + value


def prune(vec: Vector) -> Vector:
    return {s: c for s, c in vec.items() if not c.is_zero()}


def is_zero_vector(vec: Vector) -> bool:
    return all(c.is_zero() for c in vec.values())


def inner(u: Vector, v: Vector) -> Number:
    """Hilbert inner product, conjugate-linear in the first slot."""
    out = Number()
    for s, c in u.items():
        d = v.get(s)
        if d is not None:
            out = out + c.conjugate() * d
    return out


def vectors_equal(u: Vector, v: Vector) -> bool:
    for s in set(u) | set(v):
        if not (u.get(s, Number()) - v.get(s, Number())).is_zero():
            return False
    return True


class Operator:
    """Linear or antilinear operator given by its action on basis sites."""

    def __init__(self, column: Callable[[Site], Vector], antilinear: bool = False, name: str = ""):
        self._column = column
        self.antilinear = antilinear
        self.name = name

    def column(self, site: Site) -> Vector:
        return self._column(site)

    def __call__(self, vec: Vector) -> Vector:
        out: Vector = {}
        for site, c in vec.items():
            if self.antilinear:
                c = c.conjugate()
            for target, d in self._column(site).items():
                add_into(out, target, c * d)
        return out

    def __matmul__(self, other: "Operator") -> "Operator":
        return Product([self, other])

    def __sub__(self, other: "Operator") -> "Operator":
        return Combination([(Number.of(1), self), (Number.of(-1), other)])

    def __add__(self, other: "Operator") -> "Operator":
        return Combination([(Number.of(1), self), (Number.of(1), other)])

    def __rmul__(self, scalar) -> "Operator":
        return Combination([(Number.of(scalar), self)])

    def power(self, n: int) -> "Operator":
        return Product([self] * n) if n else IDENTITY

    def __repr__(self) -> str:
        return f"Operator({self.name or '?'})"


class Product(Operator):
    """Composition; the rightmost factor acts first."""

    def __init__(self, factors: Sequence[Operator]):
        self.factors = list(factors)
        anti = sum(f.antilinear for f in self.factors) % 2 == 1
        super().__init__(self._col, antilinear=anti, name="·".join(f.name for f in self.factors))

    def _col(self, site: Site) -> Vector:
        # column of the composite: linear/antilinear bookkeeping happens in __call__
        vec: Vector = {site: Number.of(1)}
        for f in reversed(self.factors):
            vec = f(vec)
        return vec

    def __call__(self, vec: Vector) -> Vector:
        for f in reversed(self.factors):
            vec = f(vec)
        return vec


class Combination(Operator):
    """Finite sum ``sum_i c_i A_i``; scalars multiply from the left."""

    def __init__(self, terms: Iterable[tuple[Number, Operator]]):
        self.terms = list(terms)
        kinds = {op.antilinear for _, op in self.terms}
        if len(kinds) > 1:
            raise ValueError("cannot add linear and antilinear operators")
        super().__init__(self._col, antilinear=kinds.pop() if kinds else False,
                         name="+".join(op.name for _, op in self.terms))

    def _col(self, site: Site) -> Vector:
        return self({site: Number.of(1)})

    def __call__(self, vec: Vector) -> Vector:
        out: Vector = {}
        for coeff, op in self.terms:
            for s, c in op(vec).items():
                add_into(out, s, coeff * c)
        return out


IDENTITY = Operator(lambda site: {site: Number.of(1)}, name="1")


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


# --- reports ------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


@dataclass
class Report:
    """Outcome of a batch of exact checks."""

    title: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "", seconds: float = 0.0) -> Check:
        check = Check(name, passed, detail, seconds)
        self.checks.append(check)
        return check

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.detail, c.seconds))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def first_failure(self) -> Check | None:
        fails = self.failures()
        return fails[0] if fails else None

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def check_zero_on(report: Report, name: str, op: Operator, sites: Iterable[Site]) -> bool:
    """Record whether ``op`` annihilates every basis vector in ``sites``."""
    t0 = time.perf_counter()
    for site in sites:
        if not is_zero_vector(op(basis(site))):
            report.add(name, False, f"nonzero at {site}", time.perf_counter() - t0)
            return False
    report.add(name, True, "", time.perf_counter() - t0)
    return True
