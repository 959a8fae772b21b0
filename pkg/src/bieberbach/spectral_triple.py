"""The flat equivariant real spectral triple over the noncommutative 3-torus."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Union

from .exact import ExactPhase, Number, format_fraction, sqrt_rational
from .nc_torus import (GENERATORS, AlgebraElement, MonomialIndex, SpinStructure, a_matrix,
                       apply_matrix, monomial_operator, pi_operator, represent)
from .operators import (IDENTITY, Operator, Report, Site, basis, check_zero_on, commutator,
                        is_zero_vector)

# Turns whose cosine is rational; the only unit-modulus τ that are roots of unity here.
_RATIONAL_COS_TURNS = {
    Fraction(1, 4): Fraction(0), Fraction(-1, 4): Fraction(0),
    Fraction(1, 6): Fraction(1, 2), Fraction(-1, 6): Fraction(1, 2),
    Fraction(1, 3): Fraction(-1, 2), Fraction(-1, 3): Fraction(-1, 2),
}


@dataclass(frozen=True)
class Tau:
    """Conformal parameter stored as (Re τ, |τ|², sign Im τ)."""

    re: Fraction
    abs_sq: Fraction
    im_sign: int

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "abs_sq", Fraction(self.abs_sq))
        if self.im_sign not in (1, -1):
            raise ValueError("im_sign must be +1 or -1")
        if self.abs_sq - self.re ** 2 <= 0:
            raise ValueError("Im τ must be nonzero")

    @classmethod
    def from_turn(cls, turn) -> "Tau":
        """``τ = e^{2πi·turn}`` for the turns with rational cosine (±1/4, ±1/6, ±1/3)."""
        turn = Fraction(turn)
        turn = turn - round(turn)
        if turn not in _RATIONAL_COS_TURNS:
            raise ValueError(f"e^(2πi·{turn}) has irrational real part")
        return cls(_RATIONAL_COS_TURNS[turn], Fraction(1), 1 if turn > 0 else -1)

    @property
    def im_sq(self) -> Fraction:
        return self.abs_sq - self.re ** 2

    def conjugate(self) -> "Tau":
        return Tau(self.re, self.abs_sq, -self.im_sign)

    def phase(self) -> Optional[ExactPhase]:
        """The exact phase when τ is a root of unity, else None."""
        if self.abs_sq != 1:
            return None
        for turn, re in _RATIONAL_COS_TURNS.items():
            if re == self.re and (turn > 0) == (self.im_sign > 0):
                return ExactPhase(turn)
        return None

    @cached_property
    def exact(self) -> Number:
        phase = self.phase()
        if phase is not None:
            return Number.of(phase)
        imag = sqrt_rational(self.im_sq) * Number.root_of_unity(Fraction(1, 4))
        return Number.of(self.re) + imag * self.im_sign

    def __complex__(self) -> complex:
        return complex(float(self.re), self.im_sign * float(self.im_sq) ** 0.5)

    def label(self) -> str:
        phase = self.phase()
        if phase is not None:
            return f"exp(2*pi*i*{format_fraction(phase.a if phase.a <= Fraction(1, 2) else phase.a - 1)})"
        sign = "+" if self.im_sign > 0 else "-"
        return f"{format_fraction(self.re)}{sign}i*sqrt({format_fraction(self.im_sq)})"


TAU_I = Tau(Fraction(0), Fraction(1), 1)


@dataclass(frozen=True)
class TripleParams:
    """Data of the Dirac operator: ``R²`` (R > 0), τ and the spin structure.

    ``theta`` is a marker: ``None`` keeps θ symbolic; a rational value
    specialises the θ-phases of the representation (used to demonstrate
    θ-independence).
    """

    tau: Tau = TAU_I
    spin: SpinStructure = field(default_factory=SpinStructure)
    r_squared: Fraction = Fraction(1)
    theta: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "r_squared", Fraction(self.r_squared))
        if self.r_squared <= 0:
            raise ValueError("R must be positive")

    @cached_property
    def R(self) -> Number:
        return sqrt_rational(self.r_squared)

    def with_(self, **changes) -> "TripleParams":
        data = dict(tau=self.tau, spin=self.spin, r_squared=self.r_squared, theta=self.theta)
        data.update(changes)
        return TripleParams(**data)


# --- lattice windows ------------------------------------------------------------

@dataclass(frozen=True)
class LatticeWindow:
    """Sites with ``|mu_i - eps_i| <= bound``; optionally closed under the Z_N orbit map."""

    bound: int
    margin: int
    spin: SpinStructure
    symmetry: Optional[int] = None

    def __post_init__(self):
        if self.bound < 1 or self.margin < 0:
            raise ValueError("window bound must be >= 1 and margin >= 0")

    def _doubled_box(self, radius: int) -> list[tuple[int, int, int]]:
        # coordinates times two: lattice points are then plain integers
        if radius < 0:
            return []
        rng = range(-2 * radius, 2 * radius + 1, 2)
        e1, e2, e3 = (int(2 * e) for e in self.spin.eps)
        return [(e1 + i, e2 + j, e3 + k) for i, j, k in itertools.product(rng, rng, rng)]

    @staticmethod
    def _halve(points) -> list[tuple[Fraction, ...]]:
        return [tuple(Fraction(x, 2) for x in p) for p in points]

    def _box(self, radius: int) -> list[tuple[Fraction, ...]]:
        return self._halve(self._doubled_box(radius))

    @cached_property
    def points(self) -> list[tuple[Fraction, ...]]:
        box = self._doubled_box(self.bound)
        if self.symmetry is None:
            return self._halve(box)
        A = a_matrix(self.symmetry)
        seen = set(box)
        out = list(box)
        for mu in box:
            p = (mu[1], mu[2])
            for _ in range(self.symmetry):
                p = apply_matrix(A, p)
                q = (mu[0], p[0], p[1])
                if q not in seen:
                    seen.add(q)
                    out.append(q)
        return self._halve(out)

    def interior_points(self) -> list[tuple[Fraction, ...]]:
        return self._box(self.bound - self.margin)

    def sites(self) -> list[Site]:
        return [Site(mu, s) for mu in self.points for s in (1, -1)]

    def interior(self) -> list[Site]:
        return [Site(mu, s) for mu in self.interior_points() for s in (1, -1)]

    def is_orbit_closed(self, N: int) -> bool:
        A = a_matrix(N)
        pts = {tuple(int(2 * m) for m in mu) for mu in self.points}
        return all((mu[0],) + apply_matrix(A, (mu[1], mu[2])) in pts for mu in pts)


# --- Dirac operator and real structure ------------------------------------------

def dirac_block(mu, params: TripleParams) -> tuple[tuple[Number, Number], tuple[Number, Number]]:
    """The 2×2 block of D on the pair ``e_{mu,+}, e_{mu,-}``."""
    m1, m2, m3 = (Fraction(m) for m in mu)
    tau = params.tau.exact
    diag = params.R * m1
    return ((diag, m2 + tau * m3), (m2 + tau.conjugate() * m3, -diag))


def dirac_eigenpair(mu, params: TripleParams) -> tuple[Fraction, tuple[int, int]]:
    """Squared eigenvalue of the block at ``mu`` and the signs of its two eigenvalues."""
    m1, m2, m3 = (Fraction(m) for m in mu)
    tau = params.tau
    lam2 = params.r_squared * m1 ** 2 + m2 ** 2 + 2 * tau.re * m2 * m3 + tau.abs_sq * m3 ** 2
    return lam2, ((1, -1) if lam2 else (0, 0))


def dirac_operator(params: TripleParams) -> Operator:
    tau = params.tau.exact
    tau_c = tau.conjugate()
    R = params.R

    def column(site: Site):
        m1, m2, m3 = site.mu
        if site.parity > 0:
            return {site: R * m1, Site(site.mu, -1): m2 + tau_c * m3}
        return {Site(site.mu, 1): m2 + tau * m3, site: R * (-m1)}
    return Operator(column, name="D")


def apply_J(site: Site) -> tuple[int, Site]:
    """``J e_{mu,+} = e_{-mu,-}`` and ``J e_{mu,-} = -e_{-mu,+}``; J is antiunitary."""
    neg = tuple(-m for m in site.mu)
    if site.parity > 0:
        return 1, Site(neg, -1)
    return -1, Site(neg, 1)


def real_structure(mutate: Optional[str] = None) -> Operator:
    """The antilinear J; ``mutate="flip-J-sign"`` flips the sign on the minus copy."""
    flip = mutate == "flip-J-sign"

    def column(site: Site):
        sign, target = apply_J(site)
        if flip and site.parity < 0:
            sign = -sign
        return {target: Number.of(sign)}
    return Operator(column, antilinear=True, name="J")


# --- axiom verification ----------------------------------------------------------

Generator = Union[str, MonomialIndex, AlgebraElement]


def _resolve_generators(generators: Iterable[Generator] | Mapping[str, Generator]):
    if isinstance(generators, Mapping):
        items = list(generators.items())
    else:
        items = []
        for g in generators:
            if isinstance(g, str):
                items.append((g, GENERATORS[g]))
            else:
                items.append((str(g), g))
    out = []
    for name, g in items:
        if isinstance(g, AlgebraElement):
            out.append((name, g, None))
        else:
            g = tuple(g)
            out.append((name, AlgebraElement.monomial(g), g))
    return out


def max_shift(generators) -> int:
    shift = 0
    for _, elem, _ in _resolve_generators(generators):
        for k in elem.coeffs:
            shift = max(shift, max(abs(x) for x in k))
    return shift


def verify_triple_axioms(window: LatticeWindow, params: TripleParams,
                         generators=("U", "V", "W"), J: Optional[Operator] = None) -> Report:
    """Exact check of J² = -1, JD = DJ, the order-zero and first-order conditions
    and boundedness of [D, π(a)] on the interior sites of ``window``."""
    gens = _resolve_generators(generators)
    need = 2 * max_shift(generators)
    if window.margin < need:
        raise ValueError(f"margin insufficient: window margin {window.margin} < {need}")
    if window.spin != params.spin:
        raise ValueError("window and triple use different spin structures")
    sites = window.interior()
    if not sites:
        raise ValueError("window interior is empty")

    J = J if J is not None else real_structure()
    J_inv = -1 * J
    D = dirac_operator(params)
    report = Report("spectral triple axioms")

    check_zero_on(report, "J^2 = -1", J @ J + IDENTITY, sites)
    check_zero_on(report, "JD = DJ", J @ D - D @ J, sites)

    pis = [(name, pi_operator(elem, params.theta)) for name, elem, _ in gens]
    for name_a, pa in pis:
        for name_b, pb in pis:
            opposite = J @ pb @ J_inv
            check_zero_on(report, f"[{name_a}, J{name_b}J^-1] = 0",
                          commutator(pa, opposite), sites)
            check_zero_on(report, f"[[D,{name_a}], J{name_b}J^-1] = 0",
                          commutator(commutator(D, pa), opposite), sites)

    for name, _, k in gens:
        if k is None:
            continue
        t0 = time.perf_counter()
        ok, detail = _bounded_commutator(D, k, sites, params)
        report.add(f"[D,{name}] bounded", ok, detail, time.perf_counter() - t0)
    return report


def _bounded_commutator(D: Operator, k: MonomialIndex, sites, params: TripleParams):
    """[D, π(x^k)] = π(x^k)·(constant 2×2 matrix): the entries stripped of the
    representation phase must not depend on the site."""
    op = commutator(D, monomial_operator(k, params.theta))
    reference: dict[int, dict[int, Number]] = {}
    for site in sites:
        phase, target = represent(k, site, params.theta)
        col = op(basis(site))
        stripped = {}
        for s, c in col.items():
            if c.is_zero():
                continue
            if s.mu != target.mu:
                return False, f"[D,x^{k}] leaves the shifted site at {site}"
            stripped[s.parity] = c * phase.conjugate()
        ref = reference.setdefault(site.parity, stripped)
        if ref is not stripped:
            keys = set(ref) | set(stripped)
            if not all((ref.get(p, Number()) - stripped.get(p, Number())).is_zero() for p in keys):
                return False, f"entries of [D,x^{k}] depend on the site ({site})"
    return True, ""
