"""Dirac spectra of the restricted triples and their eta invariants.

Eigenvalues are stored as ``(sign, λ²)`` with exact rational ``λ²``; every
spectrum appearing here consists of square roots of rationals, so multiset
comparison needs no tolerance.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional

import mpmath

from .exact import ExactPhase, Number, format_fraction
from .group_action import CyclicAction, _rho
from .nc_torus import (GENERATORS, HALF, AlgebraElement, SpinStructure, a_matrix,
                       apply_matrix, average, pi_operator)
from .operators import Operator, Report, Site, add_into, check_zero_on, commutator
from .spectral_triple import LatticeWindow, TripleParams, dirac_operator, real_structure


class Eigenvalue(NamedTuple):
    """Eigenvalue ``sign·sqrt(lambda_sq)``; sign is 0 exactly when lambda_sq is 0."""

    sign: int
    lambda_sq: Fraction

    @classmethod
    def pair(cls, lambda_sq) -> list["Eigenvalue"]:
        """Both eigenvalues of a traceless 2×2 block with determinant ``-lambda_sq``."""
        lambda_sq = Fraction(lambda_sq)
        if lambda_sq == 0:
            return [cls(0, lambda_sq), cls(0, lambda_sq)]
        return [cls(1, lambda_sq), cls(-1, lambda_sq)]

    def __float__(self) -> float:
        return self.sign * math.sqrt(self.lambda_sq)


Multiset = Counter  # Eigenvalue -> multiplicity


def _sign(x) -> int:
    return (x > 0) - (x < 0)


# --- closed-form building blocks ---------------------------------------------------

@dataclass(frozen=True)
class CircleSpectrum:
    """``{scale·R·(k + offset) : k ∈ Z}``, each with the given multiplicity.

    ``printed_offset`` keeps the representative as originally written when it
    differs from the normalised one; it never affects the eigenvalues.
    """

    scale: Fraction
    offset: Fraction
    multiplicity: int = 1
    printed_offset: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "offset", Fraction(self.offset))
        if self.scale <= 0 or self.multiplicity < 1:
            raise ValueError("scale must be positive and multiplicity >= 1")
        if not -1 < self.offset < 1:
            raise ValueError(f"offset {self.offset} outside (-1, 1)")

    @classmethod
    def normalised(cls, scale, offset, multiplicity: int = 1) -> "CircleSpectrum":
        """Reduce ``offset`` into (-1/2, 1/2], remembering the given form."""
        offset = Fraction(offset)
        rep = offset - math.floor(offset + HALF)
        if rep == -HALF:
            rep = HALF
        return cls(scale, rep, multiplicity, offset if rep != offset else None)

    def eigenvalues(self, lambda_sq_max, r_squared=1) -> Multiset:
        out: Multiset = Counter()
        base = self.scale ** 2 * Fraction(r_squared)
        kmax = math.isqrt(int(Fraction(lambda_sq_max) / base) + 1) + 2
        for k in range(-kmax, kmax + 1):
            x = k + self.offset
            lam2 = base * x * x
            if lam2 <= lambda_sq_max:
                out[Eigenvalue(_sign(x), lam2)] += self.multiplicity
        return out

    def label(self) -> str:
        m = "" if self.multiplicity == 1 else str(self.multiplicity)
        scale = "" if self.scale == 1 else format_fraction(self.scale)
        return f"{m}Sp1[{scale}R,{format_fraction(self.offset)}]"


@dataclass(frozen=True)
class TorusSpectrumComponent:
    """The torus Dirac spectrum with weight ``1/order``: one representative of
    (μ₂, μ₃) per orbit of the order-``order`` matrix, μ₁ over its whole line."""

    params: TripleParams
    order: int = 1

    @property
    def spin(self) -> SpinStructure:
        return self.params.spin

    @property
    def weight(self) -> Fraction:
        return Fraction(1, self.order)

    def _is_rep(self, pair) -> bool:
        if self.order == 1:
            return True
        A = a_matrix(self.order)
        p, best = pair, pair
        for _ in range(self.order - 1):
            p = apply_matrix(A, p)
            best = min(best, p)
        return best == pair

    def eigenvalues(self, lambda_sq_max, r_squared=None) -> Multiset:
        lambda_sq_max = Fraction(lambda_sq_max)
        tau, e = self.params.tau, self.spin
        r2 = self.params.r_squared
        # |μ₂ + τμ₃|² = (μ₂ + Re τ μ₃)² + (Im τ)² μ₃²
        ymax = math.isqrt(int(lambda_sq_max / tau.im_sq) + 1) + 2
        out: Multiset = Counter()
        for j3 in range(-ymax, ymax + 1):
            m3 = e.eps3 + j3
            rest = lambda_sq_max - tau.im_sq * m3 * m3
            if rest < 0:
                continue
            centre = -tau.re * m3 - e.eps2
            width = math.isqrt(int(rest) + 1) + 2
            for j2 in range(math.floor(centre) - width, math.ceil(centre) + width + 1):
                m2 = e.eps2 + j2
                q = m2 * m2 + 2 * tau.re * m2 * m3 + tau.abs_sq * m3 * m3
                if q > lambda_sq_max or not self._is_rep((m2, m3)):
                    continue
                xmax = math.isqrt(int((lambda_sq_max - q) / r2) + 1) + 2
                for j1 in range(-xmax, xmax + 1):
                    m1 = e.eps1 + j1
                    lam2 = r2 * m1 * m1 + q
                    if lam2 <= lambda_sq_max:
                        for ev in Eigenvalue.pair(lam2):
                            out[ev] += 1
        return out

    def label(self) -> str:
        w = "" if self.order == 1 else f"1/{self.order}"
        eps = ",".join(format_fraction(x) for x in self.spin.eps)
        return f"{w}Sp3[{eps}]"


@dataclass(frozen=True)
class SpectrumTerm:
    component: object  # CircleSpectrum or TorusSpectrumComponent
    subtract: bool = False
    source: str = "Sp3"


@dataclass(frozen=True)
class SpectrumSpec:
    """Signed sum of spectrum components, e.g. ``1/3(Sp3 \\ 2Sp1) ∪ 2Sp1``."""

    terms: tuple[SpectrumTerm, ...]
    params: TripleParams = field(default_factory=TripleParams)

    def label(self) -> str:
        parts, i = [], 0
        while i < len(self.terms):
            t = self.terms[i]
            nxt = self.terms[i + 1] if i + 1 < len(self.terms) else None
            if isinstance(t.component, TorusSpectrumComponent) and nxt is not None and nxt.subtract:
                w = t.component.weight
                inner = TorusSpectrumComponent(t.component.params).label()
                sub = nxt.component.label()
                parts.append(f"{'' if w == 1 else format_fraction(w)}({inner} \\ {sub})")
                i += 2
                continue
            parts.append(t.component.label())
            i += 1
        return " ∪ ".join(parts)

    def sp1_components(self) -> list[CircleSpectrum]:
        return [t.component for t in self.terms
                if isinstance(t.component, CircleSpectrum) and not t.subtract]


def enumerate_by_source(spec: SpectrumSpec, lambda_sq_max) -> dict[str, Multiset]:
    """Eigenvalues with λ² <= cutoff, grouped by the source label of each term."""
    lambda_sq_max = Fraction(lambda_sq_max)
    if lambda_sq_max <= 0:
        raise ValueError("cutoff must be positive")
    groups: dict[str, Multiset] = {}
    for term in spec.terms:
        part = term.component.eigenvalues(lambda_sq_max, spec.params.r_squared)
        group = groups.setdefault(term.source, Counter())
        if term.subtract:
            missing = part - group
            if missing:
                raise ValueError(f"subtracting {term.component.label()} leaves negative "
                                 f"multiplicities: {sorted(missing.items())[:3]}")
            group.subtract(part)
            groups[term.source] = +group
        else:
            group.update(part)
    return groups


def enumerate_spectrum(spec: SpectrumSpec, lambda_sq_max) -> Multiset:
    total: Multiset = Counter()
    for part in enumerate_by_source(spec, lambda_sq_max).values():
        total.update(part)
    return total


# --- the per-space formulas ---------------------------------------------------------

def zero_mode_line(N: int, spin: SpinStructure, sigma: int, kappa: int) -> Optional[CircleSpectrum]:
    """The extra ``2Sp1`` from the invariant vectors with μ₂ = μ₃ = 0, if any."""
    if spin.eps2 or spin.eps3:
        return None
    offset = {
        2: Fraction(-sigma, 4),
        3: spin.eps1 - Fraction(sigma, 3),
        4: (1 - kappa - Fraction(sigma, 2)) / 4,
        6: Fraction(1 - kappa, 4) - Fraction(sigma, 12),
    }[N]
    if N == 2:
        offset %= 1  # printed as 3/4 and 1/4
    return CircleSpectrum.normalised(N, offset, 2)


def predicted_spectrum(record) -> SpectrumSpec:
    """Closed-form spectrum of a classified structure (see ``classifier``)."""
    action: CyclicAction = record.action
    N, spin, params = action.N, action.spin, record.params
    torus = SpectrumTerm(TorusSpectrumComponent(params, N), source="Sp3")
    line = zero_mode_line(N, spin, action.sigma, action.kappa)
    if line is None:
        return SpectrumSpec((torus,), params)
    removed = CircleSpectrum.normalised(1, spin.eps1, 2)
    return SpectrumSpec((torus, SpectrumTerm(removed, subtract=True, source="Sp3"),
                         SpectrumTerm(line, source="Sp1")), params)


# --- the projector onto invariant vectors ------------------------------------------

def _walk(action: CyclicAction, site: Site) -> tuple[list[ExactPhase], list[Site]]:
    """Phases and sites of rho^k e_site for k = 0..N; asserts rho^N = 1 there."""
    phases, sites = [ExactPhase()], [site]
    for _ in range(action.N):
        c, nxt = _rho(action, sites[-1])
        phases.append(phases[-1] * c)
        sites.append(nxt)
    if sites[-1] != site or not phases[-1].is_one():
        raise AssertionError(f"rho^N != 1 at {site}")
    return phases[:-1], sites[:-1]


def _orbit_range(action: CyclicAction, site: Site) -> Optional[dict[Site, ExactPhase]]:
    """Unit vector spanning P·span(orbit of ``site``) as {site: phase/√|orbit|},
    stored without the normalisation; None when P vanishes on the orbit."""
    N = action.N
    phases, sites = _walk(action, site)
    size = sites.index(site, 1) if site in sites[1:] else N
    if size == 1:
        p = sum((Number.of(ph) for ph in phases), Number()) / N
        if not (p * p - p).is_zero() or not (p - p.conjugate()).is_zero():
            raise AssertionError(f"P is not an orthogonal projection at {site}")
        if p.is_zero():
            return None
        if not (p - 1).is_zero():
            raise AssertionError(f"projector rank defect at {site}")
        return {site: ExactPhase()}
    if size != N:
        raise NotImplementedError(f"orbit of size {size} for N={N} at {site}")
    # rho^k e_j = rho^(j+k) e_0 / φ_j, so with rho^N e_0 = e_0 one walk gives
    # every column: P_ij = (1/N) φ_i / φ_j
    inverse = [ph.conjugate() for ph in phases]
    P = [[phases[i] * inverse[j] for j in range(N)] for i in range(N)]
    for i in range(N):
        for j in range(N):
            if P[i][j] != P[j][i].conjugate():
                raise AssertionError(f"P is not self-adjoint on the orbit of {site}")
            for l in range(N):
                # (P²)_il = (1/N²) Σ_j P_ij P_jl equals P_il/N iff every product equals P_il
                if P[i][j] * P[j][l] != P[i][l]:
                    raise AssertionError(f"P is not idempotent on the orbit of {site}")
    return {t: P[i][0] for i, t in enumerate(sites)}


def _orbit_eigenvalues(action: CyclicAction, params: TripleParams, mu) -> list[Eigenvalue]:
    plus = _orbit_range(action, Site(mu, 1))
    minus = _orbit_range(action, Site(mu, -1))
    m1 = mu[0]
    diag_sq = params.r_squared * m1 * m1
    if plus and minus:
        # traceless block [[Rμ₁, b], [b*, -Rμ₁]]: eigenvalues ±sqrt(R²μ₁² + |b|²)
        # b = Σ conj(c₊) c₋ (μ₂ + τμ₃) / |orbit| = (X + τY) / |orbit|
        X: dict[ExactPhase, Fraction] = {}
        Y: dict[ExactPhase, Fraction] = {}
        for s, cp in plus.items():
            cm = minus.get(Site(s.mu, -1))
            if cm is None:
                raise AssertionError(f"parity copies of the orbit of {mu} differ")
            ph = cp.conjugate() * cm
            X[ph] = X.get(ph, 0) + s.mu[1]
            Y[ph] = Y.get(ph, 0) + s.mu[2]
        b = Number(X) + params.tau.exact * Number(Y)
        size = len(plus)
        b_abs2 = (b * b.conjugate()).to_rational() / (size * size)
        return Eigenvalue.pair(diag_sq + b_abs2)
    if plus or minus:
        # 1×1 block: D e_{μ,±} = ±Rμ₁ e_{μ,±} + (off-diagonal vanishing on μ₂=μ₃=0)
        parity = 1 if plus else -1
        vec = plus or minus
        if any(s.mu[1] or s.mu[2] for s in vec):
            raise AssertionError(f"unpaired invariant vector off the zero-mode line at {mu}")
        return [Eigenvalue(_sign(parity * m1), diag_sq)]
    return []


def _orbits(window: LatticeWindow, N: int) -> list[tuple]:
    A = a_matrix(N)
    seen, reps = set(), []
    for mu in window.points:
        if mu in seen:
            continue
        reps.append(mu)
        p = (mu[1], mu[2])
        for _ in range(N):
            seen.add((mu[0],) + p)
            p = apply_matrix(A, p)
    return reps


def projector_spectrum(window: LatticeWindow, action: CyclicAction, params: TripleParams,
                       lambda_sq_max=None) -> Multiset:
    """Spectrum of D restricted to the range of P = (1/N) Σ_k rho(h)^k, orbit by orbit.

    Only complete orbits exist in an orbit-closed window, so every returned
    eigenvalue is exact; completeness holds below :func:`reliable_cutoff`.
    """
    if not window.is_orbit_closed(action.N):
        raise ValueError(f"window is not closed under the Z_{action.N} orbit map")
    if window.spin != action.spin or params.spin != action.spin:
        raise ValueError("window, action and triple use different spin structures")
    out: Multiset = Counter()
    for mu in _orbits(window, action.N):
        # the block's eigenvalues satisfy λ² >= (Rμ₁)², its diagonal entry squared
        if lambda_sq_max is not None and params.r_squared * mu[0] ** 2 > lambda_sq_max:
            continue
        for ev in _orbit_eigenvalues(action, params, mu):
            if lambda_sq_max is None or ev.lambda_sq <= lambda_sq_max:
                out[ev] += 1
    return out


def reliable_cutoff(params: TripleParams, bound: int) -> Fraction:
    """Largest λ² for which every eigenvector lies inside a window of the given bound.

    Uses the smallest eigenvalue of the form |μ₂ + τμ₃|², equal to 1 - |Re τ|
    for unimodular τ, and the lower bound (|τ|² - Re τ²)/(1 + |τ|²) otherwise.
    """
    tau = params.tau
    if tau.abs_sq == 1:
        floor = 1 - abs(tau.re)
    else:
        floor = tau.im_sq / (1 + tau.abs_sq)
    return floor * min(Fraction(1), params.r_squared) * (bound - 1) ** 2


def projector_operator(action: CyclicAction) -> Operator:
    """P = (1/N) Σ_k rho(h)^k; each column is one walk along the orbit."""
    N = action.N

    def column(site: Site):
        out: dict = {}
        phase, current = ExactPhase(), site
        for _ in range(N):
            add_into(out, current, Number({phase: Fraction(1, N)}))
            c, current = _rho(action, current)
            phase = phase * c
        return out
    return Operator(column, name="P")


def invariant_generators(N: int) -> dict[str, AlgebraElement]:
    """A few elements of the fixed-point subalgebra: U^N and orbit averages."""
    V = AlgebraElement.monomial(GENERATORS["V"])
    W = AlgebraElement.monomial(GENERATORS["W"])
    UV = AlgebraElement.monomial((1, 1, 0))
    return {f"U^{N}": AlgebraElement.monomial((N, 0, 0)),
            "avg V": average(N, V), "avg W": average(N, W), "avg UV": average(N, UV)}


def verify_projector(window: LatticeWindow, action: CyclicAction, params: TripleParams) -> Report:
    """[P, D] = [P, J] = 0, P² = P and [P, π(b)] = 0 for invariant b."""
    P = projector_operator(action)
    sites = window.interior()
    report = Report(f"Z_{action.N} projector")
    check_zero_on(report, "P^2 = P", P @ P - P, sites)
    check_zero_on(report, "[P, D] = 0", commutator(P, dirac_operator(params)), sites)
    J = real_structure()
    check_zero_on(report, "[P, J] = 0", P @ J - J @ P, sites)
    for name, b in invariant_generators(action.N).items():
        check_zero_on(report, f"[P, {name}] = 0", commutator(P, pi_operator(b, params.theta)), sites)
    return report


# --- eta invariants ------------------------------------------------------------------

def eta_closed_form(c: CircleSpectrum) -> Fraction:
    """``M (sgn β - 2β)`` for the circle spectrum with offset β."""
    beta = c.offset
    if beta == 0:
        return Fraction(0)
    return c.multiplicity * (_sign(beta) - 2 * beta)


def eta_of_record(record) -> Fraction:
    """Only the Sp1 lines are asymmetric; the torus parts come in ± pairs."""
    return sum((eta_closed_form(c) for c in predicted_spectrum(record).sp1_components()),
               Fraction(0))


def _mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def hurwitz_zeta_em(s, a, terms: int = 20, order: int = 12) -> mpmath.mpf:
    """ζ(s, a) by Euler–Maclaurin: a head sum, the integral tail and Bernoulli corrections."""
    s, a = _mpf(s), _mpf(a)
    x = terms + a
    head = mpmath.fsum((n + a) ** (-s) for n in range(terms))
    tail = x ** (1 - s) / (s - 1) + x ** (-s) / 2
    rising = s  # s(s+1)...(s+2j-2)
    for j in range(1, order + 1):
        tail += mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * rising * x ** (-s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return head + tail


def eta_numeric_oracle(c: CircleSpectrum, precision: int = 30, s=0) -> float:
    """``M Σ_k sgn(λ_k)|λ_k|^{-s}`` at ``s`` (default 0) via two Hurwitz zeta values."""
    beta = c.offset
    if beta == 0:
        return 0.0
    with mpmath.workdps(precision):
        b = _mpf(beta)
        if b > 0:
            pos, neg = b, 1 - b
        else:
            pos, neg = 1 + b, -b
        value = _mpf(c.scale) ** (-_mpf(s)) * (hurwitz_zeta_em(s, pos) - hurwitz_zeta_em(s, neg))
        return float(c.multiplicity * value)


# --- serialisation -------------------------------------------------------------------

def sorted_items(spectrum: Multiset) -> list[tuple[Eigenvalue, int]]:
    return sorted(spectrum.items(), key=lambda kv: (kv[0].lambda_sq, -kv[0].sign))


def spectrum_to_json(spectrum: Multiset) -> list[dict]:
    return [{"sign": ev.sign, "lambda_squared": format_fraction(ev.lambda_sq), "multiplicity": m}
            for ev, m in sorted_items(spectrum) if m]


def spectrum_from_json(rows: Iterable[dict]) -> Multiset:
    out: Multiset = Counter()
    for row in rows:
        out[Eigenvalue(int(row["sign"]), Fraction(row["lambda_squared"]))] += int(row["multiplicity"])
    return out


def symmetric_difference(a: Multiset, b: Multiset) -> tuple[Multiset, Multiset]:
    return a - b, b - a
