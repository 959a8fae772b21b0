"""Equivariant Z_N actions on the Hilbert space and the constraints fixing them.

The generator acts diagonally in parity::

    rho_±(h) e_{mu,±} = beta_± exp(2πi(mu1 ± eps1)/N) e_{mu1, A(mu2,mu3), ±}

with beta_- = conj(beta_+).  Commuting with D pins τ, the spin structure and
beta_+ up to the signs σ and κ.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .exact import ExactPhase, Number
from .nc_torus import (A_MATRICES, GENERATORS, HALF, SUPPORTED_ORDERS, MonomialIndex, SpinStructure,
                       a_matrix, act_on_monomial, apply_matrix, monomial_operator)
from .operators import IDENTITY, Operator, Report, Site, check_zero_on, commutator
from .spectral_triple import (LatticeWindow, Tau, TripleParams, dirac_operator, max_shift,
                              real_structure)


class InadmissibleError(ValueError):
    """A parameter combination violates one of the equivariance constraints."""

    def __init__(self, constraint: str, message: str = ""):
        self.constraint = constraint
        super().__init__(message or f"inadmissible: requires {constraint}")


# Names used in error messages and reports.
CONSTRAINT_TAU = "τ set"
CONSTRAINT_EPS1 = "ε₁ = 1/2"
CONSTRAINT_EPS_N36 = "ε₂ = ε₃ = 0"
CONSTRAINT_EPS_N4 = "ε₂ = ε₃"
CONSTRAINT_BETA = "β equation"


def _check_order(N: int) -> None:
    if N not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported group order N={N}; expected one of {SUPPORTED_ORDERS}")


# --- τ and ζ ------------------------------------------------------------------

class _AnyTau:
    def __contains__(self, tau) -> bool:
        return isinstance(tau, Tau)

    def __repr__(self) -> str:
        return "all τ"


ANY_TAU = _AnyTau()


def admissible_tau(N: int):
    """Allowed conformal parameters: a two-element set, or ``ANY_TAU`` for N = 2."""
    _check_order(N)
    if N == 2:
        return ANY_TAU
    if N == 4:
        return frozenset({Tau.from_turn(Fraction(1, 4)), Tau.from_turn(Fraction(-1, 4))})
    return frozenset({Tau.from_turn(Fraction(1, 6)), Tau.from_turn(Fraction(-1, 6))})


def tau_for_sigma(N: int, sigma: int) -> Optional[Tau]:
    """τ selected by the Dirac branch σ; None when τ is free (N = 2)."""
    _check_order(N)
    if sigma not in (1, -1):
        raise ValueError("sigma must be +1 or -1")
    if N == 2:
        return None
    turn = {3: Fraction(-sigma, 6), 4: Fraction(sigma, 4), 6: Fraction(sigma, 6)}[N]
    return Tau.from_turn(turn)


def sigma_for_tau(N: int, tau: Tau) -> int:
    for sigma in (1, -1):
        if tau_for_sigma(N, sigma) == tau:
            return sigma
    raise InadmissibleError(CONSTRAINT_TAU, f"τ={tau.label()} is not admissible for N={N}")


def zeta_of(N: int, tau: Tau) -> ExactPhase:
    """Scalar with rho_-(h) = ζ rho_+(h)."""
    _check_order(N)
    if N == 2:
        return ExactPhase(HALF)
    if tau not in admissible_tau(N):
        raise InadmissibleError(CONSTRAINT_TAU, f"τ={tau.label()} is not admissible for N={N}")
    phase = tau.phase()
    if N == 3:
        return phase * ExactPhase(HALF)
    return phase.conjugate()


# --- β --------------------------------------------------------------------------

def beta_solve(N: int, eps1, sigma: int, kappa: int = 1) -> ExactPhase:
    """beta_+ for given ε₁, σ and κ (κ only matters for N = 4, 6)."""
    _check_order(N)
    eps1 = Fraction(eps1)
    if sigma not in (1, -1) or kappa not in (1, -1):
        raise ValueError("sigma and kappa must be ±1")
    if N != 3 and eps1 != HALF:
        raise InadmissibleError(CONSTRAINT_EPS1, f"N={N} requires ε₁ = 1/2")
    kappa_turn = Fraction(0) if kappa == 1 else HALF
    if N == 2:
        return ExactPhase(Fraction(0) if sigma == 1 else HALF)
    if N == 3:
        return ExactPhase(Fraction(1, 3) * (2 * eps1 + sigma))
    if N == 4:
        return ExactPhase(Fraction(sigma - 1, 8) + kappa_turn)
    return ExactPhase(Fraction(sigma - 1, 12) + kappa_turn)


# --- σ₊ solver in Q(τ) ----------------------------------------------------------

@dataclass(frozen=True)
class QTau:
    """Element p + q·τ of the quadratic field Q(τ), τ² = 2Re(τ)τ - |τ|²."""

    p: Fraction
    q: Fraction
    tau: Tau

    def __add__(self, o: "QTau") -> "QTau":
        return QTau(self.p + o.p, self.q + o.q, self.tau)

    def __sub__(self, o: "QTau") -> "QTau":
        return QTau(self.p - o.p, self.q - o.q, self.tau)

    def __mul__(self, o: "QTau") -> "QTau":
        r, s = self.tau.re, self.tau.abs_sq
        return QTau(self.p * o.p - s * self.q * o.q,
                    self.p * o.q + self.q * o.p + 2 * r * self.q * o.q, self.tau)

    def conjugate(self) -> "QTau":
        return QTau(self.p + 2 * self.tau.re * self.q, -self.q, self.tau)

    @classmethod
    def rational(cls, x, tau: Tau) -> "QTau":
        return cls(Fraction(x), Fraction(0), tau)

    @classmethod
    def generator(cls, tau: Tau) -> "QTau":
        return cls(Fraction(0), Fraction(1), tau)

    @classmethod
    def from_phase(cls, phase: ExactPhase, tau: Tau) -> "QTau":
        """Express a root of unity lying in Q(τ) in the basis {1, τ}."""
        z, t = Number.of(phase), tau.exact
        q = ((z - z.conjugate()) / (t - t.conjugate())).to_rational()
        p = (z - t * q).to_rational()
        return cls(p, q, tau)


@dataclass(frozen=True)
class SigmaSolution:
    """Exponents of ``sigma_+ ∝ V^k2 W^k3`` (no U factor)."""

    k2: int
    k3: int

    @property
    def index(self) -> MonomialIndex:
        return (0, self.k2, self.k3)


def _zeta_in_field(N: int, tau: Tau) -> QTau:
    t = QTau.generator(tau)
    if N == 2:
        return QTau.rational(-1, tau)
    if N == 3:
        return QTau.rational(0, tau) - t
    return t.conjugate()


def sigma_plus_solve(N: int, eps2, eps3, tau: Tau, zeta: Optional[ExactPhase] = None,
                     bound: int = 2) -> set[SigmaSolution]:
    """All monomial solutions with |k2|, |k3| <= bound of

        ζ(k2 + τ k3) = (1 - ζ)(ε₂ + τ ε₃),   k2 + τ* k3 = (ζ - 1)(ε₂ + τ* ε₃).

    An empty set means no equivariant action exists for (N, ε₂, ε₃).
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    z = _zeta_in_field(N, tau) if zeta is None else QTau.from_phase(zeta, tau)
    one = QTau.rational(1, tau)
    t = QTau.generator(tau)
    tc = t.conjugate()
    e2, e3 = QTau.rational(eps2, tau), QTau.rational(eps3, tau)
    rhs1 = (one - z) * (e2 + t * e3)
    rhs2 = (z - one) * (e2 + tc * e3)
    out = set()
    for k2 in range(-bound, bound + 1):
        for k3 in range(-bound, bound + 1):
            a, b = QTau.rational(k2, tau), QTau.rational(k3, tau)
            if z * (a + t * b) == rhs1 and (a + tc * b) == rhs2:
                out.add(SigmaSolution(k2, k3))
    return out


def spin_constraint(N: int) -> Optional[str]:
    return {3: CONSTRAINT_EPS_N36, 6: CONSTRAINT_EPS_N36, 4: CONSTRAINT_EPS_N4}.get(N)


# --- the action -------------------------------------------------------------------

@dataclass(frozen=True)
class CyclicAction:
    """Full data of a Z_N action; may be inadmissible (see :meth:`violations`)."""

    N: int
    spin: SpinStructure
    tau: Tau
    sigma: int
    kappa: int
    beta_plus: ExactPhase
    beta_minus_override: Optional[ExactPhase] = None

    @property
    def A(self):
        return a_matrix(self.N)

    @property
    def beta_minus(self) -> ExactPhase:
        if self.beta_minus_override is not None:
            return self.beta_minus_override
        return self.beta_plus.conjugate()

    @property
    def zeta(self) -> ExactPhase:
        return zeta_of(self.N, self.tau)

    @classmethod
    def solve(cls, N: int, spin: SpinStructure, sigma: int, kappa: int = 1,
              tau: Optional[Tau] = None) -> "CyclicAction":
        """Run every constraint solver; raises :class:`InadmissibleError`."""
        _check_order(N)
        if N in (2, 3):
            kappa = 1
        branch_tau = tau_for_sigma(N, sigma)
        if branch_tau is None:
            tau = tau if tau is not None else Tau.from_turn(Fraction(1, 4))
        elif tau is not None and tau != branch_tau:
            raise InadmissibleError(CONSTRAINT_TAU,
                                    f"σ={sigma} requires τ={branch_tau.label()} for N={N}")
        else:
            tau = branch_tau
        if not sigma_plus_solve(N, spin.eps2, spin.eps3, tau):
            raise InadmissibleError(spin_constraint(N),
                                    f"N={N} requires {spin_constraint(N)}; got ε={spin}")
        beta = beta_solve(N, spin.eps1, sigma, kappa)
        return cls(N, spin, tau, sigma, kappa, beta)

    def violations(self) -> list[str]:
        out = []
        if self.N not in SUPPORTED_ORDERS:
            return [f"N={self.N} unsupported"]
        if self.tau not in admissible_tau(self.N):
            out.append(CONSTRAINT_TAU)
        elif self.N != 2 and tau_for_sigma(self.N, self.sigma) != self.tau:
            out.append(CONSTRAINT_TAU)
        if not sigma_plus_solve(self.N, self.spin.eps2, self.spin.eps3, self.tau
                                if self.tau in admissible_tau(self.N) else Tau.from_turn(Fraction(1, 4))):
            out.append(spin_constraint(self.N))
        if self.N != 3 and self.spin.eps1 != HALF:
            out.append(CONSTRAINT_EPS1)
        elif beta_solve(self.N, self.spin.eps1, self.sigma,
                        self.kappa if self.N in (4, 6) else 1) != self.beta_plus:
            out.append(CONSTRAINT_BETA)
        if not (self.beta_plus ** self.N).is_one() or self.beta_minus != self.beta_plus.conjugate():
            out.append(CONSTRAINT_BETA)
        return list(dict.fromkeys(out))

    def is_admissible(self) -> bool:
        return not self.violations()

    def mutated(self, **changes) -> "CyclicAction":
        return replace(self, **changes)


def rho(action: CyclicAction, site: Site, strict: bool = True) -> tuple[ExactPhase, Site]:
    """Image of a basis vector under rho(h): (coefficient, target site)."""
    if strict:
        bad = action.violations()
        if bad:
            raise InadmissibleError(bad[0], f"inadmissible action: {', '.join(bad)}")
    return _rho(action, site)


@lru_cache(maxsize=4096)
def _mu1_phase(N: int, shifted: Fraction) -> ExactPhase:
    return ExactPhase(shifted / N)


def _rho(action: CyclicAction, site: Site) -> tuple[ExactPhase, Site]:
    mu1, mu2, mu3 = site.mu
    eps1 = action.spin.eps1
    if site.parity > 0:
        coeff = action.beta_plus * _mu1_phase(action.N, mu1 + eps1)
    else:
        coeff = action.beta_minus * _mu1_phase(action.N, mu1 - eps1)
    m2, m3 = apply_matrix(A_MATRICES[action.N], (mu2, mu3))
    return coeff, Site((mu1, m2, m3), site.parity)


def rho_operator(action: CyclicAction) -> Operator:
    def column(site: Site):
        coeff, target = _rho(action, site)
        return {target: Number.of(coeff)}
    return Operator(column, name="rho")


# --- regular representation ---------------------------------------------------------

def cyclic_shift(N: int) -> np.ndarray:
    """Generator of the regular representation: e_j -> e_{j+1 mod N}."""
    C = np.zeros((N, N), dtype=np.int64)
    for j in range(N):
        C[(j + 1) % N, j] = 1
    return C


def regular_rep_conjugator(N: int) -> np.ndarray:
    """Permutation matrix with U_00 = 1 and U_kl = δ_{k,N-l}, which conjugates
    the shift to its inverse."""
    if N < 2:
        raise ValueError("N must be >= 2")
    U = np.zeros((N, N), dtype=np.int64)
    U[0, 0] = 1
    for k in range(1, N):
        for l in range(1, N):
            U[k, l] = int(k == N - l)
    return U


# --- verification ---------------------------------------------------------------------

def verify_action(window: LatticeWindow, action: CyclicAction, params: TripleParams,
                  generators=("U", "V", "W"), J: Optional[Operator] = None) -> Report:
    """Exact equivariance checks on the interior of ``window``: intertwining with
    the algebra action, [D, rho] = 0, [J, rho] = 0, rho^N = 1 and rho_- = ζ rho_+."""
    need = max(max_shift(generators), 1)
    if window.margin < need:
        raise ValueError(f"margin insufficient: window margin {window.margin} < {need}")
    if not (window.spin == action.spin == params.spin):
        raise ValueError("window, action and triple use different spin structures")
    sites = window.interior()
    report = Report(f"Z_{action.N} equivariance")
    R = rho_operator(action)

    for g in generators:
        name, k = (g, GENERATORS[g]) if isinstance(g, str) else (str(g), tuple(g))
        phase, image = act_on_monomial(action.N, k)
        lhs = R @ monomial_operator(k, params.theta)
        rhs = Number.of(phase) * (monomial_operator(image, params.theta) @ R)
        check_zero_on(report, f"rho {name} = (h|>{name}) rho", lhs - rhs, sites)
    check_zero_on(report, "[D, rho] = 0", commutator(dirac_operator(params), R), sites)
    J = J if J is not None else real_structure()
    check_zero_on(report, "[J, rho] = 0", J @ R - R @ J, sites)
    check_zero_on(report, f"rho^{action.N} = 1", R.power(action.N) - IDENTITY, sites)

    t0 = time.perf_counter()
    try:
        zeta = zeta_of(action.N, params.tau)
    except InadmissibleError as exc:
        report.add("rho_- = zeta rho_+", False, str(exc))
    else:
        bad = None
        for site in sites:
            if site.parity < 0:
                continue
            cp, tp = _rho(action, site)
            cm, tm = _rho(action, Site(site.mu, -1))
            if tp.mu != tm.mu or cm != zeta * cp:
                bad = site
                break
        report.add("rho_- = zeta rho_+", bad is None, f"fails at {bad}" if bad else "",
                   time.perf_counter() - t0)
    return report
