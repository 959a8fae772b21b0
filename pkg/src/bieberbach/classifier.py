"""Enumeration of the flat real spectral triples over B2, B3, B4 and B6."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exact import ExactPhase, format_fraction
from .group_action import CyclicAction, InadmissibleError
from .nc_torus import HALF, SpinStructure
from .spectra import SpectrumSpec, eta_of_record, predicted_spectrum
from .spectral_triple import TAU_I, Tau, TripleParams

SPACES: dict[str, int] = {"B2": 2, "B3": 3, "B4": 4, "B6": 6}

# For N = 3, 4, 6 the two signs σ describe D and -D on the same invariant
# subspace; only one is emitted, the other is kept as the record's partner.
CANONICAL_SIGMA: dict[str, Optional[int]] = {"B2": None, "B3": 1, "B4": -1, "B6": -1}

EXPECTED_COUNTS: dict[str, int] = {"B2": 8, "B3": 2, "B4": 4, "B6": 2}

Z, H = Fraction(0), HALF

# (ε₁, ε₂, ε₃, σ, κ) -> η for every emitted record, written out independently of the solvers.
EXPECTED_TABLE: dict[str, dict[tuple, Fraction]] = {
    "B2": {
        (H, Z, Z, -1, 1): Fraction(1), (H, Z, Z, 1, 1): Fraction(-1),
        (H, Z, H, -1, 1): Z, (H, Z, H, 1, 1): Z,
        (H, H, Z, -1, 1): Z, (H, H, Z, 1, 1): Z,
        (H, H, H, -1, 1): Z, (H, H, H, 1, 1): Z,
    },
    "B3": {(Z, Z, Z, 1, 1): Fraction(-2, 3), (H, Z, Z, 1, 1): Fraction(4, 3)},
    "B4": {
        (H, Z, Z, -1, -1): Fraction(-1, 2), (H, Z, Z, -1, 1): Fraction(3, 2),
        (H, H, H, -1, -1): Z, (H, H, H, -1, 1): Z,
    },
    "B6": {(H, Z, Z, -1, -1): Fraction(-1, 3), (H, Z, Z, -1, 1): Fraction(5, 3)},
}


def phase_turn(phase: ExactPhase) -> Fraction:
    """The exponent ``a`` of ``exp(2πi a)`` in (-1/2, 1/2]."""
    a = phase.a % 1
    return a - 1 if a > HALF else a


@dataclass(frozen=True)
class StructureRecord:
    space: str
    action: CyclicAction
    params: TripleParams
    eta: Fraction
    spectrum: SpectrumSpec

    @property
    def N(self) -> int:
        return self.action.N

    @property
    def spin(self) -> SpinStructure:
        return self.action.spin

    @property
    def sigma(self) -> int:
        return self.action.sigma

    @property
    def kappa(self) -> int:
        return self.action.kappa

    @property
    def tau(self) -> Tau:
        return self.action.tau

    @property
    def beta_plus(self) -> ExactPhase:
        return self.action.beta_plus

    @property
    def zeta(self) -> ExactPhase:
        return self.action.zeta

    @property
    def key(self) -> tuple:
        return (*self.spin.eps, self.sigma, self.kappa)

    def partner(self) -> "StructureRecord":
        """The record with σ -> -σ (D -> -D on the invariant subspace)."""
        return record_for(self.space, *self.spin.eps, sigma=-self.sigma, kappa=self.kappa,
                          tau=self.tau.conjugate() if self.N == 2 else None,
                          r_squared=self.params.r_squared, theta=self.params.theta)

    def to_row(self) -> dict[str, object]:
        return {
            "space": self.space,
            "epsilon1": format_fraction(self.spin.eps1),
            "epsilon2": format_fraction(self.spin.eps2),
            "epsilon3": format_fraction(self.spin.eps3),
            "sigma": self.sigma,
            "kappa": self.kappa,
            "tau": self.tau.label(),
            "beta_plus_turn": format_fraction(phase_turn(self.beta_plus)),
            "zeta_turn": format_fraction(phase_turn(self.zeta)),
            "eta": format_fraction(self.eta),
            "spectrum": self.spectrum.label(),
        }


def _order(space: str) -> int:
    if space not in SPACES:
        raise ValueError(f"unknown space {space!r}; expected one of {', '.join(SPACES)}")
    return SPACES[space]


def record_for(space: str, eps1=HALF, eps2=0, eps3=0, sigma: Optional[int] = None,
               kappa: int = 1, tau: Optional[Tau] = None, r_squared=1,
               theta: Optional[Fraction] = None) -> StructureRecord:
    """Build one record, running every admissibility solver.

    ``sigma`` defaults to the canonical branch (+1 for B2 and B3, -1 for B4, B6);
    B2 uses τ = i unless another τ is given.
    """
    N = _order(space)
    if sigma is None:
        sigma = CANONICAL_SIGMA[space] or 1
    if N in (2, 3) and kappa != 1:
        raise InadmissibleError("κ = +1", f"κ is fixed to +1 for {space}")
    if N == 2 and tau is None:
        tau = TAU_I
    spin = SpinStructure(eps1, eps2, eps3)
    action = CyclicAction.solve(N, spin, sigma, kappa, tau)
    params = TripleParams(tau=action.tau, spin=spin, r_squared=r_squared, theta=theta)
    draft = StructureRecord(space, action, params, Fraction(0), SpectrumSpec(()))
    spectrum = predicted_spectrum(draft)
    return StructureRecord(space, action, params, eta_of_record(draft), spectrum)


def enumerate_structures(space: str, r_squared=1) -> list[StructureRecord]:
    """All records for one space, sorted by (ε₁, ε₂, ε₃, σ, κ)."""
    N = _order(space)
    halves = (Z, H)
    if N == 2:
        params = [(H, e2, e3, s, 1) for e2 in halves for e3 in halves for s in (-1, 1)]
    elif N == 3:
        params = [(e1, Z, Z, 1, 1) for e1 in halves]
    elif N == 4:
        params = [(H, e, e, -1, k) for e in halves for k in (-1, 1)]
    else:
        params = [(H, Z, Z, -1, k) for k in (-1, 1)]
    return [record_for(space, e1, e2, e3, sigma=s, kappa=k, r_squared=r_squared)
            for e1, e2, e3, s, k in sorted(params)]


def enumerate_all(r_squared=1) -> list[StructureRecord]:
    return [r for space in SPACES for r in enumerate_structures(space, r_squared)]


def table_mismatches(records: list[StructureRecord]) -> list[str]:
    """Differences between solver output and :data:`EXPECTED_TABLE`."""
    out = []
    for space, expected in EXPECTED_TABLE.items():
        got = {r.key: r.eta for r in records if r.space == space}
        if not got:
            continue
        if len(got) != EXPECTED_COUNTS[space]:
            out.append(f"{space}: {len(got)} records, expected {EXPECTED_COUNTS[space]}")
        for key in sorted(set(expected) | set(got)):
            if expected.get(key) != got.get(key):
                out.append(f"{space} {key}: eta {got.get(key)} != expected {expected.get(key)}")
    return out
