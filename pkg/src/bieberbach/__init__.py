"""Flat real spectral triples on the noncommutative Bieberbach manifolds B2, B3, B4, B6.

Everything is exact: phases are roots of unity, matrix entries live in cyclotomic
fields and eigenvalues are stored through their rational squares.
"""

from .classifier import (EXPECTED_COUNTS, SPACES, StructureRecord, enumerate_all,
                         enumerate_structures, record_for)
from .group_action import (CyclicAction, InadmissibleError, admissible_tau, beta_solve,
                           regular_rep_conjugator, sigma_plus_solve, verify_action, zeta_of)
from .nc_torus import SpinStructure
from .spectra import (CircleSpectrum, enumerate_spectrum, eta_closed_form, eta_numeric_oracle,
                      eta_of_record, predicted_spectrum, projector_spectrum, reliable_cutoff)
from .spectral_triple import LatticeWindow, Tau, TripleParams, verify_triple_axioms

__version__ = "0.1.0"

__all__ = [
    "EXPECTED_COUNTS", "SPACES", "StructureRecord", "enumerate_all", "enumerate_structures",
    "record_for", "CyclicAction", "InadmissibleError", "admissible_tau", "beta_solve",
    "regular_rep_conjugator", "sigma_plus_solve", "verify_action", "zeta_of", "SpinStructure",
    "CircleSpectrum", "enumerate_spectrum", "eta_closed_form", "eta_numeric_oracle",
    "eta_of_record", "predicted_spectrum", "projector_spectrum", "reliable_cutoff",
    "LatticeWindow", "Tau", "TripleParams", "verify_triple_axioms",
]
