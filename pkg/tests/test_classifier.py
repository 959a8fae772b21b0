from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bieberbach.classifier import (EXPECTED_COUNTS, EXPECTED_TABLE, SPACES, enumerate_all,
                                   enumerate_structures, phase_turn, record_for, table_mismatches)
from bieberbach.exact import ExactPhase
from bieberbach.group_action import InadmissibleError
from bieberbach.spectra import eta_of_record
from strategies import halves, signs

RECORDS = enumerate_all()


def test_counts_and_table():
    assert {s: len(enumerate_structures(s)) for s in SPACES} == EXPECTED_COUNTS
    assert table_mismatches(RECORDS) == []


def test_table_mismatch_is_reported():
    tampered = [record_for("B3", 0, r_squared=1)]
    assert any("records" in m for m in table_mismatches(tampered))


def test_enumeration_is_sorted_and_deterministic():
    for space in SPACES:
        keys = [r.key for r in enumerate_structures(space)]
        assert keys == sorted(keys)
    assert [r.to_row() for r in enumerate_all()] == [r.to_row() for r in RECORDS]


@given(st.sampled_from(RECORDS))
def test_partner_is_an_involution(r):
    p = r.partner()
    assert p.sigma == -r.sigma and p.eta == -r.eta
    assert p.partner().to_row() == r.to_row()


@given(st.sampled_from(RECORDS))
def test_eta_is_stored(r):
    assert r.eta == eta_of_record(r) == EXPECTED_TABLE[r.space][r.key]


@pytest.mark.parametrize("r_squared", [F(1, 9), F(5)])
def test_eta_is_independent_of_radius(r_squared):
    assert [r.eta for r in enumerate_all(r_squared)] == [r.eta for r in RECORDS]


def test_defaults_use_canonical_branch():
    assert record_for("B3").sigma == 1
    assert record_for("B4").sigma == record_for("B6").sigma == -1
    assert record_for("B2").tau.label() == "exp(2*pi*i*1/4)"


@pytest.mark.parametrize("space, kwargs, eta", [
    ("B3", {}, F(4, 3)), ("B3", {"eps1": 0}, F(-2, 3)),
    ("B4", {"sigma": -1, "kappa": 1}, F(3, 2)), ("B6", {"sigma": 1, "kappa": 1}, F(-5, 3)),
    ("B6", {"sigma": 1, "kappa": -1}, F(1, 3)), ("B2", {"sigma": 1}, F(-1)),
    ("B2", {"eps2": F(1, 2)}, F(0)),
])
def test_selected_values(space, kwargs, eta):
    assert record_for(space, **kwargs).eta == eta


@given(st.sampled_from(sorted(SPACES)), halves, halves, halves, signs, signs)
def test_inadmissible_inputs_name_a_constraint(space, e1, e2, e3, sigma, kappa):
    try:
        r = record_for(space, e1, e2, e3, sigma=sigma, kappa=kappa)
    except InadmissibleError as exc:
        assert exc.constraint in {"ε₁ = 1/2", "ε₂ = ε₃ = 0", "ε₂ = ε₃", "κ = +1"}
    else:
        assert r.action.is_admissible()


def test_to_row_fields():
    row = record_for("B4", kappa=-1).to_row()
    assert list(row) == ["space", "epsilon1", "epsilon2", "epsilon3", "sigma", "kappa", "tau",
                         "beta_plus_turn", "zeta_turn", "eta", "spectrum"]
    assert row["eta"] == "-1/2" and row["beta_plus_turn"] == "1/4"


def test_phase_turn_range():
    assert phase_turn(ExactPhase(F(3, 4))) == F(-1, 4)
    assert phase_turn(ExactPhase(F(1, 2))) == F(1, 2)


def test_unknown_space():
    with pytest.raises(ValueError, match="unknown space"):
        record_for("B5")
