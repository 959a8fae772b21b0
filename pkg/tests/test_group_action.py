import cmath
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bieberbach.classifier import enumerate_all, record_for
from bieberbach.exact import ExactPhase
from bieberbach.group_action import (CyclicAction, InadmissibleError, QTau, SigmaSolution,
                                     admissible_tau, beta_solve, cyclic_shift, regular_rep_conjugator,
                                     rho, sigma_plus_solve, tau_for_sigma, verify_action, zeta_of)
from bieberbach.nc_torus import SpinStructure
from bieberbach.operators import Site
from bieberbach.spectral_triple import TAU_I, LatticeWindow, Tau
from strategies import halves, signs

RECORDS = enumerate_all()
records = st.sampled_from(RECORDS)
generic_taus = st.builds(Tau, st.integers(-3, 3), st.integers(10, 20), signs)


@st.composite
def record_sites(draw):
    r = draw(records)
    mu = tuple(e + draw(st.integers(-4, 4)) for e in r.spin.eps)
    return r, Site(mu, draw(signs))


class TestTables:
    @pytest.mark.parametrize("N, sigma, turn", [(3, 1, F(-1, 6)), (3, -1, F(1, 6)), (4, 1, F(1, 4)),
                                                (4, -1, F(-1, 4)), (6, 1, F(1, 6)), (6, -1, F(-1, 6))])
    def test_tau_branch(self, N, sigma, turn):
        assert tau_for_sigma(N, sigma) == Tau.from_turn(turn)
        assert tau_for_sigma(N, sigma) in admissible_tau(N)

    @given(generic_taus)
    def test_zeta_n2_is_minus_one(self, tau):
        assert complex(zeta_of(2, tau)) == pytest.approx(-1)

    def test_zeta_rejects_bad_tau(self):
        with pytest.raises(InadmissibleError) as exc:
            zeta_of(4, Tau.from_turn(F(1, 6)))
        assert exc.value.constraint == "τ set"

    @pytest.mark.parametrize("N", (3, 4, 6))
    def test_zeta_numeric(self, N):
        for tau in admissible_tau(N):
            t = complex(tau)
            want = -t if N == 3 else t.conjugate()
            assert complex(zeta_of(N, tau)) == pytest.approx(want)

    @given(st.sampled_from((2, 3, 4, 6)), halves, signs, signs)
    def test_beta_has_order_N(self, N, eps1, sigma, kappa):
        if N != 3 and eps1 != F(1, 2):
            with pytest.raises(InadmissibleError):
                beta_solve(N, eps1, sigma, kappa)
            return
        assert (beta_solve(N, eps1, sigma, kappa) ** N).is_one()

    def test_unsupported_order(self):
        with pytest.raises(ValueError, match="unsupported"):
            admissible_tau(5)


class TestQTau:
    @given(generic_taus, st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
    def test_field_arithmetic_matches_complex(self, tau, a, b, c, d):
        x, y = QTau(F(a), F(b), tau), QTau(F(c), F(d), tau)
        t = complex(tau)
        value = lambda q: float(q.p) + float(q.q) * t
        assert cmath.isclose(value(x * y), value(x) * value(y), abs_tol=1e-9)
        assert cmath.isclose(value(x.conjugate()), value(x).conjugate(), abs_tol=1e-9)

    @pytest.mark.parametrize("N", (3, 4, 6))
    def test_from_phase(self, N):
        for tau in admissible_tau(N):
            z = zeta_of(N, tau)
            q = QTau.from_phase(z, tau)
            assert cmath.isclose(float(q.p) + float(q.q) * complex(tau), complex(z))


class TestSigmaPlus:
    @given(generic_taus, halves, halves)
    def test_n2_solution_for_any_tau(self, tau, e2, e3):
        assert sigma_plus_solve(2, e2, e3, tau) == {SigmaSolution(int(-2 * e2), int(-2 * e3))}

    @pytest.mark.parametrize("N", (3, 4, 6))
    def test_both_branches_agree(self, N):
        for e2 in (F(0), F(1, 2)):
            for e3 in (F(0), F(1, 2)):
                results = {bool(sigma_plus_solve(N, e2, e3, tau)) for tau in admissible_tau(N)}
                assert len(results) == 1

    def test_n4_half_solution(self):
        sols = sigma_plus_solve(4, F(1, 2), F(1, 2), TAU_I)
        assert sols and all(abs(s.k2) <= 2 for s in sols)


class TestAction:
    def test_solve_names_the_failed_constraint(self):
        cases = [((4, SpinStructure(F(1, 2), F(1, 2), 0), -1), "ε₂ = ε₃"),
                 ((6, SpinStructure(F(1, 2), F(1, 2), F(1, 2)), -1), "ε₂ = ε₃ = 0"),
                 ((2, SpinStructure(0), 1), "ε₁ = 1/2")]
        for args, constraint in cases:
            with pytest.raises(InadmissibleError) as exc:
                CyclicAction.solve(*args)
            assert exc.value.constraint == constraint

    def test_tau_must_match_branch(self):
        with pytest.raises(InadmissibleError):
            CyclicAction.solve(4, SpinStructure(F(1, 2)), 1, tau=Tau.from_turn(F(-1, 4)))

    @given(records)
    def test_records_are_admissible(self, r):
        assert r.action.violations() == []

    def test_mutants_report_violations(self):
        r = record_for("B3", 0)
        bad = r.action.mutated(beta_plus=r.beta_plus.conjugate())
        assert "β equation" in bad.violations()
        with pytest.raises(InadmissibleError):
            rho(bad, Site((0, 0, 0), 1))
        rho(bad, Site((0, 0, 0), 1), strict=False)

    @given(record_sites())
    def test_rho_is_unitary_of_order_N(self, data):
        r, site = data
        phase, cur = ExactPhase(), site
        for _ in range(r.N):
            c, cur = rho(r.action, cur)
            phase = phase * c
        assert cur == site and phase.is_one()
        assert cur.parity == site.parity

    @given(record_sites())
    def test_rho_minus_is_zeta_rho_plus(self, data):
        r, site = data
        cp, tp = rho(r.action, Site(site.mu, 1))
        cm, tm = rho(r.action, Site(site.mu, -1))
        assert tp.mu == tm.mu and cm == r.zeta * cp

    @pytest.mark.parametrize("space", ["B2", "B3", "B4", "B6"])
    def test_verify_action(self, space):
        r = next(r for r in RECORDS if r.space == space)
        report = verify_action(LatticeWindow(2, 1, r.spin), r.action, r.params)
        assert report.ok, report.first_failure()

    def test_verify_action_with_theta_marker(self):
        r = record_for("B4", kappa=-1, theta=F(1, 7))
        assert verify_action(LatticeWindow(2, 1, r.spin), r.action, r.params).ok

    def test_verify_action_rejects_mismatched_spin(self):
        r = record_for("B3", 0)
        with pytest.raises(ValueError):
            verify_action(LatticeWindow(2, 1, SpinStructure(F(1, 2))), r.action, r.params)


@pytest.mark.parametrize("N", range(2, 13))
def test_conjugator_inverts_shift(N):
    U, C = regular_rep_conjugator(N), cyclic_shift(N)
    assert np.array_equal(U @ C, np.linalg.matrix_power(C, N - 1) @ U)
    assert np.array_equal(U @ U, np.eye(N, dtype=np.int64))
