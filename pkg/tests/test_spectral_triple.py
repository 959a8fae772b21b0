from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bieberbach.nc_torus import SpinStructure
from bieberbach.operators import Site, basis, inner
from bieberbach.spectral_triple import (TAU_I, LatticeWindow, Tau, TripleParams, apply_J,
                                        dirac_block, dirac_eigenpair, dirac_operator,
                                        real_structure, verify_triple_axioms)
from strategies import halves

taus = st.one_of(
    st.sampled_from([Tau.from_turn(t) for t in (F(1, 4), F(-1, 4), F(1, 6), F(-1, 6), F(1, 3))]),
    st.builds(Tau, st.integers(-2, 2), st.integers(5, 9), st.sampled_from((1, -1))),
)
spins = st.builds(SpinStructure, halves, halves, halves)
radii = st.sampled_from((F(1), F(1, 4), F(2), F(9, 4)))


@st.composite
def params_and_mu(draw):
    p = TripleParams(tau=draw(taus), spin=draw(spins), r_squared=draw(radii))
    mu = tuple(e + draw(st.integers(-3, 3)) for e in p.spin.eps)
    return p, mu


class TestTau:
    def test_from_turn(self):
        assert Tau.from_turn(F(1, 4)) == TAU_I
        assert Tau.from_turn(F(-1, 6)).re == F(1, 2)
        with pytest.raises(ValueError):
            Tau.from_turn(F(1, 5))

    def test_real_tau_rejected(self):
        with pytest.raises(ValueError):
            Tau(F(1), F(1), 1)

    @given(taus)
    def test_exact_matches_complex(self, tau):
        assert abs(complex(tau.exact) - complex(tau)) < 1e-12
        assert tau.conjugate().conjugate() == tau

    def test_labels(self):
        assert TAU_I.label() == "exp(2*pi*i*1/4)"
        assert Tau(F(1, 3), F(2), -1).label() == "1/3-i*sqrt(17/9)"


@given(params_and_mu())
def test_block_eigenvalues_match_numpy(data):
    # independent float oracle: eigenvalues of the complex 2x2 block
    params, mu = data
    block = np.array([[complex(x) for x in row] for row in dirac_block(mu, params)])
    assert np.allclose(block, block.conj().T)
    lam2, signs = dirac_eigenpair(mu, params)
    expected = sorted(np.linalg.eigvalsh(block))
    got = sorted(s * float(lam2) ** 0.5 for s in signs)
    assert np.allclose(got, expected, atol=1e-9)


@given(params_and_mu())
def test_dirac_is_symmetric(data):
    params, mu = data
    D = dirac_operator(params)
    for a in (1, -1):
        for b in (1, -1):
            x, y = basis(Site(mu, a)), basis(Site(mu, b))
            assert inner(x, D(y)) == inner(D(x), y)


@given(params_and_mu(), st.sampled_from((1, -1)))
def test_J_squared(data, parity):
    _, mu = data
    s1, first = apply_J(Site(mu, parity))
    s2, back = apply_J(first)
    assert back == Site(mu, parity) and s1 * s2 == -1


def test_window_orbit_closure():
    spin = SpinStructure()
    plain = LatticeWindow(2, 0, spin)
    assert plain.is_orbit_closed(4)
    assert not plain.is_orbit_closed(3)
    closed = LatticeWindow(2, 0, spin, symmetry=3)
    assert closed.is_orbit_closed(3) and len(closed.points) > len(plain.points)


def test_window_interior():
    w = LatticeWindow(3, 2, SpinStructure(F(1, 2)))
    assert len(w.points) == 7 ** 3
    assert len(w.interior()) == 2 * 3 ** 3


@pytest.mark.parametrize("tau", [TAU_I, Tau(F(1, 3), F(2), 1)], ids=["i", "generic"])
def test_axioms_hold_for_generic_data(tau):
    spin = SpinStructure(F(1, 2), 0, F(1, 2))
    report = verify_triple_axioms(LatticeWindow(3, 2, spin), TripleParams(tau=tau, spin=spin,
                                                                          r_squared=F(2)))
    assert report.ok, report.first_failure()


def test_axioms_hold_with_theta_marker():
    spin = SpinStructure()
    params = TripleParams(spin=spin, theta=F(2, 5))
    assert verify_triple_axioms(LatticeWindow(3, 2, spin), params).ok


def test_flipped_J_is_detected():
    spin = SpinStructure()
    report = verify_triple_axioms(LatticeWindow(3, 2, spin), TripleParams(spin=spin),
                                  J=real_structure("flip-J-sign"))
    assert not report["J^2 = -1"].passed


def test_margin_is_enforced():
    spin = SpinStructure()
    with pytest.raises(ValueError, match="margin insufficient"):
        verify_triple_axioms(LatticeWindow(3, 1, spin), TripleParams(spin=spin))
    with pytest.raises(ValueError, match="spin structures"):
        verify_triple_axioms(LatticeWindow(3, 2, spin), TripleParams(spin=SpinStructure(F(1, 2))))
