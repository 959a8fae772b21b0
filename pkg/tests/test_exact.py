import cmath
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bieberbach.exact import (I, ONE, ZERO, ExactPhase, Number, cyclotomic_polynomial,
                              format_fraction, sqrt_rational)
from strategies import cyclotomic_phases, numbers, phases, small_fractions


def close(a: complex, b: complex, tol: float = 1e-9) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


class TestPhase:
    def test_turn_is_taken_mod_one(self):
        assert ExactPhase(F(5, 4)) == ExactPhase(F(1, 4)) == ExactPhase(F(-3, 4))

    def test_theta_part_is_not_reduced(self):
        assert ExactPhase(0, 2) != ExactPhase()

    @given(phases, phases, phases)
    def test_group_laws(self, p, q, r):
        assert (p * q) * r == p * (q * r)
        assert p * q == q * p
        assert (p * p.conjugate()).is_one()

    @given(phases, st.integers(-6, 6))
    def test_power_matches_evaluation(self, p, n):
        assert close(complex(p ** n), complex(p) ** n)


class TestNumber:
    def test_cube_roots_sum_to_zero(self):
        w = Number.root_of_unity(F(1, 3))
        assert ONE + w + w * w == 0

    def test_i_squared(self):
        assert I * I == -1

    def test_cyclotomic_polynomials(self):
        assert cyclotomic_polynomial(1) == (-1, 1)
        assert cyclotomic_polynomial(4) == (1, 0, 1)
        assert cyclotomic_polynomial(6) == (1, -1, 1)
        assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)

    @given(numbers(), numbers(), numbers())
    def test_ring_axioms(self, a, b, c):
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)
        assert a - a == ZERO

    @given(numbers(), numbers())
    def test_arithmetic_agrees_with_floats(self, a, b):
        assert close(complex(a * b), complex(a) * complex(b), 1e-7)
        assert close(complex(a + b.conjugate()), complex(a) + complex(b).conjugate(), 1e-7)

    @given(numbers(cyclotomic_phases))
    def test_zero_test_agrees_with_floats(self, a):
        # for θ-free numbers, exact zero and numerical zero must coincide
        assert a.is_zero() == (abs(complex(a)) < 1e-9)

    @given(numbers(cyclotomic_phases, max_terms=3))
    def test_inverse(self, a):
        if a.is_zero():
            with pytest.raises(ZeroDivisionError):
                a.inverse()
        else:
            assert a * a.inverse() == 1

    @given(numbers())
    def test_abs2_is_real(self, a):
        value = complex(a.abs2())
        assert abs(value.imag) < 1e-8 and value.real > -1e-8

    def test_theta_degrees_are_independent(self):
        x = Number({ExactPhase(0, 1): F(1)})
        assert x != ONE
        assert x.theta_degrees() == {F(1)}
        assert not x.is_rational()

    @given(small_fractions)
    def test_to_rational_roundtrip(self, q):
        assert Number.of(q).to_rational() == q
        assert isinstance(Number.of(q).to_rational(), F)


class TestSqrt:
    @given(st.integers(-60, 60), st.integers(1, 30))
    def test_square(self, p, q):
        x = F(p, q)
        r = sqrt_rational(x)
        assert r * r == x
        assert close(complex(r), cmath.sqrt(complex(float(x))))

    def test_known(self):
        assert sqrt_rational(F(9, 4)) == F(3, 2)
        assert not sqrt_rational(2).is_rational()


@pytest.mark.parametrize("value, text", [(F(3), "3"), (F(-2, 6), "-1/3"), (F(0), "0")])
def test_format_fraction(value, text):
    assert format_fraction(value) == text
