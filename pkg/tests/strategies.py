"""Shared hypothesis strategies."""

from fractions import Fraction

from hypothesis import strategies as st

from bieberbach.exact import ExactPhase, Number

DENOMINATORS = (1, 2, 3, 4, 5, 6, 8, 12)

small_fractions = st.builds(Fraction, st.integers(-12, 12), st.sampled_from(DENOMINATORS))
turns = st.builds(Fraction, st.integers(0, 23), st.sampled_from(DENOMINATORS))
phases = st.builds(ExactPhase, turns, st.builds(Fraction, st.integers(-3, 3), st.sampled_from((1, 2))))
cyclotomic_phases = st.builds(ExactPhase, turns)


@st.composite
def numbers(draw, phase_strategy=phases, max_terms: int = 4) -> Number:
    items = draw(st.lists(st.tuples(phase_strategy, small_fractions), max_size=max_terms))
    out = Number()
    for p, c in items:
        out = out + Number({p: c})
    return out


halves = st.sampled_from((Fraction(0), Fraction(1, 2)))
signs = st.sampled_from((1, -1))
