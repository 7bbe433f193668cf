import sys
from fractions import Fraction

import pytest
from hypothesis import strategies as st

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
small_rationals = st.fractions(min_value=-4, max_value=4, max_denominator=8)
nonzero_steps = st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=8)
poly_coeffs = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=6),
                       min_size=1, max_size=5)


@pytest.fixture
def rational_grid():
    """20 x 20 grid of rationals with mixed denominators."""
    xs = [Fraction(k, 3) - Fraction(7, 2) for k in range(20)]
    return [(x, y) for x in xs for y in xs]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        status, text, elapsed = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {text} ({elapsed * 1000:.1f} ms)")
