from fractions import Fraction

from hypothesis import settings, strategies as st

from coherent_lab import DiscreteMeasure

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

GRID = [Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(1)]

coords = st.sampled_from(GRID)
weights = st.builds(Fraction, st.integers(1, 6), st.integers(1, 4))
positive_rationals = st.builds(Fraction, st.integers(1, 20), st.integers(1, 20))


@st.composite
def atom_lists(draw, min_size=1, max_size=6):
    n = draw(st.integers(min_size, max_size))
    return [(draw(coords), draw(coords), draw(weights)) for _ in range(n)]


@st.composite
def measures(draw, min_size=1, max_size=6):
    return DiscreteMeasure.from_atoms(draw(atom_lists(min_size, max_size)))


@st.composite
def diagonal_heavy_measures(draw, max_size=5):
    """Mostly diagonal atoms, which are coherent far more often than random ones."""
    n = draw(st.integers(1, max_size))
    atoms = []
    for _ in range(n):
        x = draw(coords)
        y = x if draw(st.booleans()) else draw(coords)
        atoms.append((x, y, draw(weights)))
    return DiscreteMeasure.from_atoms(atoms)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
