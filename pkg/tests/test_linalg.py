import random
from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, strategies as st

from coherent_lab import linalg


def random_matrix(rng, m, n):
    return [[F(rng.randint(-3, 3), rng.randint(1, 3)) if rng.random() < 0.6 else F(0) for _ in range(n)] for _ in range(m)]


class TestNullspace:
    @pytest.mark.parametrize("seed", range(30))
    def test_matches_sympy(self, seed):
        rng = random.Random(seed)
        m, n = rng.randint(1, 5), rng.randint(1, 7)
        rows = random_matrix(rng, m, n)
        basis = linalg.nullspace(rows, n)
        ref = sympy.Matrix(rows).nullspace()
        assert len(basis) == len(ref) == n - linalg.rank(rows, n)
        for v in basis:
            assert linalg.apply(rows, v) == [0] * m
        # same span: stacking ours onto sympy's adds no rank
        if ref:
            stacked = sympy.Matrix([list(r.T) for r in ref] + [list(map(sympy.Rational, v)) for v in basis])
            assert stacked.rank() == len(ref)

    def test_sparse_input(self):
        rows = [{0: 1, 2: -1}, {1: F(1, 2), 2: F(-1, 2)}]
        assert linalg.nullspace(rows, 3) == [[F(1), F(1), F(1)]]

    def test_zero_rows_ignored(self):
        assert linalg.rank([[0, 0], [0, 0]], 2) == 0
        assert len(linalg.nullspace([], 3)) == 3

    def test_column_range(self):
        with pytest.raises(ValueError):
            linalg.rref([{5: 1}], 3)

    @given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=1, max_size=4))
    def test_rref_is_reduced(self, rows):
        reduced, pivots = linalg.rref(rows, 4)
        assert pivots == sorted(pivots)
        for r, p in zip(reduced, pivots):
            assert r[p] == 1
            assert all(other.get(p, 0) == 0 for other in reduced if other is not r)
        assert len(pivots) == sympy.Matrix(rows).rank()
