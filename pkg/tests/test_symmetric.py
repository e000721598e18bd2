import math
from fractions import Fraction

import pytest

from hyperell.symmetric import character
from hyperell.tuples import CycleType, partitions


def test_small_character_table():
    # S_3: rows trivial, standard, sign; columns 1^3, 2 1, 3
    cols = [CycleType((1, 1, 1)), CycleType((2, 1)), CycleType((3,))]
    rows = {(3,): [1, 1, 1], (2, 1): [2, 0, -1], (1, 1, 1): [1, -1, 1]}
    for shape, want in rows.items():
        assert [character(CycleType(shape), c) for c in cols] == want


@pytest.mark.parametrize("n", range(1, 8))
def test_row_orthogonality(n):
    parts = partitions(n)
    for a in parts:
        for b in parts:
            s = sum(Fraction(character(a, c) * character(b, c), c.centralizer_size()) for c in parts)
            assert s == (1 if a == b else 0)


@pytest.mark.parametrize("n", range(1, 8))
def test_dimensions_square_sum(n):
    ident = CycleType((1,) * n)
    assert sum(character(lam, ident) ** 2 for lam in partitions(n)) == math.factorial(n)


def test_mismatched_sizes():
    with pytest.raises(ValueError):
        character(CycleType((2,)), CycleType((1, 1, 1)))
