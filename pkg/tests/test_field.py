import itertools

import numpy as np
import pytest

from hyperell.field import (BudgetExceeded, FieldError, artin_schreier_tau, closed_points, count_roots_quadratic,
                            extension, gf, gf_q, quadratic_character)
from hyperell.tuples import exact_degree_count

SMALL = [2, 3, 4, 5, 7, 8, 9]


@pytest.mark.parametrize("q", SMALL)
def test_field_axioms(q):
    F = gf_q(q)
    els = list(F.elements())
    assert len(els) == q
    for a, b, c in itertools.product(els, repeat=3):
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.div(1, a)) == 1


@pytest.mark.parametrize("q", SMALL)
def test_multiplicative_group_is_cyclic(q):
    F = gf_q(q)
    assert sorted(int(F.exp[i]) for i in range(q - 1)) == list(range(1, q))


def test_bad_fields():
    with pytest.raises(FieldError):
        gf(6)
    with pytest.raises(FieldError):
        gf_q(12)
    with pytest.raises(BudgetExceeded):
        gf(2, 40)


@pytest.mark.parametrize("q,m", [(2, 2), (2, 3), (3, 2), (4, 2), (5, 2), (3, 3)])
def test_extension_embedding_is_a_homomorphism(q, m):
    F = gf_q(q)
    big, emb = extension(F, m)
    assert big.Q == q ** m
    assert len(set(emb.tolist())) == q
    for a, b in itertools.product(range(q), repeat=2):
        assert emb[F.add(a, b)] == big.add(int(emb[a]), int(emb[b]))
        assert emb[F.mul(a, b)] == big.mul(int(emb[a]), int(emb[b]))


@pytest.mark.parametrize("q", [2, 3, 4, 5])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_closed_point_counts(q, d):
    # exact_degree_count counts points of P^1 (infinity included), not orbits
    points = exact_degree_count(d)(q)
    assert len(closed_points(gf_q(q), d)) * d + (d == 1) == points


@pytest.mark.parametrize("q", [3, 5, 9])
def test_quadratic_character_is_multiplicative(q):
    F = gf_q(q)
    big, _ = extension(F, 2)
    chi = lambda a: quadratic_character(F, 2, a)
    for a, b in itertools.product(range(big.Q), repeat=2):
        assert chi(big.mul(a, b)) == chi(a) * chi(b)
    assert sum(chi(a) for a in range(big.Q)) == 0


@pytest.mark.parametrize("q", [2, 4, 8])
def test_artin_schreier_tau_matches_root_count(q):
    F = gf_q(q)
    for a, b in itertools.product(range(q), repeat=2):
        if a:
            assert artin_schreier_tau(F, 1, a, b) == count_roots_quadratic(F, a, b) - 1


def test_characters_reject_wrong_characteristic():
    with pytest.raises(FieldError):
        quadratic_character(gf(2), 1, 1)
    with pytest.raises(FieldError):
        artin_schreier_tau(gf(3), 1, 1, 1)


def test_exact_degree_over():
    big, _ = extension(gf(2), 4)
    deg = big.exact_degree_over(2, np.arange(16))
    assert sorted(np.bincount(deg).tolist()) == sorted([0, 2, 2, 0, 12])
