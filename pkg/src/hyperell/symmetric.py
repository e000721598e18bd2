"""Irreducible characters of S_n by the Murnaghan-Nakayama rule."""
from __future__ import annotations

from functools import lru_cache
from typing import Tuple

from .tuples import CycleType


@lru_cache(maxsize=None)
def _mn(beta: Tuple[int, ...], cycles: Tuple[int, ...]) -> int:
    # beta: strictly decreasing first-column hook lengths (a beta-set of the shape)
    if not cycles:
        return 1
    k, rest = cycles[0], cycles[1:]
    beads = set(beta)
    total = 0
    for b in beta:
        t = b - k
        if t < 0 or t in beads:
            continue
        # a rim hook of length k; its height is the number of beads jumped over
        height = sum(1 for x in beta if t < x < b)
        new = tuple(sorted((beads - {b}) | {t}, reverse=True))
        total += (-1) ** height * _mn(new, rest)
    return total


def character(shape: CycleType, cycle_type: CycleType) -> int:
    """chi_shape evaluated on permutations of the given cycle type."""
    if shape.n != cycle_type.n:
        raise ValueError("shape and cycle type must partition the same n")
    parts = shape.parts
    L = len(parts)
    beta = tuple(p + L - 1 - i for i, p in enumerate(parts))
    return _mn(beta, cycle_type.parts)
