"""Plain polynomials over a :class:`~hyperell.field.FiniteField`.

Lists of codes, low degree first, no trailing zeros.  These are slow and used
only where clarity matters more than speed: gcd-based checks, the even
characteristic class probes, and tests.
"""
from __future__ import annotations

from itertools import product
from typing import List, Tuple

from .field import FiniteField

Poly = List[int]


def trim(a) -> Poly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def deg(a: Poly) -> int:
    return len(a) - 1 if a else -1


def add(F: FiniteField, a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return trim(F.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n))


def sub(F: FiniteField, a: Poly, b: Poly) -> Poly:
    return add(F, a, [F.neg(x) for x in b])


def mul(F: FiniteField, a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return trim(out)


def scale(F: FiniteField, a: Poly, c: int) -> Poly:
    return trim(F.mul(x, c) for x in a)


def divmod_(F: FiniteField, a: Poly, b: Poly) -> Tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    r = list(a)
    inv = F.inv(b[-1])
    qt = [0] * max(len(a) - len(b) + 1, 0)
    for k in range(len(a) - len(b), -1, -1):
        c = F.mul(r[k + len(b) - 1], inv)
        qt[k] = c
        if c:
            for j, y in enumerate(b):
                r[k + j] = F.sub(r[k + j], F.mul(c, y))
    return trim(qt), trim(r[: len(b) - 1])


def monic(F: FiniteField, a: Poly) -> Poly:
    return scale(F, a, F.inv(a[-1])) if a else a


def gcd(F: FiniteField, a: Poly, b: Poly) -> Poly:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, divmod_(F, a, b)[1]
    return monic(F, a)


def derivative(F: FiniteField, a: Poly) -> Poly:
    return trim(F.mul(F.from_int(i), a[i]) for i in range(1, len(a)))


def evaluate(F: FiniteField, a: Poly, x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def is_squarefree(F: FiniteField, a: Poly) -> bool:
    """gcd(a, a') constant, for a of positive degree (characteristic coprime to deg handled)."""
    if deg(a) <= 0:
        return bool(a)
    return deg(gcd(F, a, derivative(F, a))) == 0


def all_polys(F: FiniteField, max_deg: int):
    """Every polynomial of degree <= max_deg (including zero)."""
    for coeffs in product(range(F.Q), repeat=max_deg + 1):
        yield trim(coeffs)


def monic_polys(F: FiniteField, d: int):
    for low in product(range(F.Q), repeat=d):
        yield list(low) + [1]


def irreducibles(F: FiniteField, d: int) -> List[Poly]:
    """Monic irreducible polynomials of degree d, by trial division."""
    smaller = [p for e in range(1, d // 2 + 1) for p in irreducibles(F, e)]
    out = []
    for m in monic_polys(F, d):
        if all(divmod_(F, m, p)[1] for p in smaller):
            out.append(m)
    return out


def divides(F: FiniteField, m: Poly, a: Poly) -> bool:
    return not trim(a) or not divmod_(F, a, m)[1]
