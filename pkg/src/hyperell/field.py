"""Small finite fields GF(p^n) backed by discrete-log tables.

An element is an ``int`` code: base-p digit j of the code is the coefficient
of x^j in the residue modulo the field's defining polynomial.  Codes below p
are the prime field, so GF(p) sits inside every field with the same codes.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np
import sympy

TABLE_LIMIT = 1 << 22


class FieldError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration would exceed its configured budget."""


@dataclass(frozen=True)
class PrimePower:
    p: int
    k: int = 1

    def __post_init__(self):
        if not sympy.isprime(self.p) or self.k < 1:
            raise FieldError(f"not a prime power: {self.p}^{self.k}")

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def is_even(self) -> bool:
        return self.p == 2

    @property
    def parity(self) -> str:
        return "even" if self.p == 2 else "odd"

    @classmethod
    def from_q(cls, q: int) -> "PrimePower":
        f = sympy.factorint(q)
        if len(f) != 1:
            raise FieldError(f"{q} is not a prime power")
        (p, k), = f.items()
        return cls(int(p), int(k))


# ---------------------------------------------------------------- GF(p)[x] helpers
# dense coefficient lists, low degree first, entries in 0..p-1


def _pmod(a, m, p):
    a = list(a)
    inv = pow(m[-1], -1, p)
    while len(a) >= len(m):
        c = a[-1] * inv % p
        if c:
            s = len(a) - len(m)
            for i, mi in enumerate(m):
                a[s + i] = (a[s + i] - c * mi) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmulmod(a, b, m, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pmod(out, m, p)


def _ppowmod(base, e, m, p):
    result = [1]
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def _is_primitive(m, p, n):
    """m monic of degree n over GF(p); True iff x generates GF(p^n)^*."""
    order = p ** n - 1
    if order == 1:
        return True
    x = [0, 1]
    if _ppowmod(x, order, m, p) != [1]:
        return False
    for r in sympy.primefactors(order):
        if _ppowmod(x, order // r, m, p) == [1]:
            return False
    return True


@lru_cache(maxsize=None)
def primitive_modulus(p: int, n: int) -> tuple:
    """Lowest monic primitive polynomial of degree n over GF(p).

    "Lowest" orders candidates by their coefficient code read base p.
    """
    if n == 1:
        # x - g for the smallest generator g of GF(p)^*
        g = int(sympy.primitive_root(p)) if p > 2 else 1
        return ((-g) % p, 1)
    for code in range(p ** n):
        low = [(code // p ** i) % p for i in range(n)]
        if low[0] == 0:
            continue
        m = low + [1]
        if _is_primitive(m, p, n):
            return tuple(m)
    raise FieldError("no primitive polynomial found")  # pragma: no cover


class FiniteField:
    """GF(p^n) with exp/log/Zech tables.  Use :func:`gf` to get a cached instance."""

    def __init__(self, p: int, n: int = 1):
        if not sympy.isprime(p) or n < 1:
            raise FieldError(f"bad field GF({p}^{n})")
        Q = p ** n
        if Q > TABLE_LIMIT:
            raise BudgetExceeded(f"GF({p}^{n}) has {Q} elements, above the table limit {TABLE_LIMIT}")
        self.p, self.n, self.Q = p, n, Q
        self.qm1 = Q - 1
        self.modulus = primitive_modulus(p, n)
        self._build_tables()

    def __repr__(self):
        return f"GF({self.p}^{self.n})"

    # -- construction
    def _build_tables(self):
        p, n, Q = self.p, self.n, self.Q
        qm1 = self.qm1
        exp = np.zeros(max(qm1, 1), dtype=np.int32)
        # multiply-by-x on digit vectors, vectorized over nothing: Q is small
        m = self.modulus
        digits = [1] + [0] * (n - 1)
        pw = [p ** i for i in range(n)]
        for i in range(qm1):
            exp[i] = sum(d * w for d, w in zip(digits, pw))
            top = digits[-1]
            digits = [0] + digits[:-1]
            if top:
                digits = [(d - top * m[j]) % p for j, d in enumerate(digits)]
        log = np.full(Q, -1, dtype=np.int32)
        log[exp[:qm1]] = np.arange(qm1, dtype=np.int32)
        if Q > 1 and (log[1:] < 0).any():
            raise FieldError("modulus is not primitive")  # pragma: no cover
        # Zech: zech[i] = log(1 + g^i)
        one_plus = self._add_codes(np.ones(qm1, dtype=np.int64), exp[:qm1].astype(np.int64))
        zech = log[one_plus]
        self.exp, self.log, self.zech = exp, log, zech.astype(np.int32)
        chi = np.zeros(Q, dtype=np.int8)
        if p != 2:
            chi[1:] = np.where(log[1:] % 2 == 0, 1, -1)
        self.chi = chi
        tr = np.zeros(Q, dtype=np.int8)
        if p == 2:
            codes = np.arange(Q, dtype=np.int64)
            acc = np.zeros(Q, dtype=np.int64)
            cur = codes.copy()
            for _ in range(n):
                acc ^= cur
                cur = self.mul_arr(cur, cur)
            if not np.isin(acc, (0, 1)).all():
                raise FieldError("trace left the prime field")  # pragma: no cover
            tr = acc.astype(np.int8)
        self.trace = tr

    def _add_codes(self, a, b):
        """Digitwise addition of code arrays (no tables needed)."""
        p = self.p
        if p == 2:
            return a ^ b
        out = np.zeros_like(a)
        w = 1
        for _ in range(self.n):
            out += ((a // w % p + b // w % p) % p) * w
            w *= p
        return out

    # -- scalar arithmetic
    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if a == 0:
            return b
        if b == 0:
            return a
        la = int(self.log[a])
        z = int(self.zech[(int(self.log[b]) - la) % self.qm1])
        return 0 if z < 0 else int(self.exp[(la + z) % self.qm1])

    def neg(self, a: int) -> int:
        if a == 0 or self.p == 2:
            return a
        return int(self.exp[(int(self.log[a]) + self.qm1 // 2) % self.qm1])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[(int(self.log[a]) + int(self.log[b])) % self.qm1])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.exp[(-int(self.log[a])) % self.qm1])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 1 if e == 0 else 0
        return int(self.exp[(int(self.log[a]) * e) % self.qm1])

    def frobenius(self, a: int, times: int = 1) -> int:
        """a -> a^(p^times)."""
        return self.pow(a, self.p ** times)

    def from_int(self, c: int) -> int:
        """Image of the integer c in the prime field."""
        return c % self.p

    def elements(self) -> range:
        return range(self.Q)

    # -- vectorized arithmetic on code arrays
    def mul_arr(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        s = (self.log[a].astype(np.int64) + self.log[b]) % self.qm1
        return np.where((a == 0) | (b == 0), 0, self.exp[s]).astype(np.int64)

    def add_arr(self, a, b):
        return self._add_codes(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    def pow_arr(self, a, e: int):
        a = np.asarray(a)
        s = (self.log[a].astype(np.int64) * e) % self.qm1
        zero = np.where(e == 0, 1, 0)
        return np.where(a == 0, zero, self.exp[s]).astype(np.int64)

    # -- subfields
    def exact_degree_over(self, q: int, codes) -> np.ndarray:
        """Smallest d with a^(q^d) = a, for each code (GF(q) a subfield)."""
        codes = np.asarray(codes)
        m = _ext_degree(self.Q, q)
        out = np.full(codes.shape, m, dtype=np.int64)
        L = self.log[codes].astype(np.int64)
        for d in sorted(sympy.divisors(m), reverse=True):
            fixed = (L * (q ** d - 1)) % self.qm1 == 0
            out = np.where(fixed, d, out)
        return np.where(codes == 0, 1, out)

    def tables(self):
        """Bundle consumed by :mod:`hyperell.kernels`."""
        return _Tables(self.p, self.qm1, self.log, self.exp, self.zech)


@dataclass(frozen=True)
class _Tables:
    p: int
    qm1: int
    log: np.ndarray
    exp: np.ndarray
    zech: np.ndarray


def _ext_degree(Q, q):
    m = 0
    x = 1
    while x < Q:
        x *= q
        m += 1
    if x != Q:
        raise FieldError(f"GF({q}) is not a subfield of a field of size {Q}")
    return m


@lru_cache(maxsize=None)
def gf(p: int, n: int = 1) -> FiniteField:
    return FiniteField(p, n)


def gf_q(q: int) -> FiniteField:
    pp = PrimePower.from_q(q)
    return gf(pp.p, pp.k)


@lru_cache(maxsize=None)
def extension(base: FiniteField, m: int):
    """Return (k_m, emb) with ``emb[c]`` the image of base code c in k_m."""
    big = gf(base.p, base.n * m)
    if m == 1:
        return big, np.arange(base.Q, dtype=np.int64)
    # images of base elements form {0} and the (Q-1)/(q-1)-th powers
    step = big.qm1 // base.qm1
    mod = base.modulus  # coefficients in GF(p), valid codes in big as well
    beta = None
    for j in range(base.qm1):
        cand = int(big.exp[(j * step) % big.qm1])
        acc = 0
        for c in reversed(mod):
            acc = big.add(big.mul(acc, cand), c)
        if acc == 0:
            beta = cand
            break
    if beta is None:  # pragma: no cover
        raise FieldError("embedding root not found")
    emb = np.zeros(base.Q, dtype=np.int64)
    powers = [1]
    for _ in range(base.n - 1):
        powers.append(big.mul(powers[-1], beta))
    for code in range(base.Q):
        acc = 0
        c = code
        for pw in powers:
            acc = big.add(acc, big.mul(c % base.p, pw))
            c //= base.p
        emb[code] = acc
    return big, emb


# ---------------------------------------------------------------- characters


def quadratic_character(field: FiniteField, m: int, a: int) -> int:
    """chi on k_m, with ``a`` a code of the degree-m extension of ``field``."""
    if field.p == 2:
        raise FieldError("quadratic character needs odd characteristic")
    big, _ = extension(field, m)
    if a == 0:
        return 0
    t = big.pow(a, big.qm1 // 2)
    return 1 if t == 1 else -1


def artin_schreier_tau(field: FiniteField, m: int, a: int, b: int) -> int:
    """(#roots of y^2 + a y + b in k_m) - 1, characteristic 2 only."""
    if field.p != 2:
        raise FieldError("tau needs characteristic 2")
    big, _ = extension(field, m)
    if a == 0:
        return 0
    t = big.div(b, big.mul(a, a))
    return 1 - 2 * int(big.trace[t])


def count_roots_quadratic(field: FiniteField, a: int, b: int) -> int:
    """Exhaustive count of y with y^2 + a y + b = 0."""
    n = 0
    for y in field.elements():
        if field.add(field.add(field.mul(y, y), field.mul(a, y)), b) == 0:
            n += 1
    return n


# ---------------------------------------------------------------- points


@dataclass(frozen=True)
class ProjPoint:
    """A point of P^1(k_m); ``code`` is None for infinity."""

    code: Optional[int]
    exact_degree: int
    m: int

    @property
    def is_infinity(self) -> bool:
        return self.code is None


def _check_budget(size, budget):
    if budget is not None and size > budget:
        raise BudgetExceeded(f"point set of size {size} exceeds budget {budget}")


def enumerate_proj_points(field: FiniteField, m: int, budget: Optional[int] = None) -> list:
    _check_budget(field.Q ** m + 1, budget)
    big, _ = extension(field, m)
    codes = np.arange(big.Q)
    deg = big.exact_degree_over(field.Q, codes)
    pts = [ProjPoint(int(c), int(d), m) for c, d in zip(codes, deg)]
    pts.append(ProjPoint(None, 1, m))
    return pts


@lru_cache(maxsize=None)
def closed_points(field: FiniteField, d: int) -> np.ndarray:
    """One code in k_d per Frobenius orbit of exact degree d (smallest code).

    Infinity is not included; it is the extra degree-1 point.
    """
    big, _ = extension(field, d)
    codes = np.arange(big.Q, dtype=np.int64)
    deg = big.exact_degree_over(field.Q, codes)
    cand = codes[deg == d]
    if len(cand) == 0:
        return cand
    orbit_min = cand.copy()
    cur = cand.copy()
    for _ in range(d - 1):
        cur = big.pow_arr(cur, field.Q)
        orbit_min = np.minimum(orbit_min, cur)
    return np.unique(orbit_min)


def orbit_key(field: FiniteField, pt: ProjPoint):
    """Minimal polynomial of the point over the base field (or "inf").

    Two points lie in the same Frobenius orbit iff their keys agree, whatever
    extension they were enumerated in.
    """
    if pt.code is None:
        return ("inf",)
    big, emb = extension(field, pt.m)
    poly = [1]  # low degree first, codes of big
    cur = pt.code
    for _ in range(pt.exact_degree):
        shifted = [0] + poly
        for i, c in enumerate(poly):
            shifted[i] = big.sub(shifted[i], big.mul(c, cur))
        poly = shifted
        cur = big.pow(cur, field.Q)
    back = {int(v): k for k, v in enumerate(emb)}
    return tuple(back[c] for c in poly)


def enumerate_A(field: FiniteField, degrees: Sequence[int], budget: Optional[int] = None) -> Iterator[tuple]:
    """Tuples (b_1..b_m), b_i of exact degree n_i in P^1(k_{n_i}), orbits pairwise distinct."""
    for d in degrees:
        _check_budget(field.Q ** d + 1, budget)
    pools = []
    for d in degrees:
        pools.append([pt for pt in enumerate_proj_points(field, d) if pt.exact_degree == d])
    keys = [[orbit_key(field, pt) for pt in pool] for pool in pools]

    def rec(i, used, acc):
        if i == len(pools):
            yield tuple(acc)
            return
        for pt, key in zip(pools[i], keys[i]):
            if key in used:
                continue
            used.add(key)
            acc.append(pt)
            yield from rec(i + 1, used, acc)
            acc.pop()
            used.discard(key)

    yield from rec(0, set(), [])
