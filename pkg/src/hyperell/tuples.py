"""Formal expressions and their combinatorics.

* :class:`UTuple`   - (n_1^r_1, ..., n_m^r_m), indexing a character sum u_g
* :class:`AExpr`    - a_{N_1}^{R_1} ... a_{N_M}^{R_M}, a trace moment
* :class:`BCExpr`   - b/c fiber statistics
* :class:`CycleType`- conjugacy class of S_n
* :class:`ULinComb` - rational combination of UTuples

All of them are immutable and hashable, with a canonical text form that the
matching ``parse_*`` function reads back.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Tuple

import sympy
from gmpy2 import mpq

from .qpoly import QPoly, Q_VAR


class ExprParseError(ValueError):
    pass


# ---------------------------------------------------------------- UTuple


@dataclass(frozen=True, order=True)
class UTuple:
    slots: Tuple[Tuple[int, int], ...]  # canonical: sorted descending

    def __post_init__(self):
        for n, r in self.slots:
            if n < 1 or r not in (1, 2):
                raise ValueError(f"bad slot {n}^{r}")
        canon = tuple(sorted(self.slots, reverse=True))
        if canon != self.slots:
            object.__setattr__(self, "slots", canon)

    @classmethod
    def of(cls, pairs: Iterable) -> "UTuple":
        return cls(tuple((int(n), int(r)) for n, r in pairs))

    @property
    def degree(self) -> int:
        return sum(n for n, _ in self.slots)

    @property
    def weight(self) -> int:
        return sum(n * r for n, r in self.slots)

    @property
    def parity(self) -> int:
        return self.weight % 2

    @property
    def rflag(self) -> int:
        """0 when every exponent is 2 (including the empty tuple), else 1."""
        return 0 if all(r == 2 for _, r in self.slots) else 1

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(n for n, _ in self.slots)

    def __len__(self):
        return len(self.slots)

    def render(self, fmt: str = "plain") -> str:
        if fmt == "latex":
            return "(" + ",".join(f"{n}^{{{r}}}" for n, r in self.slots) + ")"
        return "(" + ",".join(f"{n}^{r}" for n, r in self.slots) + ")"

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"UTuple{self.render()}"


EMPTY = UTuple(())

_SLOT = re.compile(r"^\s*(\d+)\s*\^\s*(\d+)\s*$")


def parse_tuple(text: str) -> UTuple:
    t = text.strip()
    if not (t.startswith("(") and t.endswith(")")):
        raise ExprParseError(f"tuple must be parenthesised: {text!r}")
    body = t[1:-1].strip()
    if not body:
        return EMPTY
    slots = []
    for part in body.split(","):
        m = _SLOT.match(part)
        if not m:
            raise ExprParseError(f"bad tuple entry {part!r}")
        n, r = int(m.group(1)), int(m.group(2))
        if n < 1 or r not in (1, 2):
            raise ExprParseError(f"bad tuple entry {part!r}")
        slots.append((n, r))
    return UTuple.of(slots)


# ---------------------------------------------------------------- AExpr


@dataclass(frozen=True, order=True)
class AExpr:
    """Product of a_N^R; ``powers`` sorted by N ascending, all R >= 1."""

    powers: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        merged: Dict[int, int] = {}
        for N, R in self.powers:
            if N < 1 or R < 0:
                raise ValueError(f"bad factor a{N}^{R}")
            merged[N] = merged.get(N, 0) + R
        canon = tuple(sorted((N, R) for N, R in merged.items() if R > 0))
        if canon != self.powers:
            object.__setattr__(self, "powers", canon)

    @classmethod
    def of(cls, pairs: Iterable) -> "AExpr":
        return cls(tuple((int(n), int(r)) for n, r in pairs))

    @property
    def weight(self) -> int:
        return sum(N * R for N, R in self.powers)

    @property
    def slots(self) -> List[int]:
        out = []
        for N, R in self.powers:
            out.extend([N] * R)
        return out

    def __mul__(self, other: "AExpr") -> "AExpr":
        return AExpr(self.powers + other.powers)

    def render(self, fmt: str = "plain") -> str:
        if not self.powers:
            return "a0" if fmt != "latex" else "a_{0}"
        parts = []
        for N, R in self.powers:
            if fmt == "latex":
                parts.append(f"a_{{{N}}}" + (f"^{{{R}}}" if R > 1 else ""))
            else:
                parts.append(f"a{N}" + (f"^{R}" if R > 1 else ""))
        return " ".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"AExpr({self.render()})"


A0 = AExpr(())

_FACTOR = re.compile(r"^([abc])(\d+)(?:\^(\d+))?$")


def _factors(text: str, allowed: str):
    toks = text.replace("*", " ").split()
    if not toks:
        raise ExprParseError("empty expression")
    out = []
    for tok in toks:
        m = _FACTOR.match(tok)
        if not m or m.group(1) not in allowed:
            raise ExprParseError(f"bad factor {tok!r}")
        N = int(m.group(2))
        R = int(m.group(3)) if m.group(3) else 1
        out.append((m.group(1), N, R))
    return out


def parse_aexpr(text: str) -> AExpr:
    facs = _factors(text, "a")
    pairs = []
    for _, N, R in facs:
        if N == 0:
            if len(facs) != 1:
                raise ExprParseError("a0 cannot be combined with other factors")
            return A0
        if R < 1:
            raise ExprParseError("exponents must be positive")
        pairs.append((N, R))
    return AExpr.of(pairs)


# ---------------------------------------------------------------- BCExpr


@dataclass(frozen=True, order=True)
class BCExpr:
    b: Tuple[Tuple[int, int], ...] = ()
    c: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        for name in ("b", "c"):
            merged: Dict[int, int] = {}
            for N, R in getattr(self, name):
                if N < 1 or R < 0:
                    raise ValueError(f"bad factor {name}{N}^{R}")
                merged[N] = merged.get(N, 0) + R
            object.__setattr__(self, name, tuple(sorted((N, R) for N, R in merged.items() if R > 0)))

    @property
    def weight(self) -> int:
        return sum(N * R for N, R in self.b) + sum(N * R for N, R in self.c)

    def render(self, fmt: str = "plain") -> str:
        parts = []
        for name, part in (("b", self.b), ("c", self.c)):
            for N, R in part:
                if fmt == "latex":
                    parts.append(f"{name}_{{{N}}}" + (f"^{{{R}}}" if R > 1 else ""))
                else:
                    parts.append(f"{name}{N}" + (f"^{R}" if R > 1 else ""))
        return " ".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"BCExpr({self.render()})"


def parse_bcexpr(text: str) -> BCExpr:
    b, c = [], []
    for kind, N, R in _factors(text, "bc"):
        if N < 1 or R < 1:
            raise ExprParseError("b/c factors need positive index and exponent")
        (b if kind == "b" else c).append((N, R))
    return BCExpr(tuple(b), tuple(c))


# ---------------------------------------------------------------- CycleType


@dataclass(frozen=True, order=True)
class CycleType:
    """Cycle lengths, sorted descending (a partition of n)."""

    parts: Tuple[int, ...] = ()

    def __post_init__(self):
        if any(p < 1 for p in self.parts):
            raise ValueError("cycle lengths must be positive")
        canon = tuple(sorted(self.parts, reverse=True))
        if canon != self.parts:
            object.__setattr__(self, "parts", canon)

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def multiplicities(self) -> List[Tuple[int, int]]:
        out: Dict[int, int] = {}
        for p in self.parts:
            out[p] = out.get(p, 0) + 1
        return sorted(out.items())

    def centralizer_size(self) -> int:
        z = 1
        for N, R in self.multiplicities:
            z *= N ** R * sympy.factorial(R)
        return int(z)

    def render(self, fmt: str = "plain") -> str:
        return "[" + ",".join(map(str, self.parts)) + "]"

    def __str__(self):
        return self.render()


def partitions(n: int) -> List[CycleType]:
    out = []
    for p in sympy.utilities.iterables.partitions(n):
        parts = []
        for k, m in p.items():
            parts.extend([k] * m)
        out.append(CycleType(tuple(parts)))
    if n == 0:
        return [CycleType(())]
    return sorted(out, reverse=True)


# ---------------------------------------------------------------- ULinComb


class ULinComb:
    """Map UTuple -> rational coefficient, zeros dropped."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for t, c in (terms or {}).items():
            c = mpq(c)
            if c != 0:
                clean[t] = c
        self.terms = clean

    def add(self, t: UTuple, c) -> None:
        v = self.terms.get(t, 0) + mpq(c)
        if v == 0:
            self.terms.pop(t, None)
        else:
            self.terms[t] = v

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (-kv[0].degree, tuple(-x for s in kv[0].slots for x in s)))

    def __eq__(self, other):
        if isinstance(other, ULinComb):
            return self.terms == other.terms
        if isinstance(other, dict):
            return self.terms == ULinComb(other).terms
        return NotImplemented

    def __add__(self, other: "ULinComb") -> "ULinComb":
        out = ULinComb(self.terms)
        for t, c in other.terms.items():
            out.add(t, c)
        return out

    def scale(self, s) -> "ULinComb":
        return ULinComb({t: c * mpq(s) for t, c in self.terms.items()})

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, t):
        return self.terms.get(t, mpq(0))

    def render(self, fmt: str = "plain") -> str:
        if not self.terms:
            return "0"
        out = ""
        for i, (t, c) in enumerate(self.items()):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if a == 1:
                coef = ""
            elif a.denominator == 1:
                coef = f"{a.numerator}*" if fmt != "latex" else f"{a.numerator}"
            else:
                coef = f"{a.numerator}/{a.denominator}*" if fmt != "latex" else rf"\frac{{{a.numerator}}}{{{a.denominator}}}"
            body = coef + (f"u^{{{t.render('latex')}}}" if fmt == "latex" else t.render())
            if i == 0:
                out = ("-" if sign == "-" else "") + body
            else:
                out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"ULinComb({self.render()})"


# ---------------------------------------------------------------- decomposition


def set_partitions(items: List) -> Iterator[List[List]]:
    """All set partitions of ``items`` (by position)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _reduce_exp(s: int) -> int:
    return 1 if s % 2 else 2


@lru_cache(maxsize=None)
def _decompose_slots(slots: Tuple[int, ...]) -> Dict[UTuple, int]:
    out: Dict[UTuple, int] = {}
    sign = -1 if len(slots) % 2 else 1
    for part in set_partitions(list(slots)):
        # every block needs a common exact degree d | N for all N in the block
        choices = []
        for block in part:
            g = 0
            for N in block:
                g = sympy.igcd(g, N)
            choices.append([(d, block) for d in sympy.divisors(g)])
        for assign in _product(choices):
            coef = sign
            tup = []
            for d, block in assign:
                s = sum(1 if (N // d) % 2 else 2 for N in block)
                tup.append((d, _reduce_exp(s)))
                coef *= d ** (len(block) - 1)
            t = UTuple.of(tup)
            out[t] = out.get(t, 0) + coef
    return {t: c for t, c in out.items() if c}


def _product(lists):
    if not lists:
        yield []
        return
    for x in lists[0]:
        for rest in _product(lists[1:]):
            yield [x] + rest


def decompose_a(expr: AExpr) -> ULinComb:
    """Write the moment a_{N_1}^{R_1}... as an integer combination of u-tuples."""
    return ULinComb(_decompose_slots(tuple(expr.slots)))


def general_case(expr: AExpr) -> UTuple:
    return UTuple.of((N, 1) for N in expr.slots)


def decompose_bc(expr: BCExpr, drop_odd: bool = True) -> ULinComb:
    """Combination of u-tuples for a product of b_N and c_N statistics.

    Each b-slot is 1/2 (chi^2 + chi) and each c-slot 1/2 (chi^2 - chi) summed
    over exact-degree-N points; slots merge only with slots of the same N.
    """
    slots = []  # (N, sign of the chi term)
    for N, R in expr.b:
        slots.extend([(N, 1)] * R)
    for N, R in expr.c:
        slots.extend([(N, -1)] * R)
    out = ULinComb()
    half = mpq(1, 2 ** len(slots))
    for exps in _product([[2, 1]] * len(slots)):
        coef0 = half
        for (N, s), e in zip(slots, exps):
            if e == 1:
                coef0 *= s
        labelled = list(zip([N for N, _ in slots], exps))
        for part in set_partitions(labelled):
            if any(len({N for N, _ in block}) > 1 for block in part):
                continue
            coef = coef0
            tup = []
            for block in part:
                N = block[0][0]
                tup.append((N, _reduce_exp(sum(e for _, e in block))))
                coef *= N ** (len(block) - 1)
            t = UTuple.of(tup)
            if drop_odd and t.parity:
                continue
            out.add(t, coef)
    return out


# ---------------------------------------------------------------- counting


def mobius(n: int) -> int:
    return int(sympy.mobius(n))


@lru_cache(maxsize=None)
def exact_degree_count(d: int) -> QPoly:
    """Number of points of P^1 with exact degree d: sum_{e|d} mu(d/e)(q^e + 1)."""
    acc = QPoly()
    for e in sympy.divisors(d):
        acc = acc + (QPoly.monomial(e) + 1) * mobius(d // e)
    return acc


def orbit_count_poly(degrees: Iterable[int]) -> QPoly:
    """|A(n_1..n_m)|: ordered tuples of exact-degree points in distinct orbits."""
    seen: Dict[int, int] = {}
    acc = QPoly.const(1)
    for n in degrees:
        k = seen.get(n, 0)
        acc = acc * (exact_degree_count(n) - n * k)
        seen[n] = k + 1
    return acc


@lru_cache(maxsize=None)
def _subset_sums(degrees: Tuple[int, ...]) -> Dict[Tuple[int, int], int]:
    """Multiset {(sum, size): count} over subsets of the slots."""
    out = {(0, 0): 1}
    for n in degrees:
        new = dict(out)
        for (s, k), c in out.items():
            key = (s + n, k + 1)
            new[key] = new.get(key, 0) + c
        out = new
    return out


def bj_poly(tup: UTuple, j: int) -> QPoly:
    """Number of monic degree-j polynomials nonvanishing on a configuration of type ``tup``."""
    if j < 0:
        return QPoly()
    acc = [0] * (j + 1)
    for (s, k), c in _subset_sums(tup.degrees).items():
        if s <= j:
            acc[j - s] += (-1) ** k * c
    return QPoly(acc)


def bhat_poly(tup: UTuple, j: int) -> QPoly:
    """Partial sum b_0 + ... + b_j (zero for j < 0)."""
    acc = QPoly()
    for i in range(j + 1):
        acc = acc + bj_poly(tup, i)
    return acc


def char_poly(target) -> QPoly:
    """Characteristic polynomial of the genus recursion, in the variable lambda.

    For the empty tuple and a0 there is no homogeneous part and 1 is returned.
    """
    lam_pows = []
    if isinstance(target, AExpr):
        for N, R in target.powers:
            lam_pows.extend([N] * R)
    elif isinstance(target, UTuple):
        lam_pows = list(target.degrees)
    else:
        raise TypeError("char_poly takes an AExpr or a UTuple")
    if not lam_pows:
        return QPoly.const(1)
    acc = QPoly.const(1)
    for N in lam_pows:
        acc = acc * (QPoly.monomial(N) - 1)
    return acc.exact_div(QPoly([-1, 1]))


# ---------------------------------------------------------------- genus 0


def _genus0_step(tup: UTuple, pick: int) -> ULinComb:
    """One application of the a_n(P^1) = 0 identity to slot ``pick``."""
    slots = list(tup.slots)
    n, r = slots[pick]
    assert r == 1
    rest = slots[:pick] + slots[pick + 1:]
    out = ULinComb()
    for d in sympy.divisors(n)[:-1]:
        e = 1 if (n // d) % 2 else 2
        out.add(UTuple.of(rest + [(d, e)]), -1)
        for j, (nj, rj) in enumerate(rest):
            if nj == d:
                merged = rest[:j] + [(d, _reduce_exp(rj + e))] + rest[j + 1:]
                out.add(UTuple.of(merged), -d)
    for j, (nj, rj) in enumerate(rest):
        if nj == n:
            merged = rest[:j] + [(n, _reduce_exp(rj + 1))] + rest[j + 1:]
            out.add(UTuple.of(merged), -n)
    return out


def genus0_step(tup: UTuple, order: str = "descending") -> ULinComb:
    """First reduction step on the largest (or smallest) slot with exponent 1."""
    idx = [i for i, (_, r) in enumerate(tup.slots) if r == 1]
    if not idx:
        return ULinComb({tup: 1})
    pick = idx[0] if order == "descending" else idx[-1]
    return _genus0_step(tup, pick)


@lru_cache(maxsize=None)
def _genus0_reduce(tup: UTuple, order: str) -> Tuple[Tuple[UTuple, mpq], ...]:
    if tup.rflag == 0:
        return ((tup, mpq(1)),)
    acc = ULinComb()
    for t, c in genus0_step(tup, order).terms.items():
        for t2, c2 in _genus0_reduce(t, order):
            acc.add(t2, c * c2)
    return tuple(acc.terms.items())


def genus0_reduce(tup: UTuple, order: str = "descending") -> ULinComb:
    """Rewrite the genus-0 value of ``tup`` through tuples with all exponents 2.

    Valid only at genus 0, where every trace a_n vanishes.
    """
    if order not in ("descending", "ascending"):
        raise ValueError("order must be 'descending' or 'ascending'")
    return ULinComb(dict(_genus0_reduce(tup, order)))


# ---------------------------------------------------------------- sigma moments


def _mono_mul(a: AExpr, b: AExpr) -> AExpr:
    return a * b


def _poly_mul(x: Dict[AExpr, QPoly], y: Dict[AExpr, QPoly]) -> Dict[AExpr, QPoly]:
    out: Dict[AExpr, QPoly] = {}
    for ma, ca in x.items():
        for mb, cb in y.items():
            m = _mono_mul(ma, mb)
            v = out.get(m, QPoly()) + ca * cb
            if v.is_zero():
                out.pop(m, None)
            else:
                out[m] = v
    return out


def sigma_moment_poly(sigma: CycleType) -> Dict[AExpr, QPoly]:
    """Number of F.sigma-fixed marked tuples on one curve, as a polynomial in q and a_d.

    Keys are monomials in the traces (A0 is the constant monomial).
    """
    result: Dict[AExpr, QPoly] = {A0: QPoly.const(1)}
    for N, R in sigma.multiplicities:
        # points of exact degree N on the curve: sum_{d|N} mu(N/d) (1 + q^d - a_d)
        base: Dict[AExpr, QPoly] = {}
        for d in sympy.divisors(N):
            mu = mobius(N // d)
            if not mu:
                continue
            base[A0] = base.get(A0, QPoly()) + (QPoly.monomial(d) + 1) * mu
            key = AExpr(((d, 1),))
            base[key] = base.get(key, QPoly()) + QPoly.const(-mu)
        base = {m: c for m, c in base.items() if not c.is_zero()}
        for j in range(R):
            factor = dict(base)
            factor[A0] = factor.get(A0, QPoly()) - j * N
            factor = {m: c for m, c in factor.items() if not c.is_zero()}
            result = _poly_mul(result, factor)
    return result


def all_aexprs(max_weight: int, min_weight: int = 0) -> List[AExpr]:
    """Every a-expression with weight in [min_weight, max_weight]."""
    out = []
    for w in range(min_weight, max_weight + 1):
        if w == 0:
            out.append(A0)
            continue
        for p in sympy.utilities.iterables.partitions(w):
            out.append(AExpr.of(p.items()))
    return sorted(out, key=lambda e: (e.weight, e.powers))


def all_bcexprs(max_weight: int) -> List[BCExpr]:
    """Every b/c expression with weight in [1, max_weight]."""
    out = set()
    for w in range(1, max_weight + 1):
        for p in sympy.utilities.iterables.partitions(w):
            parts = []
            for k, m in p.items():
                parts.extend([k] * m)
            # each part is a b or a c
            for mask in range(2 ** len(parts)):
                b = [(N, 1) for i, N in enumerate(parts) if not (mask >> i) & 1]
                c = [(N, 1) for i, N in enumerate(parts) if (mask >> i) & 1]
                out.add(BCExpr(tuple(b), tuple(c)))
    return sorted(out, key=lambda e: (e.weight, e.b, e.c))
