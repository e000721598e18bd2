"""Brute-force oracle: enumerate hyperelliptic models and sum over them.

Odd characteristic curves are y^2 = c*f(x) with f monic square-free of degree
2g+1 or 2g+2 and c a nonzero scalar.  Even characteristic curves are
y^2 + h(x) y + f(x) = 0 with (h, f) passing the degree, smoothness and
smoothness-at-infinity tests.

Per curve only two numbers per degree d are needed: S_d, the sum of the
character (chi or tau) over the closed points of degree d, and T_d, the sum
of its square.  Every statistic used by the library is a function of the
vector (S_1..S_D, T_1..T_D), so the oracle aggregates a histogram of those
vectors and evaluates expressions on it.
"""
from __future__ import annotations

import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from gmpy2 import mpq

from . import fqpoly
from .field import BudgetExceeded, FiniteField, closed_points, extension, gf, gf_q
from .kernels import horner, poly_mul_rows, tau_stats
from .tuples import AExpr, BCExpr, CycleType, UTuple, mobius

CHUNK = 1 << 15


@dataclass(frozen=True)
class Budget:
    """Hard limits; exceeding one raises :class:`BudgetExceeded`."""

    max_curves: int = 20_000_000
    max_points: int = 1 << 22


DEFAULT_BUDGET = Budget()


def group_order(q: int, g: int, parity: str) -> int:
    """Order of the group acting on the representatives."""
    base = (q ** 3 - q) * (q - 1)
    return base * q ** (g + 2) if parity == "even" else base


# ---------------------------------------------------------------- coefficient arrays


def digit_rows(Q: int, L: int, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """Rows (c_0..c_{L-1}) for indices start..stop-1 with index = sum c_i Q^i."""
    stop = Q ** L if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(idx), L), dtype=np.int32)
    for i in range(L):
        out[:, i] = idx % Q
        idx //= Q
    return out


@lru_cache(maxsize=64)
def monic_squarefree(field: FiniteField, D: int) -> np.ndarray:
    """All monic square-free polynomials of degree D, shape (M, D+1), low degree first.

    Sieve: mark every m^2 * r with m monic of positive degree.
    """
    Q = field.Q
    if Q ** D > 1 << 27:
        raise BudgetExceeded(f"sieve over {Q}^{D} polynomials is too large")
    bad = np.zeros(Q ** D, dtype=bool)
    tab = field.tables()
    weights = Q ** np.arange(D, dtype=np.int64)
    for e in range(1, D // 2 + 1):
        m = np.concatenate([digit_rows(Q, e), np.ones((Q ** e, 1), dtype=np.int32)], axis=1)
        m2 = poly_mul_rows(m, m, tab)
        rdeg = D - 2 * e
        r = np.concatenate([digit_rows(Q, rdeg), np.ones((Q ** rdeg, 1), dtype=np.int32)], axis=1)
        for s in range(0, len(m2), max(1, CHUNK // max(1, len(r)))):
            block = m2[s:s + max(1, CHUNK // max(1, len(r)))]
            left = np.repeat(block, len(r), axis=0)
            right = np.tile(r, (len(block), 1))
            prod = poly_mul_rows(left, right, tab)
            bad[prod[:, :D].astype(np.int64) @ weights] = True
    good = np.nonzero(~bad)[0]
    rows = np.empty((len(good), D + 1), dtype=np.int32)
    idx = good.copy()
    for i in range(D):
        rows[:, i] = idx % Q
        idx //= Q
    rows[:, D] = 1
    return rows


# ---------------------------------------------------------------- per-degree evaluation data


@dataclass(frozen=True)
class DegreeSlice:
    d: int
    big: FiniteField
    emb: np.ndarray        # base code -> code in k_d
    points: np.ndarray     # closed points of exact degree d (codes in k_d), infinity excluded


@lru_cache(maxsize=None)
def degree_slice(field: FiniteField, d: int) -> DegreeSlice:
    big, emb = extension(field, d)
    return DegreeSlice(d, big, emb.astype(np.int32), closed_points(field, d).astype(np.int32))


def _eval_rows(coeffs: np.ndarray, sl: DegreeSlice) -> np.ndarray:
    if len(sl.points) == 0:
        return np.zeros((len(coeffs), 0), dtype=np.int32)
    return horner(sl.emb[coeffs], sl.points, sl.big.tables())


def _derivative_rows(coeffs: np.ndarray, p: int) -> np.ndarray:
    """Formal derivative, codes over a field of characteristic p."""
    L = coeffs.shape[1]
    out = np.zeros((coeffs.shape[0], max(L - 1, 1)), dtype=np.int32)
    for i in range(1, L):
        if i % p:
            if p == 2:
                out[:, i - 1] = coeffs[:, i]
            else:
                raise NotImplementedError("derivative rows only needed in characteristic 2")
    return out


# ---------------------------------------------------------------- curve objects


@dataclass(frozen=True)
class OddCurve:
    """y^2 = f(x); f(infinity) is the coefficient of x^(2g+2)."""

    field: FiniteField
    genus: int
    f: Tuple[int, ...]

    def value(self, m: int, x: Optional[int]) -> int:
        big, emb = extension(self.field, m)
        if x is None:
            return int(emb[self.f[2 * self.genus + 2]]) if len(self.f) > 2 * self.genus + 2 else 0
        return fqpoly.evaluate(big, [int(emb[c]) for c in self.f], x)

    def trace(self, m: int) -> int:
        big, _ = extension(self.field, m)
        s = sum(int(big.chi[self.value(m, x)]) for x in range(big.Q))
        s += int(big.chi[self.value(m, None)])
        return -s

    def count_points(self, m: int) -> int:
        """#C(k_m) by solving y^2 = f(x) for every x, plus the points over infinity."""
        big, _ = extension(self.field, m)
        roots = _square_roots_count(big)
        total = sum(int(roots[self.value(m, x)]) for x in range(big.Q))
        return total + int(roots[self.value(m, None)])


@dataclass(frozen=True)
class EvenCurve:
    """y^2 + h(x) y + f(x) = 0; h(inf), f(inf) are the coefficients of x^(g+1), x^(2g+2)."""

    field: FiniteField
    genus: int
    h: Tuple[int, ...]
    f: Tuple[int, ...]

    def values(self, m: int, x: Optional[int]) -> Tuple[int, int]:
        big, emb = extension(self.field, m)
        g = self.genus
        if x is None:
            hv = self.h[g + 1] if len(self.h) > g + 1 else 0
            fv = self.f[2 * g + 2] if len(self.f) > 2 * g + 2 else 0
            return int(emb[hv]), int(emb[fv])
        return (fqpoly.evaluate(big, [int(emb[c]) for c in self.h], x),
                fqpoly.evaluate(big, [int(emb[c]) for c in self.f], x))

    def trace(self, m: int) -> int:
        big, _ = extension(self.field, m)
        s = 0
        for x in list(range(big.Q)) + [None]:
            a, b = self.values(m, x)
            if a:
                s += 1 - 2 * int(big.trace[big.div(b, big.mul(a, a))])
        return -s

    def count_points(self, m: int) -> int:
        big, _ = extension(self.field, m)
        total = 0
        for x in list(range(big.Q)) + [None]:
            a, b = self.values(m, x)
            total += _count_quadratic(big, a, b)
        return total


@lru_cache(maxsize=None)
def _square_roots_count(F: FiniteField) -> np.ndarray:
    sq = F.mul_arr(np.arange(F.Q), np.arange(F.Q))
    return np.bincount(sq, minlength=F.Q)


def _count_quadratic(F: FiniteField, a: int, b: int) -> int:
    ys = np.arange(F.Q)
    v = F.add_arr(F.add_arr(F.mul_arr(ys, ys), F.mul_arr(ys, np.full(F.Q, a))), np.full(F.Q, b))
    return int((v == 0).sum())


# ---------------------------------------------------------------- enumeration


def count_candidates(q: int, g: int, parity: str) -> int:
    """Polynomials (or pairs) inspected before the validity filter."""
    if parity == "odd":
        return (q - 1) * (q ** (2 * g + 1) + q ** (2 * g + 2))
    return (q ** (g + 2) - 1) * q ** (2 * g + 3)


def _check(q, g, parity, budget: Budget):
    n = count_candidates(q, g, parity)
    if n > budget.max_curves:
        raise BudgetExceeded(f"{n} candidate curves at q={q}, g={g} ({parity}) exceed budget {budget.max_curves}")


def odd_shards(field: FiniteField, g: int) -> List[Tuple[int, int]]:
    """Shards (degree, top lower coefficient) of the monic part."""
    degs = [2 * g + 1, 2 * g + 2] if g >= 0 else [0]
    return [(D, c) for D in degs for c in (range(field.Q) if D > 0 else [0])]


def even_shards(field: FiniteField, g: int) -> List[Tuple[int, int]]:
    """Shards (h(inf), f(inf)): the top coefficients of h and f."""
    return [(a, b) for a in range(field.Q) for b in range(field.Q)]


def _odd_monic_rows(field: FiniteField, g: int, shard) -> np.ndarray:
    D, top = shard
    rows = monic_squarefree(field, D)
    if D > 0:
        rows = rows[rows[:, D - 1] == top]
    L = 2 * g + 3
    out = np.zeros((len(rows), max(L, 1)), dtype=np.int32)
    out[:, : D + 1] = rows
    return out


def _even_h_rows(field: FiniteField, g: int, top: int) -> np.ndarray:
    rows = digit_rows(field.Q, g + 2)
    rows = rows[rows[:, g + 1] == top]
    return rows[rows.any(axis=1)]


def _even_f_rows(field: FiniteField, g: int, top: int) -> np.ndarray:
    rows = digit_rows(field.Q, 2 * g + 3)
    return rows[rows[:, 2 * g + 2] == top]


def _degree(rows: np.ndarray) -> np.ndarray:
    nz = rows != 0
    L = rows.shape[1]
    last = L - 1 - np.argmax(nz[:, ::-1], axis=1)
    return np.where(nz.any(axis=1), last, -1)


def _even_valid(field: FiniteField, g: int, hrow: np.ndarray, frows: np.ndarray,
                hvals: Dict[int, np.ndarray], fvals: Dict[int, np.ndarray],
                hder: Dict[int, np.ndarray], fder: Dict[int, np.ndarray]) -> np.ndarray:
    """eq-deg, smoothness at finite points and at infinity for one h against many f."""
    degh = _degree(hrow[None, :])[0]
    degf = _degree(frows)
    ok = (degh == g + 1) | (degf >= 2 * g + 1)
    if hrow[g + 1] == 0:
        F = field
        t = F.add_arr(F.mul_arr(frows[:, 2 * g + 1], frows[:, 2 * g + 1]),
                      F.mul_arr(frows[:, 2 * g + 2], np.full(len(frows), F.mul(int(hrow[g]), int(hrow[g])))))
        ok &= t != 0
    # a common root of h and f'^2 + f h'^2 lives in degree <= deg h
    for d in range(1, max(degh, 0) + 1):
        sl = degree_slice(field, d)
        roots = np.nonzero(hvals[d] == 0)[0]
        for col in roots:
            big = sl.big
            hd = int(hder[d][col])
            w = big.add_arr(big.mul_arr(fder[d][:, col], fder[d][:, col]),
                            big.mul_arr(fvals[d][:, col], np.full(len(frows), big.mul(hd, hd))))
            ok &= w != 0
    return ok


def enumerate_Pg(field: FiniteField, g: int, parity: Optional[str] = None,
                 budget: Budget = DEFAULT_BUDGET, shard=None) -> Iterator:
    """Every representative curve, once.  ``shard`` restricts to one shard key."""
    parity = parity or ("even" if field.p == 2 else "odd")
    _check(field.Q, g, parity, budget)
    if parity == "odd":
        for sh in ([shard] if shard is not None else odd_shards(field, g)):
            rows = _odd_monic_rows(field, g, sh)
            for c in range(1, field.Q):
                for r in rows:
                    yield OddCurve(field, g, tuple(int(field.mul(c, int(x))) for x in r))
        return
    for sh in ([shard] if shard is not None else even_shards(field, g)):
        for h, frows, ok in _even_blocks(field, g, sh, need=max(g + 1, 1)):
            for fr in frows[ok]:
                yield EvenCurve(field, g, tuple(int(x) for x in h), tuple(int(x) for x in fr))


def _even_blocks(field: FiniteField, g: int, shard, need: int, with_values: bool = False):
    """Yield (h, f rows, valid mask[, hvals, fvals]) per h of one shard."""
    htop, ftop = shard
    hrows = _even_h_rows(field, g, htop)
    frows = _even_f_rows(field, g, ftop)
    hd = _derivative_rows(hrows, 2)
    fd = _derivative_rows(frows, 2)
    top = max(need, g + 1)
    hv, fv, hdv, fdv = {}, {}, {}, {}
    for d in range(1, top + 1):
        sl = degree_slice(field, d)
        hv[d] = _eval_rows(hrows, sl)
        fv[d] = _eval_rows(frows, sl)
        if d <= g + 1:
            hdv[d] = _eval_rows(hd, sl)
            fdv[d] = _eval_rows(fd, sl)
    for i, h in enumerate(hrows):
        ok = _even_valid(field, g, h, frows,
                         {d: hv[d][i] for d in hdv}, {d: fv[d] for d in hdv},
                         {d: hdv[d][i] for d in hdv}, fdv)
        if with_values:
            yield h, frows, ok, {d: hv[d][i] for d in hv}, fv
        else:
            yield h, frows, ok


# ---------------------------------------------------------------- statistics histograms


@dataclass
class StatHistogram:
    """Counts of curves per vector (S_1..S_D, T_1..T_D)."""

    q: int
    genus: int
    parity: str
    D: int
    counts: Counter = dc_field(default_factory=Counter)
    curves: int = 0
    elapsed_ms: float = 0.0

    @property
    def group_order(self) -> int:
        return group_order(self.q, self.genus, self.parity)

    def merge(self, other: "StatHistogram") -> None:
        self.counts.update(other.counts)
        self.curves += other.curves

    def traces(self) -> "TraceHistogram":
        th = TraceHistogram(self.q, self.genus, self.parity, self.D, Counter(), self.curves)
        for key, n in self.counts.items():
            th.counts[traces_from_stats(key, self.D)] += n
        return th

    def restrict(self, D: int) -> "StatHistogram":
        out = StatHistogram(self.q, self.genus, self.parity, D, Counter(), self.curves)
        for key, n in self.counts.items():
            out.counts[key[:D] + key[self.D:self.D + D]] += n
        return out

    def brute_bc(self, expr: BCExpr) -> mpq:
        need = max([N for N, _ in expr.b + expr.c] or [1])
        if need > self.D:
            raise ValueError(f"histogram only has degrees up to {self.D}")
        total = 0
        for key, n in self.counts.items():
            S, T = key[: self.D], key[self.D:]
            v = n
            for N, R in expr.b:
                v *= (N * (T[N - 1] + S[N - 1]) // 2) ** R
            for N, R in expr.c:
                v *= (N * (T[N - 1] - S[N - 1]) // 2) ** R
            total += v
        return mpq(total, self.group_order)


def traces_from_stats(key, D: int) -> Tuple[int, ...]:
    S, T = key[:D], key[D:]
    out = []
    for m in range(1, D + 1):
        a = 0
        for d in sympy.divisors(m):
            a -= d * (S[d - 1] if (m // d) % 2 else T[d - 1])
        out.append(a)
    return tuple(out)


@dataclass
class TraceHistogram:
    """Counts of curves per trace vector (a_1..a_D)."""

    q: int
    genus: int
    parity: str
    D: int
    counts: Counter = dc_field(default_factory=Counter)
    curves: int = 0

    @property
    def group_order(self) -> int:
        return group_order(self.q, self.genus, self.parity)

    def brute_a(self, expr: AExpr) -> mpq:
        if expr.powers and expr.powers[-1][0] > self.D:
            raise ValueError(f"histogram only has traces up to a_{self.D}")
        total = 0
        for a, n in self.counts.items():
            v = n
            for N, R in expr.powers:
                v *= a[N - 1] ** R
            total += v
        return mpq(total, self.group_order)

    def brute_fixed_points(self, sigma: CycleType) -> mpq:
        if sigma.parts and sigma.parts[0] > self.D:
            raise ValueError(f"histogram only has traces up to a_{self.D}")
        q = self.q
        total = 0
        for a, n in self.counts.items():
            v = n
            for N, R in sigma.multiplicities:
                pts = sum(mobius(N // d) * (1 + q ** d - a[d - 1]) for d in sympy.divisors(N))
                for j in range(R):
                    v *= pts - j * N
            total += v
        return mpq(total, self.group_order)


def _odd_shard_hist(args) -> StatHistogram:
    q, g, D, shard = args
    field = gf_q(q)
    hist = StatHistogram(q, g, "odd", D)
    rows = _odd_monic_rows(field, g, shard)
    if len(rows) == 0:
        return hist
    # chi_d(c) for each scalar; scalars with the same factor vector behave identically
    factor_groups = Counter()
    for c in range(1, field.Q):
        fac = tuple(int(degree_slice(field, d).big.chi[degree_slice(field, d).emb[c]]) for d in range(1, D + 1))
        factor_groups[fac] += 1
    for s in range(0, len(rows), CHUNK):
        block = rows[s:s + CHUNK]
        S = np.zeros((len(block), D), dtype=np.int64)
        T = np.zeros((len(block), D), dtype=np.int64)
        for d in range(1, D + 1):
            sl = degree_slice(field, d)
            vals = _eval_rows(block, sl)
            chi = sl.big.chi[vals].astype(np.int64)
            if d == 1:
                inf = block[:, 2 * g + 2] if block.shape[1] > 2 * g + 2 else np.zeros(len(block), dtype=np.int32)
                chi = np.concatenate([chi, field.chi[inf].astype(np.int64)[:, None]], axis=1)
            S[:, d - 1] = chi.sum(axis=1)
            T[:, d - 1] = (chi != 0).sum(axis=1)
        for fac, mult in factor_groups.items():
            keys = np.concatenate([S * np.array(fac, dtype=np.int64)[None, :], T], axis=1)
            uniq, cnt = np.unique(keys, axis=0, return_counts=True)
            for k, n in zip(map(tuple, uniq.tolist()), cnt.tolist()):
                hist.counts[k] += n * mult
        hist.curves += len(block) * (field.Q - 1)
    return hist


def _even_shard_hist(args) -> StatHistogram:
    q, g, D, shard = args
    field = gf_q(q)
    hist = StatHistogram(q, g, "even", D)
    ftop = shard[1]
    for h, frows, ok, hv, fv in _even_blocks(field, g, shard, need=D, with_values=True):
        if not ok.any():
            continue
        S = np.zeros((int(ok.sum()), D), dtype=np.int64)
        T = np.zeros_like(S)
        for d in range(1, D + 1):
            sl = degree_slice(field, d)
            hrow = hv[d]
            fsub = fv[d][ok]
            if d == 1:
                hrow = np.concatenate([hrow, [h[g + 1]]]).astype(np.int32)
                fsub = np.concatenate([fsub, np.full((len(fsub), 1), ftop, dtype=np.int32)], axis=1)
            big = sl.big
            s, t = tau_stats(hrow, fsub, big.log, big.exp, big.trace, big.qm1)
            S[:, d - 1] = s
            T[:, d - 1] = t
        keys = np.concatenate([S, T], axis=1)
        uniq, cnt = np.unique(keys, axis=0, return_counts=True)
        for k, n in zip(map(tuple, uniq.tolist()), cnt.tolist()):
            hist.counts[k] += n
        hist.curves += int(ok.sum())
    return hist


_HIST_CACHE: Dict[Tuple[int, int, str], StatHistogram] = {}


def stat_histogram(field: FiniteField, g: int, D: int, parity: Optional[str] = None,
                   budget: Budget = DEFAULT_BUDGET, jobs: int = 1) -> StatHistogram:
    """Histogram of (S, T) vectors over all representatives of genus g.

    Shards are independent; with jobs > 1 they run in worker processes and
    the exact integer counts are merged afterwards, so the result does not
    depend on scheduling.
    """
    parity = parity or ("even" if field.p == 2 else "odd")
    if (parity == "even") != (field.p == 2):
        raise ValueError(f"{parity} parity does not match {field}")
    if g < 0:
        raise ValueError("enumeration needs genus >= 0")
    key = (field.Q, g, parity)
    cached = _HIST_CACHE.get(key)
    if cached is not None and cached.D >= D:
        return cached.restrict(D) if cached.D > D else cached
    _check(field.Q, g, parity, budget)
    if field.Q ** D + 1 > budget.max_points:
        raise BudgetExceeded(f"points of degree {D} over GF({field.Q}) exceed budget")
    start = time.perf_counter()
    shards = odd_shards(field, g) if parity == "odd" else even_shards(field, g)
    work = _odd_shard_hist if parity == "odd" else _even_shard_hist
    args = [(field.Q, g, D, sh) for sh in shards]
    total = StatHistogram(field.Q, g, parity, D)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for part in ex.map(work, args):
                total.merge(part)
    else:
        for a in args:
            total.merge(work(a))
    total.elapsed_ms = (time.perf_counter() - start) * 1000
    _HIST_CACHE[key] = total
    return total


# ---------------------------------------------------------------- genus one


def genus1_a1_histogram(field: FiniteField) -> Counter:
    """a_1 -> number of curves y^2 = c f(x), f monic square-free of degree 3 or 4."""
    if field.p == 2:
        raise ValueError("the genus-1 histogram uses odd characteristic models")
    monic = Counter()
    pts = np.arange(field.Q, dtype=np.int32)
    tab = field.tables()
    for D in (3, 4):
        rows = monic_squarefree(field, D)
        for s in range(0, len(rows), CHUNK * 4):
            block = rows[s:s + CHUNK * 4]
            vals = horner(block, pts, tab)
            a1 = -field.chi[vals].astype(np.int64).sum(axis=1) - (1 if D == 4 else 0)
            u, c = np.unique(a1, return_counts=True)
            for t, n in zip(u.tolist(), c.tolist()):
                monic[t] += n
    out = Counter()
    for c in range(1, field.Q):
        sign = int(field.chi[c])
        for t, n in monic.items():
            out[sign * t] += n
    return out


def newton_traces(a1: int, q: int, D: int) -> Tuple[int, ...]:
    """a_1..a_D of an elliptic curve from a_1, via a_m = a_1 a_{m-1} - q a_{m-2}."""
    prev, cur = 2, a1
    out = [a1]
    for _ in range(2, D + 1):
        prev, cur = cur, a1 * cur - q * prev
        out.append(cur)
    return tuple(out)


@lru_cache(maxsize=None)
def genus1_trace_histogram(q: int, D: int = 7) -> TraceHistogram:
    field = gf_q(q)
    th = TraceHistogram(q, 1, "odd", D)
    for t, n in genus1_a1_histogram(field).items():
        th.counts[newton_traces(t, q, D)] += n
        th.curves += n
    return th


# ---------------------------------------------------------------- public oracle entry points


def _parity_of(field: FiniteField, parity: Optional[str]) -> str:
    p = "even" if field.p == 2 else "odd"
    if parity is not None and parity != p:
        raise ValueError(f"{parity} parity does not match {field}")
    return p


def brute_a(expr: AExpr, field: FiniteField, genus: int, parity: Optional[str] = None,
            budget: Budget = DEFAULT_BUDGET, jobs: int = 1) -> mpq:
    """(1/|G|) * sum over representatives of prod a_N(C)^R."""
    parity = _parity_of(field, parity)
    D = max([N for N, _ in expr.powers] or [1])
    if genus == 1 and parity == "odd":
        return genus1_trace_histogram(field.Q, max(D, 1)).brute_a(expr)
    return stat_histogram(field, genus, D, parity, budget, jobs).traces().brute_a(expr)


def brute_bc(expr: BCExpr, field: FiniteField, genus: int, parity: Optional[str] = None,
             budget: Budget = DEFAULT_BUDGET, jobs: int = 1) -> mpq:
    parity = _parity_of(field, parity)
    D = max([N for N, _ in expr.b + expr.c] or [1])
    return stat_histogram(field, genus, D, parity, budget, jobs).brute_bc(expr)


def brute_fixed_points(field: FiniteField, genus: int, sigma: CycleType, parity: Optional[str] = None,
                       budget: Budget = DEFAULT_BUDGET, jobs: int = 1) -> mpq:
    parity = _parity_of(field, parity)
    D = max(sigma.parts or (1,))
    return stat_histogram(field, genus, D, parity, budget, jobs).traces().brute_fixed_points(sigma)


def point_values(field: FiniteField, g: int, parity: str, D: int, budget: Budget = DEFAULT_BUDGET):
    """Yield (weight, {d: values (B, #closed points of degree d)}) batches.

    Values are chi (odd) or tau (even) at each closed point; for d = 1 the
    last column is infinity.
    """
    _check(field.Q, g, parity, budget)
    if parity == "odd":
        for sh in odd_shards(field, g):
            rows = _odd_monic_rows(field, g, sh)
            if len(rows) == 0:
                continue
            vals = {}
            for d in range(1, D + 1):
                sl = degree_slice(field, d)
                chi = sl.big.chi[_eval_rows(rows, sl)].astype(np.int64)
                if d == 1:
                    inf = rows[:, 2 * g + 2] if rows.shape[1] > 2 * g + 2 else np.zeros(len(rows), dtype=np.int32)
                    chi = np.concatenate([chi, field.chi[inf].astype(np.int64)[:, None]], axis=1)
                vals[d] = chi
            for c in range(1, field.Q):
                scaled = {d: v * int(degree_slice(field, d).big.chi[degree_slice(field, d).emb[c]])
                          for d, v in vals.items()}
                yield 1, scaled
        return
    for sh in even_shards(field, g):
        for h, frows, ok, hv, fv in _even_blocks(field, g, sh, need=D, with_values=True):
            if not ok.any():
                continue
            vals = {}
            for d in range(1, D + 1):
                big = degree_slice(field, d).big
                hrow = hv[d]
                fsub = fv[d][ok]
                if d == 1:
                    hrow = np.concatenate([hrow, [h[g + 1]]])
                    fsub = np.concatenate([fsub, np.full((len(fsub), 1), sh[1])], axis=1)
                e = (big.log[fsub].astype(np.int64) - 2 * big.log[hrow].astype(np.int64)[None, :]) % big.qm1
                tau = np.where(fsub == 0, 1, 1 - 2 * big.trace[big.exp[e]].astype(np.int64))
                vals[d] = np.where(hrow[None, :] == 0, 0, tau)
            yield 1, vals


def brute_u(tup: UTuple, field: FiniteField, genus: int, parity: Optional[str] = None,
            budget: Budget = DEFAULT_BUDGET) -> mpq:
    """(1/|G|) sum over curves and over A(n_1..n_m) of prod chi^(r_i).

    The sum over A runs over ordered tuples of distinct closed points; each
    closed point of degree n stands for n points of A, hence the factor prod n_i.
    """
    parity = _parity_of(field, parity)
    if genus < 0:
        raise ValueError("brute_u needs genus >= 0")
    slots = list(tup.slots)
    D = max([n for n, _ in slots] or [1])
    size = 1
    for n, _ in slots:
        size *= len(closed_points(field, n)) + (1 if n == 1 else 0)
    if size > budget.max_points:
        raise BudgetExceeded(f"{size} point tuples exceed budget")
    total = 0
    for weight, vals in point_values(field, genus, parity, D, budget):
        B = next(iter(vals.values())).shape[0]

        def rec(i, used, acc):
            if i == len(slots):
                return acc.sum()
            n, r = slots[i]
            v = vals[n]
            s = 0
            for col in range(v.shape[1]):
                if (n, col) in used:
                    continue
                x = v[:, col] if r == 1 else v[:, col] ** 2
                used.add((n, col))
                s += rec(i + 1, used, acc * x)
                used.discard((n, col))
            return s

        total += weight * int(rec(0, set(), np.ones(B, dtype=np.int64)))
    mult = 1
    for n, _ in slots:
        mult *= n
    return mpq(total * mult, group_order(field.Q, genus, parity))


# ---------------------------------------------------------------- even characteristic class probe


@dataclass
class ProbeReport:
    q: int
    genus: int
    classes: int
    class_size_ok: bool
    expected_class_size: int
    vz_total: Optional[int] = None
    vz_disjoint: Optional[bool] = None
    vz_cover: Optional[bool] = None
    reform_triples: int = 0
    reform_ok: Optional[bool] = None

    @property
    def ok(self) -> bool:
        flags = [self.class_size_ok, self.vz_disjoint, self.vz_cover, self.reform_ok]
        return all(f for f in flags if f is not None)


def _Q_pairs(F: FiniteField, g: int):
    hs = [h for h in fqpoly.all_polys(F, g + 1) if h]
    fs = list(fqpoly.all_polys(F, 2 * g + 2))
    return hs, fs


def _shift(F, h, f, l):
    return fqpoly.add(F, fqpoly.add(F, f, fqpoly.mul(F, h, l)), fqpoly.mul(F, l, l))


def _class_key(F, g, h, f, ls):
    return (tuple(h), min(tuple(_shift(F, h, f, l)) for l in ls))


def in_Pg_even(F: FiniteField, g: int, h, f) -> bool:
    """The three defining conditions, checked with gcds."""
    if not h:
        return False
    dh, df = fqpoly.deg(h), fqpoly.deg(f)
    if dh > g + 1 or df > 2 * g + 2:
        return False
    if not (2 * g + 1 <= max(2 * dh, df) <= 2 * g + 2):
        return False
    hp, fp = fqpoly.derivative(F, h), fqpoly.derivative(F, f)
    w = fqpoly.add(F, fqpoly.mul(F, fp, fp), fqpoly.mul(F, f, fqpoly.mul(F, hp, hp)))
    if fqpoly.deg(fqpoly.gcd(F, h, w)) > 0:
        return False
    hinf = [h[g + 1 - i] if 0 <= g + 1 - i < len(h) else 0 for i in range(g + 2)]
    finf = [f[2 * g + 2 - i] if 0 <= 2 * g + 2 - i < len(f) else 0 for i in range(2 * g + 3)]
    hinf, finf = fqpoly.trim(hinf), fqpoly.trim(finf)
    hp, fp = fqpoly.derivative(F, hinf), fqpoly.derivative(F, finf)
    w = fqpoly.add(F, fqpoly.mul(F, fp, fp), fqpoly.mul(F, finf, fqpoly.mul(F, hp, hp)))
    gg = fqpoly.gcd(F, hinf, w) if (hinf or w) else []
    divisible_by_t = (not gg) or gg[0] == 0
    return not divisible_by_t


def reform_criteria(F: FiniteField, g: int, h, f, m) -> Tuple[bool, bool]:
    """Both sides of the divisibility equivalence for irreducible m."""
    hp, fp = fqpoly.derivative(F, h), fqpoly.derivative(F, f)
    w = fqpoly.add(F, fqpoly.mul(F, fp, fp), fqpoly.mul(F, f, fqpoly.mul(F, hp, hp)))
    first = fqpoly.divides(F, m, h) and fqpoly.divides(F, m, w)
    second = False
    if fqpoly.divides(F, m, h):
        m2 = fqpoly.mul(F, m, m)
        for l in fqpoly.all_polys(F, g + 1):
            if fqpoly.divides(F, m2, _shift(F, h, f, l)):
                second = True
                break
    return first, second


def equivalence_class_probe(field: FiniteField, genus: int, check_cover: bool = True,
                            check_reform: bool = True, budget: int = 200_000) -> ProbeReport:
    """Exhaustive check of the class structure on pairs (h, f) of genus ``genus``."""
    F = field
    if F.p != 2:
        raise ValueError("the class probe is for characteristic 2")
    g = genus
    size = (F.Q ** (g + 2)) * F.Q ** (2 * g + 3) * F.Q ** (g + 2)
    if size > budget * 64:
        raise BudgetExceeded(f"class probe at q={F.Q}, g={g} is too large")
    hs, fs = _Q_pairs(F, g)
    ls = list(fqpoly.all_polys(F, g + 1))
    classes: Dict[tuple, set] = {}
    for h in hs:
        for f in fs:
            classes.setdefault(_class_key(F, g, h, f, ls), set()).add((tuple(h), tuple(f)))
    expected = F.Q ** (g + 2) // 2
    rep = ProbeReport(F.Q, g, len(classes), all(len(c) == expected for c in classes.values()), expected)
    if check_cover:
        covered = []
        for i in range(-1, g + 1):
            li = list(fqpoly.all_polys(F, i + 1))
            zs = set()
            for h in (h for h in fqpoly.all_polys(F, i + 1) if h):
                for f in fqpoly.all_polys(F, 2 * i + 2):
                    if in_Pg_even(F, i, h, f):
                        zs.add(_class_key(F, i, h, f, li))
            ms = [m for e in range(0, g - i + 1) for m in fqpoly.monic_polys(F, e)]
            for zh, zf in zs:
                vz = set()
                for m in ms:
                    mh = fqpoly.mul(F, m, list(zh))
                    mf = fqpoly.mul(F, fqpoly.mul(F, m, m), list(zf))
                    vz.add(_class_key(F, g, mh, mf, ls))
                covered.append(vz)
        union = set().union(*covered) if covered else set()
        rep.vz_total = sum(len(v) for v in covered)
        rep.vz_disjoint = rep.vz_total == len(union)
        rep.vz_cover = union == set(classes)
    if check_reform:
        irr = [m for e in range(1, g + 2) for m in fqpoly.irreducibles(F, e)]
        ok = True
        n = 0
        for h in hs:
            for f in fs:
                for m in irr:
                    a, b = reform_criteria(F, g, h, f, m)
                    ok &= a == b
                    n += 1
        rep.reform_triples = n
        rep.reform_ok = ok
    return rep
