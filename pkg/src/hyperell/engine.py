"""Symbolic evaluation of u-tuples and trace moments for every genus.

Values are kept internally as numerators over the common denominator q^3 - q:
the genus -1 constant J = |A| / (q^3 - q) has that denominator and every
recursion step only multiplies by polynomials, so nothing else ever appears.
"""
from __future__ import annotations

import json
import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb, lcm
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy
from gmpy2 import mpq

from .curves import genus1_trace_histogram
from .qpoly import (ClosedForm, QPoly, QRat, SingularSystem, interpolate_poly, parse_qrat, qpow,
                    solve_linear)
from .tuples import (A0, AExpr, CycleType, UTuple, all_aexprs, bhat_poly, char_poly, decompose_a,
                     general_case, genus0_reduce, orbit_count_poly, parse_aexpr, parse_tuple,
                     partitions, sigma_moment_poly)

log = logging.getLogger(__name__)

ENGINE_VERSION = "1"
PARITIES = ("odd", "even")
DEN = QPoly([0, -1, 0, 1])  # q^3 - q
GENUS1_FIELDS = (3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31, 37)
GENUS1_DEGREE = 10
GENUS1_VALIDATION = 3


class UnsupportedBaseCase(RuntimeError):
    """A genus-1 value is needed that the sampled table cannot provide."""


class NotPolynomial(ArithmeticError):
    pass


def _check_parity(parity: str) -> str:
    if parity not in PARITIES:
        raise ValueError(f"parity must be 'odd' or 'even', got {parity!r}")
    return parity


def _bhat(tup: UTuple, j: int) -> QPoly:
    n = tup.degree
    if j < 0:
        return QPoly()
    if n == 0:
        return QPoly([1] * (j + 1))
    if j >= n - 1:
        return _bhat_small(tup, n - 1) * QPoly.monomial(j + 1 - n)
    return _bhat_small(tup, j)


_BHAT: Dict[Tuple[UTuple, int], QPoly] = {}


def _bhat_small(tup: UTuple, j: int) -> QPoly:
    key = (tup, j)
    if key not in _BHAT:
        _BHAT[key] = bhat_poly(tup, j)
    return _BHAT[key]


def _threshold(tup: UTuple) -> int:
    # ceil((n - 3) / 2)
    return -((3 - tup.degree) // 2)


def _to_num(value: QRat) -> QPoly:
    num = value * QRat(DEN)
    if not num.is_poly():
        raise ValueError(f"{value} does not have denominator dividing q^3 - q")
    return num.as_poly()


# ---------------------------------------------------------------- genus one table


@dataclass
class GenusOneTable:
    """a-moments at genus 1 as polynomials in q, re-derived from point counts."""

    entries: Dict[AExpr, QPoly]
    fields: Tuple[int, ...] = GENUS1_FIELDS
    degree_bound: int = GENUS1_DEGREE
    validation: int = GENUS1_VALIDATION
    max_weight: int = 7

    def __getitem__(self, expr: AExpr) -> QPoly:
        if expr.weight % 2:
            return QPoly()
        if expr not in self.entries:
            raise UnsupportedBaseCase(f"no genus-1 entry for {expr}")
        return self.entries[expr]

    def __contains__(self, expr):
        return expr in self.entries

    def to_records(self) -> List[dict]:
        prov = {"fields": list(self.fields), "degree_bound": self.degree_bound,
                "validation": self.validation, "max_weight": self.max_weight}
        return [{"key": {"expr": e.render(), "g": 1, "parity": "any"}, "value": p.render(),
                 "engine_version": ENGINE_VERSION, "provenance": prov}
                for e, p in sorted(self.entries.items(), key=lambda kv: (kv[0].weight, kv[0].powers))]

    @classmethod
    def from_records(cls, records: Sequence[dict]) -> "GenusOneTable":
        entries = {}
        prov = {}
        for r in records:
            entries[parse_aexpr(r["key"]["expr"])] = parse_qrat(r["value"]).as_poly()
            prov = r.get("provenance", prov)
        return cls(entries, tuple(prov.get("fields", GENUS1_FIELDS)), prov.get("degree_bound", GENUS1_DEGREE),
                   prov.get("validation", GENUS1_VALIDATION), prov.get("max_weight", 7))


def _genus1_samples(q: int, exprs: Tuple[AExpr, ...]) -> List[mpq]:
    hist = genus1_trace_histogram(q, 7)
    return [hist.brute_a(e) for e in exprs]


def build_genus1_table(max_weight: int = 7, fields: Sequence[int] = GENUS1_FIELDS,
                       degree_bound: int = GENUS1_DEGREE, validation: int = GENUS1_VALIDATION,
                       jobs: int = 1) -> GenusOneTable:
    """Sample genus-1 moments over odd fields and interpolate with held-out checks."""
    if max_weight > 7:
        raise ValueError("genus-1 histograms carry traces up to a_7")
    if any(q % 2 == 0 for q in fields):
        raise ValueError("genus-1 sampling uses odd fields only")
    if len(fields) < degree_bound + 1 + validation:
        raise ValueError("not enough fields for the degree bound plus validation points")
    exprs = tuple(e for e in all_aexprs(max_weight) if e.weight % 2 == 0)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_genus1_samples, fields, [exprs] * len(fields)))
    else:
        rows = [_genus1_samples(q, exprs) for q in fields]
    entries = {}
    for i, e in enumerate(exprs):
        samples = [(q, row[i]) for q, row in zip(fields, rows)]
        entries[e] = interpolate_poly(samples, degree_bound, validation)
    return GenusOneTable(entries, tuple(fields), degree_bound, validation, max_weight)


# ---------------------------------------------------------------- engine


class Engine:
    """Memoised evaluator for one or both parities.

    ``cache_dir`` enables the on-disk cache (u-values and the genus-1 table).
    ``genus1_table`` may be supplied directly, otherwise it is loaded from the
    cache or built on first use.
    """

    def __init__(self, cache_dir: Optional[Union[str, Path]] = None,
                 genus1_table: Optional[GenusOneTable] = None, jobs: int = 1):
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.jobs = jobs
        self._genus1 = genus1_table
        self._seq: Dict[Tuple[UTuple, str], List[QPoly]] = {}
        self._acc: Dict[Tuple[UTuple, str], List[QPoly]] = {}
        self._dirty = False
        if self.cache_dir:
            self._load()

    # -- cache
    def _memo_path(self) -> Path:
        return self.cache_dir / "u_values.jsonl"

    def _genus1_path(self) -> Path:
        return self.cache_dir / "genus1_table.jsonl"

    @staticmethod
    def _read_jsonl(path: Path) -> Optional[List[dict]]:
        if not path.exists():
            return None
        records = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
        if any(r.get("engine_version") != ENGINE_VERSION for r in records):
            log.info("discarding %s: engine version changed", path)
            return None
        return records

    def _load(self) -> None:
        records = self._read_jsonl(self._memo_path()) or []
        by_key: Dict[Tuple[UTuple, str], Dict[int, QPoly]] = {}
        for r in records:
            k = r["key"]
            by_key.setdefault((parse_tuple(k["tuple"]), k["parity"]), {})[k["g"]] = _to_num(parse_qrat(r["value"]))
        for key, vals in by_key.items():
            seq = []
            while len(seq) - 1 in vals:
                seq.append(vals[len(seq) - 1])
            if seq:
                self._seq[key] = seq
        if self._genus1 is None:
            g1 = self._read_jsonl(self._genus1_path())
            if g1:
                self._genus1 = GenusOneTable.from_records(g1)

    def save(self) -> None:
        """Write the memo (sorted, one JSON object per line) if a cache is configured."""
        if not self.cache_dir:
            return
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        lines = []
        for (tup, parity), seq in self._seq.items():
            for i, num in enumerate(seq):
                rec = {"key": {"tuple": tup.render(), "g": i - 1, "parity": parity},
                       "value": QRat(num, DEN).render(), "engine_version": ENGINE_VERSION,
                       "provenance": "recursion"}
                lines.append(json.dumps(rec, sort_keys=True))
        lines.sort()
        tmp = self._memo_path().with_suffix(".tmp")
        tmp.write_text("\n".join(lines) + ("\n" if lines else ""))
        os.replace(tmp, self._memo_path())
        if self._genus1 is not None:
            g1 = [json.dumps(r, sort_keys=True) for r in self._genus1.to_records()]
            self._genus1_path().write_text("\n".join(sorted(g1)) + "\n")

    # -- genus one
    @property
    def genus1_table(self) -> GenusOneTable:
        if self._genus1 is None:
            log.info("building the genus-1 table (one-off, cached afterwards)")
            self._genus1 = build_genus1_table(jobs=self.jobs)
            self.save()
        return self._genus1

    @genus1_table.setter
    def genus1_table(self, table: GenusOneTable) -> None:
        self._genus1 = table

    def genus1_u(self, tup: UTuple, parity: str) -> QPoly:
        """u_1 of a general-case tuple from the genus-1 moment table."""
        _check_parity(parity)
        if tup.degree < 6 or tup.rflag != 1:
            raise ValueError("genus1_u is only defined for r = 1 tuples of degree >= 6")
        if any(r != 1 for _, r in tup.slots):
            raise UnsupportedBaseCase(f"no genus-1 source for {tup}: it mixes exponents 1 and 2")
        expr = AExpr.of(Counter(tup.degrees).items())
        dec = decompose_a(expr)
        own = dec[tup]
        if own == 0:
            raise UnsupportedBaseCase(f"{tup} is not the general case of {expr}")
        rest = QRat(QPoly())
        for t, c in dec.items():
            if t != tup:
                rest = rest + self.u_value(t, 1, parity) * c
        val = (QRat(self.genus1_table[expr]) - rest) * (1 / own)
        return val.as_poly()

    # -- recursion
    def _rhs(self, tup: UTuple, g: int, parity: str) -> QPoly:
        """Right-hand side numerator (times q^3 - q) of the full-history recursion."""
        if tup.rflag == 1:
            return QPoly()
        orbit = orbit_count_poly(tup.degrees)
        if parity == "odd":
            return orbit * _bhat(tup, 2 * g + 2)
        return orbit * QPoly.monomial(g + 1) * _bhat(tup, g + 1)

    def _history(self, tup: UTuple, parity: str, g: int) -> QPoly:
        """sum_{j=1}^{g+1} bhat_j u_{g-j}, with a running sum for the geometric tail."""
        seq = self._seq[(tup, parity)]
        n = tup.degree
        if n == 0:
            acc = QPoly()
            for j in range(1, g + 2):
                acc = acc + _bhat(tup, j) * seq[g - j + 1]
            return acc
        j0 = max(1, n - 1)
        acc = QPoly()
        for j in range(1, min(j0, g + 2)):
            acc = acc + _bhat_small(tup, j) * seq[g - j + 1]
        # W_g = sum_{k=-1}^{g-j0} q^{g-k+1-n} u_k
        tails = self._acc.setdefault((tup, parity), [])
        while len(tails) <= g + 1:
            gg = len(tails) - 1
            prev = tails[-1] if tails else QPoly()
            w = prev * QPoly.monomial(1)
            if gg - j0 >= -1:
                w = w + seq[gg - j0 + 1] * QPoly.monomial(j0 + 1 - n)
            tails.append(w)
        return acc + tails[g + 1] * _bhat_small(tup, n - 1)

    def _extend(self, tup: UTuple, parity: str, g: int) -> None:
        key = (tup, parity)
        seq = self._seq.setdefault(key, [])
        thr = _threshold(tup)
        while len(seq) <= g + 1:
            gg = len(seq) - 1
            if gg == -1:
                val = orbit_count_poly(tup.degrees)
            elif tup.rflag == 1 and gg == 0:
                val = QPoly()
                for t, c in genus0_reduce(tup).items():
                    val = val + self._num(t, 0, parity) * c
            elif tup.rflag == 1 and gg < thr:
                if gg != 1:
                    raise UnsupportedBaseCase(f"{tup} needs a genus-{gg} base case")
                val = self.genus1_u(tup, parity) * DEN
            else:
                val = self._rhs(tup, gg, parity) - self._history(tup, parity, gg)
            seq.append(val)
            self._dirty = True

    def _num(self, tup: UTuple, g: int, parity: str) -> QPoly:
        if tup.weight % 2:
            return QPoly()
        self._extend(tup, parity, g)
        return self._seq[(tup, parity)][g + 1]

    def u_value(self, tup: UTuple, g: int, parity: str) -> QRat:
        _check_parity(parity)
        if g < -1:
            raise ValueError("genus must be >= -1")
        return QRat(self._num(tup, g, parity), DEN)

    def u_values(self, tup: UTuple, g_max: int, parity: str) -> List[QRat]:
        """u_{-1}, ..., u_{g_max}."""
        return [self.u_value(tup, g, parity) for g in range(-1, g_max + 1)]

    def a_value(self, expr: AExpr, g: int, parity: str) -> QRat:
        _check_parity(parity)
        if expr.weight % 2:
            return QRat(QPoly())
        acc = QPoly()
        for t, c in decompose_a(expr).items():
            acc = acc + self._num(t, g, parity) * c
        val = QRat(acc, DEN)
        if g >= 1 and expr.weight <= 7 and not val.is_poly():
            raise NotPolynomial(f"{expr} at genus {g} ({parity}) is {val}, not a polynomial")
        return val

    # -- closed forms
    def _values_fn(self, target, parity):
        if isinstance(target, UTuple):
            return (lambda g: self.u_value(target, g, parity)), -1
        if isinstance(target, AExpr):
            return (lambda g: self.a_value(target, g, parity)), 0
        raise TypeError("closed_form takes a UTuple or an AExpr")

    @staticmethod
    def _shape(target) -> Tuple[int, int, List[int]]:
        """(period, polynomial degree bound, lambda exponents) from the characteristic polynomial."""
        if isinstance(target, AExpr):
            parts = [N for N, R in target.powers for _ in range(R)]
        else:
            parts = list(target.degrees)
        period = lcm(*parts) if parts else 1
        deg = 0
        for k in sympy.divisors(period):
            mult = sum(1 for N in parts if N % k == 0) - (1 if k == 1 else 0)
            deg = max(deg, mult)
        return period, deg, parts

    def closed_form(self, target, parity: str, extra: int = 30) -> ClosedForm:
        """Fit geometric*q^(2g) + periodic polynomials in g, then verify.

        Raises SingularSystem if the fit fails and ArithmeticError if the fitted
        form disagrees with the recursion.
        """
        _check_parity(parity)
        value, floor = self._values_fn(target, parity)
        P, D, parts = self._shape(target)
        g0 = max(sum(parts), 1) + 1
        q2P = qpow(2 * P)
        if D == 0:
            geo = value(g0) / qpow(2 * g0)
        else:
            acc = QRat(QPoly())
            for k in range(D + 1):
                acc = acc + value(g0 + k * P) * (comb(D, k) * (-1) ** (D - k))
            geo = acc / (qpow(2 * g0) * (q2P - 1) ** D)
        residues = []
        for r in range(P):
            if D == 0:
                residues.append(())
                continue
            start = g0 + (r - g0) % P
            gs = [start + i * P for i in range(D)]
            matrix = [[g ** k for k in range(D)] for g in gs]
            rhs = [value(g) - geo * qpow(2 * g) for g in gs]
            coeffs = solve_linear(matrix, rhs)
            residues.append(tuple(coeffs))
        last = g0 + P * (D + 1) + extra
        cf = ClosedForm(geo, P, tuple(residues), g0, last)
        for g in range(g0, last + 1):
            if cf(g) != value(g):
                raise ArithmeticError(f"closed form for {target} disagrees with the recursion at g={g}")
        g_min = g0
        while g_min - 1 >= floor:
            g = g_min - 1
            trial = ClosedForm(geo, P, tuple(residues), g, last)
            if trial(g) != value(g):
                break
            g_min = g
        return ClosedForm(geo, P, tuple(residues), g_min, last)

    def recursion_certificate(self, target, parity: str, cf: Optional[ClosedForm] = None,
                              count: int = 30) -> bool:
        """char_poly(E) applied to the values equals geometric * char_poly(q^2) * q^(2g).

        Checked for ``count`` consecutive genera from the closed form's threshold.
        """
        value, _ = self._values_fn(target, parity)
        cf = cf or self.closed_form(target, parity)
        cp = char_poly(target)
        cq2 = QRat(_compose_q2(cp))
        for g in range(cf.g_min, cf.g_min + count):
            lhs = QRat(QPoly())
            for k, c in enumerate(cp.c):
                if c:
                    lhs = lhs + value(g + k) * c
            if lhs != cf.geometric * cq2 * qpow(2 * g):
                return False
        return True

    def window_residual(self, tup: UTuple, g: int, parity: str) -> QRat:
        """LHS - RHS of the finite-window recursion (rec1 at g minus q times rec1 at g-1).

        Coefficients are bhat_j - q bhat_{j-1}, which vanish for j >= n.  Zero
        whenever the full-history recursion holds at both g and g-1.
        """
        n = tup.degree
        if n == 0:
            raise ValueError("the empty tuple has no finite window")
        acc = QPoly()
        for j in range(0, min(n - 1, g + 1) + 1):
            coeff = _bhat(tup, j) - _bhat(tup, j - 1) * QPoly.monomial(1)
            acc = acc + coeff * self._num(tup, g - j, parity)
        if tup.rflag == 0 and tup.weight % 2 == 0:
            acc = acc - (self._rhs(tup, g, parity) - self._rhs(tup, g - 1, parity) * QPoly.monomial(1))
        return QRat(acc, DEN)

    def window_start(self, tup: UTuple) -> int:
        """First genus from which the finite-window recursion is claimed."""
        return max(tup.degree - 1, 0 if tup.rflag == 0 else _threshold(tup) + 1)

    # -- equivariant counts
    def fixed_point_poly(self, genus: int, sigma: CycleType, parity: str) -> QPoly:
        acc = QRat(QPoly())
        for mono, coeff in sigma_moment_poly(sigma).items():
            acc = acc + self.a_value(mono, genus, parity) * QRat(coeff)
        if not acc.is_poly():
            raise NotPolynomial(f"fixed points for {sigma} at genus {genus} are {acc}")
        return acc.as_poly()

    def fixed_point_table(self, genus: int, n: int, parity: str) -> Dict[CycleType, QPoly]:
        return {s: self.fixed_point_poly(genus, s, parity) for s in partitions(n)}

    def character_transform(self, genus: int, n: int, parity: str) -> Dict[CycleType, QPoly]:
        """P_lambda = sum over cycle types c of chi_lambda(c) |X^{F.c}| / z_c."""
        from .symmetric import character

        fix = self.fixed_point_table(genus, n, parity)
        out = {}
        for lam in partitions(n):
            acc = QPoly()
            for c, poly in fix.items():
                acc = acc + poly * mpq(character(lam, c), c.centralizer_size())
            out[lam] = acc
        return out


def _compose_q2(p: QPoly) -> QPoly:
    """p(q^2) for a polynomial given in lambda."""
    out = [0] * (2 * len(p.c))
    for k, c in enumerate(p.c):
        out[2 * k] = c
    return QPoly(out)


_DEFAULT: Optional[Engine] = None


def default_engine() -> Engine:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = Engine()
    return _DEFAULT
