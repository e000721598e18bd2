"""Exact polynomials and rational functions in the field-size symbol q.

Coefficients are ``gmpy2.mpq``.  Everything here is immutable.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq, mpz

NEG_INF = float("-inf")


def _q(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


class QPoly:
    """Univariate polynomial in q over the rationals (low degree first)."""

    __slots__ = ("c", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        c = [_q(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)
        self._hash = None

    @classmethod
    def _raw(cls, c):
        # c already a trimmed tuple of mpq
        obj = cls.__new__(cls)
        obj.c = c
        obj._hash = None
        return obj

    @classmethod
    def const(cls, x) -> "QPoly":
        return cls([x])

    @classmethod
    def monomial(cls, k: int, coeff=1) -> "QPoly":
        return cls([0] * k + [coeff])

    @classmethod
    def var(cls) -> "QPoly":
        return cls([0, 1])

    # -- basic properties
    @property
    def degree(self):
        return len(self.c) - 1 if self.c else NEG_INF

    @property
    def lc(self) -> mpq:
        return self.c[-1] if self.c else mpq(0)

    def is_zero(self) -> bool:
        return not self.c

    def is_const(self) -> bool:
        return len(self.c) <= 1

    def coeff(self, k: int) -> mpq:
        return self.c[k] if 0 <= k < len(self.c) else mpq(0)

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, QPoly):
            return self.c == other.c
        if isinstance(other, QRat):
            return other == self
        if isinstance(other, (int, Fraction)) or type(other) is type(mpq(0)):
            return self.c == QPoly.const(other).c
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.c)
        return self._hash

    # -- ring operations
    def __add__(self, other):
        if isinstance(other, QRat):
            return NotImplemented
        other = as_qpoly(other)
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] += x
        return QPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return QPoly._raw(tuple(-x for x in self.c))

    def __sub__(self, other):
        if isinstance(other, QRat):
            return NotImplemented
        return self + (-as_qpoly(other))

    def __rsub__(self, other):
        return as_qpoly(other) - self

    def __mul__(self, other):
        if isinstance(other, QRat):
            return NotImplemented
        if not isinstance(other, QPoly):
            s = _q(other)
            if s == 0:
                return QPoly()
            return QPoly._raw(tuple(x * s for x in self.c))
        a, b = self.c, other.c
        if not a or not b:
            return QPoly()
        out = [mpq(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return QPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial; use QRat")
        result = QPoly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __truediv__(self, other):
        return QRat(self, as_qpoly(other))

    def __rtruediv__(self, other):
        return QRat(as_qpoly(other), self)

    def divmod(self, other: "QPoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        db = len(other.c) - 1
        inv = 1 / other.lc
        if len(r) - 1 < db:
            return QPoly(), self
        qt = [mpq(0)] * (len(r) - db)
        bc = other.c
        for k in range(len(r) - 1 - db, -1, -1):
            t = r[k + db] * inv
            qt[k] = t
            if t:
                for j in range(db + 1):
                    r[k + j] -= t * bc[j]
        return QPoly(qt), QPoly(r[:db])

    def exact_div(self, other: "QPoly") -> "QPoly":
        qt, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("polynomial not divisible")
        return qt

    def monic(self) -> "QPoly":
        if self.is_zero():
            return self
        inv = 1 / self.lc
        return QPoly._raw(tuple(x * inv for x in self.c))

    def gcd(self, other: "QPoly") -> "QPoly":
        a, b = self, as_qpoly(other)
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def __call__(self, x):
        acc = mpq(0)
        x = _q(x)
        for c in reversed(self.c):
            acc = acc * x + c
        return acc

    evaluate = __call__

    def content_denominator(self) -> mpz:
        """lcm of coefficient denominators."""
        from math import lcm

        d = 1
        for x in self.c:
            d = lcm(d, int(x.denominator))
        return mpz(d)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.c)

    # -- rendering
    def render(self, fmt: str = "plain", var: str = "q") -> str:
        return _render_terms([(k, x) for k, x in enumerate(self.c)], fmt, var)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"QPoly({self.render()})"


def as_qpoly(x) -> QPoly:
    if isinstance(x, QPoly):
        return x
    if isinstance(x, QRat):
        return x.as_poly()
    return QPoly.const(x)


def _fmt_num(x: mpq, fmt: str) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    if fmt == "latex":
        return rf"\frac{{{x.numerator}}}{{{x.denominator}}}"
    return f"{x.numerator}/{x.denominator}"


def _render_terms(terms, fmt, var):
    parts = []
    for k, x in sorted(terms, key=lambda t: -t[0]):
        if x == 0:
            continue
        sign = "-" if x < 0 else "+"
        a = abs(x)
        if k == 0:
            body = _fmt_num(a, fmt)
        else:
            if fmt == "latex":
                pw = var if k == 1 else f"{var}^{{{k}}}"
                body = pw if a == 1 else f"{_fmt_num(a, fmt)}{pw}"
            else:
                pw = var if k == 1 else f"{var}^{k}"
                body = pw if a == 1 else f"{_fmt_num(a, fmt)}*{pw}"
        parts.append((sign, body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


class QRat:
    """num/den with den monic and gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _canonical=False):
        num = as_qpoly(num)
        den = QPoly.const(1) if den is None else as_qpoly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _canonical:
            if num.is_zero():
                den = QPoly.const(1)
            elif den.is_const():
                num = num * (1 / den.lc)
                den = QPoly.const(1)
            else:
                g = num.gcd(den)
                if not g.is_const():
                    num = num.exact_div(g)
                    den = den.exact_div(g)
                s = 1 / den.lc
                num = num * s
                den = den * s
        self.num = num
        self.den = den

    @classmethod
    def of(cls, x) -> "QRat":
        return x if isinstance(x, QRat) else cls(x)

    def is_poly(self) -> bool:
        return self.den.is_const()

    def as_poly(self) -> QPoly:
        if not self.is_poly():
            raise ArithmeticError(f"{self} is not a polynomial")
        return self.num

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, QRat):
            return self.num == other.num and self.den == other.den
        try:
            other = QRat(as_qpoly(other))
        except TypeError:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = QRat.of(other) if not isinstance(other, QRat) else other
        if self.den == other.den:
            if self.den.is_const():
                return QRat(self.num + other.num, _canonical=True)
            return QRat(self.num + other.num, self.den)
        if self.den.is_const():
            return QRat(self.num * other.den + other.num, other.den)
        if other.den.is_const():
            return QRat(self.num + other.num * self.den, self.den)
        g = self.den.gcd(other.den)
        a = other.den.exact_div(g)
        b = self.den.exact_div(g)
        return QRat(self.num * a + other.num * b, self.den * a)

    __radd__ = __add__

    def __neg__(self):
        return QRat(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        return self + (-QRat.of(other))

    def __rsub__(self, other):
        return QRat.of(other) - self

    def __mul__(self, other):
        if not isinstance(other, QRat):
            if isinstance(other, QPoly):
                if self.den.is_const():
                    return QRat(self.num * other, _canonical=True)
                return QRat(self.num * other, self.den)
            s = _q(other)
            if s == 0:
                return QRat(QPoly())
            return QRat(self.num * s, self.den, _canonical=True)
        if self.den.is_const() and other.den.is_const():
            return QRat(self.num * other.num, _canonical=True)
        return QRat(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "QRat":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return QRat(self.den, self.num)

    def __truediv__(self, other):
        return self * QRat.of(other).inverse()

    def __rtruediv__(self, other):
        return QRat.of(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return QRat(self.num ** e, self.den ** e, _canonical=True)

    def __call__(self, x):
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at q={x}")
        return self.num(x) / d

    evaluate = __call__

    def render(self, fmt: str = "plain", var: str = "q") -> str:
        n = self.num.render(fmt, var)
        if self.is_poly():
            return n
        d = self.den.render(fmt, var)
        if fmt == "latex":
            return rf"\frac{{{n}}}{{{d}}}"
        return f"({n})/({d})"

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"QRat({self.render()})"


Q_VAR = QPoly.var()
ONE = QRat(QPoly.const(1))
ZERO = QRat(QPoly())


def qpow(k: int) -> QRat:
    """q^k for any integer k."""
    if k >= 0:
        return QRat(QPoly.monomial(k), _canonical=True)
    return QRat(QPoly.const(1), QPoly.monomial(-k), _canonical=True)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|(q)|(\*\*|[-+*/^()]))")


class ParseError(ValueError):
    pass


def parse_qrat(text: str) -> QRat:
    """Parse the plain rendering (or any +-*/^ expression in q) back into a QRat."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at {text[pos:]!r}")
        num, var, op = m.groups()
        toks.append(("n", int(num)) if num else ("q", None) if var else ("op", "^" if op == "**" else op))
        pos = m.end()
    toks.append(("end", None))
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        t = toks[i]
        i += 1
        return t

    def expr():
        val = term()
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term():
        val = unary()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            rhs = unary()
            val = val * rhs if op == "*" else val / rhs
        return val

    def unary():
        if peek() == ("op", "-"):
            take()
            return -unary()
        if peek() == ("op", "+"):
            take()
            return unary()
        return power()

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            neg = False
            if peek() == ("op", "-"):
                take()
                neg = True
            kind, e = take()
            if kind != "n":
                raise ParseError("exponent must be an integer")
            return base ** (-e if neg else e)
        return base

    def atom():
        kind, v = take()
        if kind == "n":
            return QRat(QPoly.const(v))
        if kind == "q":
            return QRat(Q_VAR)
        if (kind, v) == ("op", "("):
            val = expr()
            if take() != ("op", ")"):
                raise ParseError("missing ')'")
            return val
        raise ParseError(f"unexpected token {v!r}")

    out = expr()
    if peek()[0] != "end":
        raise ParseError(f"trailing input in {text!r}")
    return out


# ---------------------------------------------------------------- linear algebra


class SingularSystem(ArithmeticError):
    pass


def solve_linear(matrix: Sequence[Sequence], rhs: Sequence) -> list:
    """Solve M x = b over Q(q) by fraction-free (Bareiss) elimination.

    Rows are first cleared of denominators so elimination runs in Q[q] with
    exact divisions only.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise ValueError("solve_linear needs a square system")
    aug = []
    for row, b in zip(matrix, rhs):
        entries = [QRat.of(x) for x in row] + [QRat.of(b)]
        den = QPoly.const(1)
        for e in entries:
            if not e.den.is_const():
                den = den * e.den.exact_div(den.gcd(e.den))
        aug.append([e.num * den.exact_div(e.den) for e in entries])
    prev = QPoly.const(1)
    for k in range(n):
        piv = next((r for r in range(k, n) if not aug[r][k].is_zero()), None)
        if piv is None:
            raise SingularSystem("matrix is singular")
        aug[k], aug[piv] = aug[piv], aug[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                aug[i][j] = (aug[k][k] * aug[i][j] - aug[i][k] * aug[k][j]).exact_div(prev)
            aug[i][k] = QPoly()
        prev = aug[k][k]
    x = [ZERO] * n
    for i in range(n - 1, -1, -1):
        acc = QRat(aug[i][n])
        for j in range(i + 1, n):
            if not aug[i][j].is_zero():
                acc = acc - x[j] * aug[i][j]
        x[i] = acc / QRat(aug[i][i])
    return x


class InterpolationError(ArithmeticError):
    pass


def interpolate_poly(samples: Sequence, degree_bound: int, validation_count: int) -> QPoly:
    """Lagrange fit on the first degree_bound+1 samples, checked on the rest."""
    if len(samples) < degree_bound + 1 + validation_count:
        raise InterpolationError(
            f"need {degree_bound + 1 + validation_count} samples, got {len(samples)}")
    xs = [_q(x) for x, _ in samples]
    if len(set(xs)) != len(xs):
        raise InterpolationError("sample points must be distinct")
    fit = samples[: degree_bound + 1]
    result = QPoly()
    for i, (xi, yi) in enumerate(fit):
        basis = QPoly.const(1)
        denom = mpq(1)
        for j, (xj, _) in enumerate(fit):
            if j != i:
                basis = basis * QPoly([-_q(xj), 1])
                denom *= _q(xi) - _q(xj)
        result = result + basis * (_q(yi) / denom)
    for x, y in samples[degree_bound + 1:]:
        if result(x) != _q(y):
            raise InterpolationError(
                f"held-out sample at q={x} gives {y}, fit gives {result(x)} (degree bound {degree_bound})")
    return result


# ---------------------------------------------------------------- closed forms


@dataclass(frozen=True)
class ClosedForm:
    """geometric * q^(2g) + poly_r(g) where r = g mod period, valid for g >= g_min.

    ``residue_polys[r]`` lists QRat coefficients of the polynomial in g, low
    degree first.
    """

    geometric: QRat
    period: int
    residue_polys: tuple
    g_min: int
    verified_through: int = field(default=0)

    def __call__(self, g: int) -> QRat:
        if g < self.g_min:
            raise ValueError(f"closed form valid only for g >= {self.g_min}")
        acc = self.geometric * qpow(2 * g)
        gg = mpq(1)
        for c in self.residue_polys[g % self.period]:
            acc = acc + c * gg
            gg *= g
        return acc

    evaluate = __call__

    def render(self, fmt: str = "plain") -> str:
        lines = []
        geo = self.geometric.render(fmt)
        if fmt == "latex":
            lines.append(rf"\left({geo}\right) q^{{2g}}")
        else:
            lines.append(f"({geo})*q^(2g)")
        for r, coeffs in enumerate(self.residue_polys):
            terms = []
            for k, c in enumerate(coeffs):
                if c.is_zero():
                    continue
                cs = c.render(fmt)
                gp = "" if k == 0 else ("g" if k == 1 else f"g^{k}" if fmt != "latex" else f"g^{{{k}}}")
                if fmt == "latex":
                    terms.append(rf"\left({cs}\right){gp}" if gp else rf"\left({cs}\right)")
                else:
                    terms.append(f"({cs})*{gp}" if gp else f"({cs})")
            body = " + ".join(terms) if terms else "0"
            cond = f"g = {r} mod {self.period}"
            if fmt == "latex":
                lines.append(rf"+\; {body} \quad \text{{if }} g \equiv {r} \pmod{{{self.period}}}")
            else:
                lines.append(f"  + {body}    [{cond}]")
        tail = f"valid for g >= {self.g_min}"
        lines.append(tail if fmt != "latex" else rf"\text{{{tail}}}")
        return "\n".join(lines)

    def __str__(self):
        return self.render()
