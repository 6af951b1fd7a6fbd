"""Exact scalar tower: Q, Q(x), truncated Laurent series in x, truncated
t-series over those, and the bivariate rational functions Q(x, t).

The derivation is d/dx throughout; t is a constant. Truncation is explicit
state: every XLaurent carries its absolute x-precision (None when the element
is a Laurent polynomial known exactly) and every TruncatedSeries carries its
absolute t-precision.

Heavy lifting (polynomial products, gcds) is delegated to python-flint.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import flint

from .errors import DenominatorDegenerate, InsufficientPrecision, NoReconstruction

fmpq = flint.fmpq
fmpq_poly = flint.fmpq_poly

Rational = Fraction

_ZERO = fmpq(0)
_ONE = fmpq(1)


def to_fmpq(c) -> fmpq:
    if isinstance(c, fmpq):
        return c
    if isinstance(c, int):
        return fmpq(c)
    if isinstance(c, Fraction):
        return fmpq(c.numerator, c.denominator)
    if isinstance(c, str):
        f = Fraction(c)
        return fmpq(f.numerator, f.denominator)
    if isinstance(c, flint.fmpz):
        return fmpq(c)
    raise TypeError(f"not a rational: {c!r}")


def to_fraction(c) -> Fraction:
    c = to_fmpq(c)
    return Fraction(int(c.p), int(c.q))


def _poly_coeffs(p: fmpq_poly) -> list:
    return p.coeffs() if p.degree() >= 0 else []


def _inv_series(u: fmpq_poly, m: int) -> fmpq_poly:
    """1/u mod x^m, for u with nonzero constant term (Newton iteration)."""
    if m <= 0:
        return fmpq_poly([])
    u0 = _poly_coeffs(u)[0]
    g = fmpq_poly([1 / u0])
    k = 1
    while k < m:
        k = min(2 * k, m)
        e = u.mul_low(g, k)
        g = g.mul_low(fmpq_poly([2]) - e, k)
    return g


# ---------------------------------------------------------------------------
# Q(x)
# ---------------------------------------------------------------------------


class RatFunc:
    """Univariate rational function num/den over Q with den monic, gcd 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, fmpq_poly) else fmpq_poly(num if isinstance(num, list) else [to_fmpq(num)])
        if den is None:
            den = fmpq_poly([1])
        elif not isinstance(den, fmpq_poly):
            den = fmpq_poly(den if isinstance(den, list) else [to_fmpq(den)])
        if den.is_zero():
            raise ZeroDivisionError("RatFunc with zero denominator")
        if num.is_zero():
            den = fmpq_poly([1])
        else:
            g = num.gcd(den)
            if g.degree() > 0:
                num = _exact_div(num, g)
                den = _exact_div(den, g)
        lc = den.leading_coefficient()
        if lc != 1:
            num = num / lc
            den = den / lc
        self.num = num
        self.den = den

    @staticmethod
    def x() -> "RatFunc":
        return RatFunc(fmpq_poly([0, 1]))

    def __add__(self, other):
        other = _as_ratfunc(other)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_as_ratfunc(other))

    def __rsub__(self, other):
        return _as_ratfunc(other) - self

    def __mul__(self, other):
        other = _as_ratfunc(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_ratfunc(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero RatFunc")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __eq__(self, other):
        other = _as_ratfunc(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def derive(self) -> "RatFunc":
        return RatFunc(self.num.derivative() * self.den - self.num * self.den.derivative(), self.den * self.den)

    def laurent(self, hi: int) -> "XLaurent":
        """Laurent expansion at x = 0, exact if den is a monomial, else to O(x^hi)."""
        if self.num.is_zero():
            return XLaurent.zero()
        dc = _poly_coeffs(self.den)
        v = next(i for i, c in enumerate(dc) if c != 0)
        u = self.den.right_shift(v)
        if u.degree() == 0:
            return XLaurent(-v, self.num / u.leading_coefficient(), None)
        nc = _poly_coeffs(self.num)
        w = next(i for i, c in enumerate(nc) if c != 0)
        # result valuation is w - v; need coefficients up to hi
        m = hi - (w - v)
        if m <= 0:
            return XLaurent(hi, fmpq_poly([]), hi)
        q = self.num.right_shift(w).mul_low(_inv_series(u, m), m)
        return XLaurent(w - v, q, hi)

    def __repr__(self):
        return f"RatFunc(({self.num}) / ({self.den}))"


def _exact_div(a: fmpq_poly, b: fmpq_poly) -> fmpq_poly:
    q, r = divmod(a, b)
    assert r.is_zero()
    return q


def _as_ratfunc(v) -> RatFunc:
    if isinstance(v, RatFunc):
        return v
    return RatFunc(fmpq_poly([to_fmpq(v)]))


# ---------------------------------------------------------------------------
# k((x)) truncated
# ---------------------------------------------------------------------------


class XLaurent:
    """Laurent series sum c_e x^e, e >= lo, known below the absolute precision
    `prec` (None: exact Laurent polynomial).

    Normalized so that the stored polynomial has nonzero constant term, i.e.
    `lo` is the valuation whenever the element is not (known to be) zero.
    """

    __slots__ = ("lo", "poly", "prec")

    def __init__(self, lo: int, poly: fmpq_poly, prec: int | None = None):
        if prec is not None:
            n = prec - lo
            if n <= 0:
                poly = fmpq_poly([])
            elif poly.length() > n:
                poly = poly.truncate(n)
        if poly.is_zero():
            lo = prec if prec is not None else 0
        elif poly[0] == 0:
            z = 1
            while poly[z] == 0:
                z += 1
            poly = poly.right_shift(z)
            lo += z
        self.lo = lo
        self.poly = poly
        self.prec = prec

    # construction -----------------------------------------------------------
    @staticmethod
    def zero(prec: int | None = None) -> "XLaurent":
        return XLaurent(0, fmpq_poly([]), prec)

    @staticmethod
    def monomial(e: int, c=1) -> "XLaurent":
        return XLaurent(e, fmpq_poly([to_fmpq(c)]), None)

    @staticmethod
    def from_terms(terms: dict, prec: int | None = None) -> "XLaurent":
        terms = {int(e): to_fmpq(c) for e, c in terms.items() if c != 0}
        if not terms:
            return XLaurent.zero(prec)
        lo = min(terms)
        hi = max(terms)
        return XLaurent(lo, fmpq_poly([terms.get(e, _ZERO) for e in range(lo, hi + 1)]), prec)

    @staticmethod
    def from_coeffs(lo: int, coeffs: Sequence, prec: int | None = None) -> "XLaurent":
        return XLaurent(lo, fmpq_poly([to_fmpq(c) for c in coeffs]), prec)

    # inspection -------------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.prec is None

    @property
    def hi(self) -> int:
        """Exclusive upper end of the stored window."""
        if self.prec is not None:
            return self.prec
        return self.lo + max(self.poly.length(), 0)

    @property
    def window(self) -> tuple[int, int]:
        return (self.lo, self.hi)

    def is_zero(self) -> bool:
        """True if known to be exactly zero."""
        return self.prec is None and self.poly.is_zero()

    def known_zero(self) -> bool:
        """True if all known coefficients vanish."""
        return self.poly.is_zero()

    def valuation(self) -> float | int:
        if self.poly.is_zero():
            return float("inf") if self.prec is None else self.prec
        return self.lo

    def coeff(self, e: int) -> fmpq:
        if self.prec is not None and e >= self.prec:
            raise InsufficientPrecision(f"coefficient x^{e} beyond precision {self.prec}")
        k = e - self.lo
        if k < 0 or k >= self.poly.length():
            return _ZERO
        return self.poly[k]

    def terms(self) -> Iterator[tuple[int, fmpq]]:
        for k, c in enumerate(_poly_coeffs(self.poly)):
            if c != 0:
                yield self.lo + k, c

    def max_exponent(self) -> int | None:
        if self.poly.is_zero():
            return None
        return self.lo + self.poly.degree()

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, XLaurent):
            other = XLaurent(0, fmpq_poly([to_fmpq(other)]), None)
        prec = _min_prec(self.prec, other.prec)
        if self.poly.is_zero():
            lo = other.lo
            p = other.poly
            return XLaurent(lo, p, prec)
        if other.poly.is_zero():
            return XLaurent(self.lo, self.poly, prec)
        lo = min(self.lo, other.lo)
        p = self.poly.left_shift(self.lo - lo) + other.poly.left_shift(other.lo - lo)
        return XLaurent(lo, p, prec)

    __radd__ = __add__

    def __neg__(self):
        return XLaurent(self.lo, -self.poly, self.prec)

    def __sub__(self, other):
        if not isinstance(other, XLaurent):
            other = XLaurent(0, fmpq_poly([to_fmpq(other)]), None)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "XLaurent":
        c = to_fmpq(c)
        if c == 0:
            return XLaurent.zero()
        return XLaurent(self.lo, self.poly * c, self.prec)

    def __mul__(self, other):
        if not isinstance(other, XLaurent):
            return self.scale(other)
        a, b = self, other
        if a.is_zero() or b.is_zero():
            return XLaurent.zero()
        lo = a.lo + b.lo
        if a.prec is None and b.prec is None:
            return XLaurent(lo, a.poly * b.poly, None)
        va, vb = a.valuation(), b.valuation()
        cands = []
        if a.prec is not None:
            cands.append(a.prec + vb)
        if b.prec is not None:
            cands.append(b.prec + va)
        prec = int(min(cands))
        n = prec - lo
        if n <= 0 or a.poly.is_zero() or b.poly.is_zero():
            return XLaurent.zero(prec)
        return XLaurent(lo, a.poly.mul_low(b.poly, n), prec)

    __rmul__ = __mul__

    def shift(self, k: int) -> "XLaurent":
        """Multiply by x^k."""
        return XLaurent(self.lo + k, self.poly, None if self.prec is None else self.prec + k)

    def truncate(self, hi: int) -> "XLaurent":
        if self.prec is not None and self.prec <= hi:
            return self
        if self.prec is None and self.hi <= hi:
            return self
        return XLaurent(self.lo, self.poly, hi)

    def inverse(self, cap: int) -> "XLaurent":
        """Multiplicative inverse; exact inputs with non-monomial unit part are
        expanded to absolute precision `cap`."""
        if self.poly.is_zero():
            raise ZeroDivisionError("inverse of a series with no known nonzero coefficient")
        v = self.lo
        if self.prec is None:
            if self.poly.length() == 1:
                return XLaurent(-v, fmpq_poly([1 / self.poly[0]]), None)
            prec = cap
            m = cap + v
        else:
            m = self.prec - v
            prec = self.prec - 2 * v
        if m <= 0:
            return XLaurent.zero(prec)
        return XLaurent(-v, _inv_series(self.poly, m), prec)

    def derive(self) -> "XLaurent":
        prec = None if self.prec is None else self.prec - 1
        if self.poly.is_zero():
            return XLaurent.zero(prec)
        p = self.poly * self.lo + self.poly.derivative().left_shift(1)
        return XLaurent(self.lo - 1, p, prec)

    def split(self) -> tuple["XLaurent", "XLaurent"]:
        """(part with exponents >= 1, part with exponents <= 0)."""
        if self.prec is not None and self.prec < 1:
            raise InsufficientPrecision("cannot split: nonpositive part not fully known")
        if self.poly.is_zero():
            return XLaurent.zero(self.prec), XLaurent.zero()
        if self.lo >= 1:
            return self, XLaurent.zero()
        k = 1 - self.lo  # number of coefficients with exponent <= 0
        u = self.poly.truncate(k)
        p = self.poly.right_shift(k)
        return XLaurent(1, p, self.prec), XLaurent(self.lo, u, None)

    def matches(self, other: "XLaurent") -> bool:
        """Equality of all coefficients known on both sides."""
        d = self - other
        return d.poly.is_zero()

    def __eq__(self, other):
        if not isinstance(other, XLaurent):
            return NotImplemented
        return self.lo == other.lo and self.prec == other.prec and self.poly == other.poly

    def __hash__(self):
        return hash((self.lo, self.prec, str(self.poly)))

    def __repr__(self):
        body = " + ".join(f"{c}*x^{e}" for e, c in self.terms()) or "0"
        tail = "" if self.prec is None else f" + O(x^{self.prec})"
        return f"XLaurent({body}{tail})"


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# ---------------------------------------------------------------------------
# F0 = k((x))((t)) truncated
# ---------------------------------------------------------------------------

DEFAULT_X_WINDOW = (-12, 12)


class TruncatedSeries:
    """sum_i t^i * rows[i - i0], i in [i0, t_prec); rows are XLaurent.

    `x_window` is the global window: its upper end is the expansion cap used
    whenever an infinite x-expansion must be cut (inverses, expansions); its
    lower end is the window used for generation and reporting.
    """

    __slots__ = ("i0", "rows", "t_prec", "x_window")

    def __init__(self, i0: int, rows: Sequence[XLaurent], t_prec: int, x_window=DEFAULT_X_WINDOW):
        rows = tuple(rows)[: max(0, t_prec - i0)]
        if len(rows) < t_prec - i0:
            rows = rows + tuple(XLaurent.zero() for _ in range(t_prec - i0 - len(rows)))
        self.i0 = i0
        self.rows = rows
        self.t_prec = t_prec
        self.x_window = tuple(x_window)

    # construction -----------------------------------------------------------
    @staticmethod
    def zero(t_prec: int, x_window=DEFAULT_X_WINDOW) -> "TruncatedSeries":
        return TruncatedSeries(0, (), t_prec, x_window)

    @staticmethod
    def const(c, t_prec: int, x_window=DEFAULT_X_WINDOW) -> "TruncatedSeries":
        row = c if isinstance(c, XLaurent) else XLaurent(0, fmpq_poly([to_fmpq(c)]), None)
        return TruncatedSeries(0, (row,), t_prec, x_window)

    @staticmethod
    def from_terms(terms: dict, t_prec: int, x_window=DEFAULT_X_WINDOW) -> "TruncatedSeries":
        """terms: {(t_exp, x_exp): coeff}; rows are exact."""
        by_row: dict[int, dict] = {}
        for (i, e), c in terms.items():
            by_row.setdefault(i, {})[e] = c
        if not by_row:
            return TruncatedSeries.zero(t_prec, x_window)
        i0 = min(0, min(by_row))
        rows = [XLaurent.from_terms(by_row.get(i, {})) for i in range(i0, t_prec)]
        return TruncatedSeries(i0, rows, t_prec, x_window)

    @staticmethod
    def from_rows(rows: dict, t_prec: int, x_window=DEFAULT_X_WINDOW) -> "TruncatedSeries":
        if not rows:
            return TruncatedSeries.zero(t_prec, x_window)
        i0 = min(0, min(rows))
        return TruncatedSeries(i0, [rows.get(i, XLaurent.zero()) for i in range(i0, t_prec)], t_prec, x_window)

    # inspection -------------------------------------------------------------
    def row(self, i: int) -> XLaurent:
        if i >= self.t_prec:
            raise InsufficientPrecision(f"t^{i} beyond precision {self.t_prec}")
        k = i - self.i0
        if k < 0:
            return XLaurent.zero()
        return self.rows[k]

    def items(self) -> Iterator[tuple[int, XLaurent]]:
        for k, r in enumerate(self.rows):
            yield self.i0 + k, r

    def t_valuation(self) -> int:
        for i, r in self.items():
            if not r.is_zero():
                return i
        return self.t_prec

    def is_zero(self) -> bool:
        """Known zero to t-precision with exact rows."""
        return all(r.is_zero() for r in self.rows)

    def known_zero(self) -> bool:
        return all(r.known_zero() for r in self.rows)

    def x_precision(self) -> float | int:
        """Minimum absolute x-precision over rows (inf if all exact)."""
        ps = [r.prec for r in self.rows if r.prec is not None]
        return min(ps) if ps else float("inf")

    def is_exact_rows(self) -> bool:
        return all(r.prec is None for r in self.rows)

    @property
    def cap(self) -> int:
        return self.x_window[1]

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        if isinstance(other, XLaurent):
            return TruncatedSeries(0, (other,), self.t_prec, self.x_window)
        return TruncatedSeries.const(other, self.t_prec, self.x_window)

    def _win(self, other: "TruncatedSeries"):
        return (min(self.x_window[0], other.x_window[0]), min(self.x_window[1], other.x_window[1]))

    def __add__(self, other):
        other = self._coerce(other)
        n = min(self.t_prec, other.t_prec)
        i0 = min(self.i0, other.i0)
        rows = [self.row(i) + other.row(i) if i < n else None for i in range(i0, n)]
        return TruncatedSeries(i0, rows, n, self._win(other))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.i0, [-r for r in self.rows], self.t_prec, self.x_window)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, (TruncatedSeries, XLaurent)):
            c = to_fmpq(other)
            return TruncatedSeries(self.i0, [r.scale(c) for r in self.rows], self.t_prec, self.x_window)
        other = self._coerce(other)
        a, b = self, other
        va, vb = a.t_valuation(), b.t_valuation()
        n = min(a.t_prec + vb, b.t_prec + va)
        i0 = a.i0 + b.i0
        arows = [(i, r) for i, r in a.items() if not r.is_zero()]
        brows = [(j, r) for j, r in b.items() if not r.is_zero()]
        acc: dict[int, XLaurent] = {}
        for i, ra in arows:
            for j, rb in brows:
                k = i + j
                if k >= n:
                    break
                p = ra * rb
                acc[k] = acc[k] + p if k in acc else p
        rows = [acc.get(k, XLaurent.zero()) for k in range(i0, n)]
        return TruncatedSeries(i0, rows, n, self._win(other))

    __rmul__ = __mul__

    def shift_t(self, k: int) -> "TruncatedSeries":
        """Multiply by t^k."""
        return TruncatedSeries(self.i0 + k, self.rows, self.t_prec + k, self.x_window)

    def shift_x(self, k: int) -> "TruncatedSeries":
        return TruncatedSeries(self.i0, [r.shift(k) for r in self.rows], self.t_prec, self.x_window)

    def truncate_t(self, n: int) -> "TruncatedSeries":
        if n >= self.t_prec:
            return self
        return TruncatedSeries(self.i0, self.rows, n, self.x_window)

    def with_window(self, x_window) -> "TruncatedSeries":
        return TruncatedSeries(self.i0, self.rows, self.t_prec, x_window)

    def inverse(self) -> "TruncatedSeries":
        v = self.t_valuation()
        if v >= self.t_prec:
            raise ZeroDivisionError("inverse of a series that vanishes to its precision")
        n = self.t_prec - 2 * v
        lead = self.row(v)
        if lead.known_zero():
            raise ZeroDivisionError("leading t-coefficient has no known nonzero term")
        g = lead.inverse(self.cap)
        rows: list[XLaurent] = []
        for k in range(0, n + v):
            if k == 0:
                rows.append(g)
                continue
            acc = None
            for j in range(1, k + 1):
                if v + j >= self.t_prec:
                    break
                f = self.row(v + j)
                if f.is_zero():
                    continue
                term = f * rows[k - j]
                acc = term if acc is None else acc + term
            rows.append(XLaurent.zero() if acc is None else -(g * acc))
        return TruncatedSeries(-v, rows[: n + v], n, self.x_window)

    def derive(self) -> "TruncatedSeries":
        return TruncatedSeries(self.i0, [r.derive() for r in self.rows], self.t_prec, self.x_window)

    def split(self) -> tuple["TruncatedSeries", "TruncatedSeries"]:
        ps, us = [], []
        for r in self.rows:
            p, u = r.split()
            ps.append(p)
            us.append(u)
        return (
            TruncatedSeries(self.i0, ps, self.t_prec, self.x_window),
            TruncatedSeries(self.i0, us, self.t_prec, self.x_window),
        )

    def matches(self, other, t_prec: int | None = None) -> bool:
        """Equality up to the joint tracked precision (optionally capped)."""
        other = self._coerce(other)
        d = self - other
        if t_prec is not None:
            d = d.truncate_t(t_prec)
        return d.known_zero()

    def first_mismatch(self, other) -> int | None:
        """Smallest t-exponent at which the two series provably differ."""
        d = self - self._coerce(other)
        for i, r in d.items():
            if not r.known_zero():
                return i
        return None

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.t_prec == other.t_prec
            and self.x_window == other.x_window
            and [(i, r) for i, r in self.items() if not r.is_zero()]
            == [(i, r) for i, r in other.items() if not r.is_zero()]
        )

    def __hash__(self):
        return hash((self.t_prec, tuple(r for r in self.rows)))

    def terms(self) -> Iterator[tuple[int, int, fmpq]]:
        for i, r in self.items():
            for e, c in r.terms():
                yield i, e, c

    def __repr__(self):
        parts = []
        for i, r in self.items():
            if not r.is_zero():
                parts.append(f"t^{i}*({r})")
        return "TruncatedSeries(" + (" + ".join(parts) or "0") + f" + O(t^{self.t_prec}))"


# ---------------------------------------------------------------------------
# F = Q(x, t) (and its truncated-numerator extension)
# ---------------------------------------------------------------------------

MCTX = flint.fmpq_mpoly_ctx.get(("x", "t"), "lex")
X, T = MCTX.gens()


def mpoly(terms: dict) -> flint.fmpq_mpoly:
    """{(x_exp, t_exp): coeff} -> bivariate polynomial."""
    return MCTX.from_dict({k: to_fmpq(v) for k, v in terms.items() if v != 0})


def _mterms(p) -> dict:
    return dict(p.to_dict())


def t_slices(p) -> dict[int, fmpq_poly]:
    """Split a bivariate polynomial by powers of t into x-polynomials."""
    acc: dict[int, dict[int, fmpq]] = {}
    for (a, b), c in p.to_dict().items():
        acc.setdefault(b, {})[a] = c
    out = {}
    for b, d in acc.items():
        deg = max(d)
        out[b] = fmpq_poly([d.get(i, _ZERO) for i in range(deg + 1)])
    return out


def _truncate_t(p, n: int):
    return MCTX.from_dict({k: v for k, v in p.to_dict().items() if k[1] < n})


def _deg(p, var: int) -> int:
    d = p.to_dict()
    return max((k[var] for k in d), default=-1)


class BiRatFunc:
    """Element num/den of F = k((t))(x) with num, den in Q[x, t].

    `t_prec is None`: an exact element of Q(x, t), reduced (gcd 1) with den
    normalized to leading coefficient 1 in lex order x > t.

    `t_prec = N`: an element of k((t))(x) whose numerator is known modulo t^N
    (its t-coefficients need not be rational in t); den is exact and must not
    vanish at t = 0.
    """

    __slots__ = ("num", "den", "t_prec")

    def __init__(self, num, den=None, t_prec: int | None = None):
        if not isinstance(num, flint.fmpq_mpoly):
            num = MCTX.constant(to_fmpq(num))
        if den is None:
            den = MCTX.constant(1)
        elif not isinstance(den, flint.fmpq_mpoly):
            den = MCTX.constant(to_fmpq(den))
        if den.is_zero():
            raise ZeroDivisionError("BiRatFunc with zero denominator")
        if t_prec is not None:
            if den.subs({"t": 0}).is_zero():
                raise DenominatorDegenerate("truncated element needs den(x, 0) != 0")
            num = _truncate_t(num, t_prec)
        else:
            if num.is_zero():
                den = MCTX.constant(1)
            else:
                g = num.gcd(den)
                if not g.is_constant():
                    num = num / g
                    den = den / g
        lc = den.leading_coefficient()
        if lc != 1:
            num = num / lc
            den = den / lc
        self.num = num
        self.den = den
        self.t_prec = t_prec

    # construction -----------------------------------------------------------
    @staticmethod
    def x() -> "BiRatFunc":
        return BiRatFunc(X)

    @staticmethod
    def t() -> "BiRatFunc":
        return BiRatFunc(T)

    @staticmethod
    def const(c) -> "BiRatFunc":
        return BiRatFunc(MCTX.constant(to_fmpq(c)))

    @staticmethod
    def parse(text: str) -> "BiRatFunc":
        return parse_biratfunc(text)

    @property
    def exact(self) -> bool:
        return self.t_prec is None

    # arithmetic -------------------------------------------------------------
    def _prec_with(self, other: "BiRatFunc"):
        return _min_prec(self.t_prec, other.t_prec)

    def __add__(self, other):
        other = _as_birat(other)
        if self.den == other.den:
            return BiRatFunc(self.num + other.num, self.den, self._prec_with(other))
        return BiRatFunc(self.num * other.den + other.num * self.den, self.den * other.den, self._prec_with(other))

    __radd__ = __add__

    def __neg__(self):
        return BiRatFunc(-self.num, self.den, self.t_prec)

    def __sub__(self, other):
        return self + (-_as_birat(other))

    def __rsub__(self, other):
        return _as_birat(other) - self

    def __mul__(self, other):
        other = _as_birat(other)
        return BiRatFunc(self.num * other.num, self.den * other.den, self._prec_with(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_birat(other)
        if other.t_prec is not None:
            raise InsufficientPrecision("division by a truncated element is not supported")
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero BiRatFunc")
        if self.t_prec is not None and other.num.subs({"t": 0}).is_zero():
            raise DenominatorDegenerate("divisor vanishes at t = 0")
        return BiRatFunc(self.num * other.den, self.den * other.num, self.t_prec)

    def __rtruediv__(self, other):
        return _as_birat(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return BiRatFunc.const(1) / (self ** (-k))
        r = BiRatFunc.const(1)
        for _ in range(k):
            r = r * self
        return r

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        if not isinstance(other, (BiRatFunc, int, Fraction)):
            return NotImplemented
        other = _as_birat(other)
        if self.t_prec is None and other.t_prec is None:
            return self.num == other.num and self.den == other.den
        return (self - other).is_zero()

    def __hash__(self):
        return hash((str(self.num), str(self.den), self.t_prec))

    def derive(self) -> "BiRatFunc":
        n, d = self.num, self.den
        return BiRatFunc(n.derivative("x") * d - n * d.derivative("x"), d * d, self.t_prec)

    def truncate(self, t_prec: int) -> "BiRatFunc":
        p = t_prec if self.t_prec is None else min(t_prec, self.t_prec)
        return BiRatFunc(self.num, self.den, p)

    def degrees(self) -> tuple[int, int, int, int]:
        """(dx_num, dx_den, dt_num, dt_den)"""
        return (_deg(self.num, 0), _deg(self.den, 0), _deg(self.num, 1), _deg(self.den, 1))

    # expansion ----------------------------------------------------------------
    def t_coefficients(self, n: int) -> list[RatFunc]:
        """Coefficients c_0..c_{n-1} in Q(x) of the t-adic expansion."""
        ns = t_slices(self.num)
        ds = t_slices(self.den)
        d0 = ds.get(0)
        if d0 is None or d0.is_zero():
            raise DenominatorDegenerate("t-order-0 part of the denominator vanishes")
        out: list[RatFunc] = []
        for k in range(n):
            acc = RatFunc(ns.get(k, fmpq_poly([])))
            for j in range(1, k + 1):
                dj = ds.get(j)
                if dj is not None:
                    acc = acc - RatFunc(dj) * out[k - j]
            out.append(acc / RatFunc(d0))
        return out

    def expand(self, t_prec: int, x_window=DEFAULT_X_WINDOW) -> TruncatedSeries:
        if self.t_prec is not None:
            t_prec = min(t_prec, self.t_prec)
        coeffs = self.t_coefficients(t_prec)
        rows = [c.laurent(x_window[1]) for c in coeffs]
        return TruncatedSeries(0, rows, t_prec, x_window)

    # text form ------------------------------------------------------------------
    def integral_parts(self) -> tuple[dict, dict]:
        """num, den as integer-coefficient term dicts with joint content 1 and
        positive leading denominator coefficient."""
        nd, dd = self.num.to_dict(), self.den.to_dict()
        lcm = 1
        for c in list(nd.values()) + list(dd.values()):
            q = int(to_fmpq(c).q)
            lcm = lcm * q // _gcd(lcm, q)
        ni = {k: int(to_fmpq(v) * lcm) for k, v in nd.items()}
        di = {k: int(to_fmpq(v) * lcm) for k, v in dd.items()}
        g = 0
        for v in list(ni.values()) + list(di.values()):
            g = _gcd(g, abs(v))
        if g > 1:
            ni = {k: v // g for k, v in ni.items()}
            di = {k: v // g for k, v in di.items()}
        return ni, di

    def to_text(self) -> str:
        ni, di = self.integral_parts()
        s = f"({format_poly(ni)}) / ({format_poly(di)})"
        if self.t_prec is not None:
            s += f" + O(t^{self.t_prec})"
        return s

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"BiRatFunc({self.to_text()})"


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _as_birat(v) -> BiRatFunc:
    if isinstance(v, BiRatFunc):
        return v
    return BiRatFunc.const(v)


def format_poly(terms: dict) -> str:
    """Deterministic text of an integer bivariate polynomial in x, t."""
    if not terms:
        return "0"
    keys = sorted(terms, key=lambda k: (-(k[0] + k[1]), -k[0]))
    out = []
    for i, (a, b) in enumerate(keys):
        c = terms[(a, b)]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        mono = []
        if a:
            mono.append("x" if a == 1 else f"x^{a}")
        if b:
            mono.append("t" if b == 1 else f"t^{b}")
        if mono:
            body = "*".join(mono) if mag == 1 else f"{mag}*" + "*".join(mono)
        else:
            body = str(mag)
        if not out:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out) if out else "0"


def parse_biratfunc(text: str) -> BiRatFunc:
    import sympy

    x, t = sympy.symbols("x t")
    text = text.strip()
    t_prec = None
    if "+ O(t^" in text:
        head, tail = text.rsplit("+ O(t^", 1)
        t_prec = int(tail.rstrip(")").strip())
        text = head.strip()
    expr = sympy.sympify(text.replace("^", "**"), locals={"x": x, "t": t})
    num, den = sympy.fraction(sympy.together(expr))

    def conv(e):
        p = sympy.Poly(e, x, t, domain="QQ")
        return mpoly({k: Fraction(int(v.p), int(v.q)) for k, v in p.as_dict().items()})

    return BiRatFunc(conv(num), conv(den), t_prec)


# ---------------------------------------------------------------------------
# generic entry points
# ---------------------------------------------------------------------------


def derive(f):
    """d/dx on any scalar type of the tower."""
    if isinstance(f, (RatFunc, XLaurent, TruncatedSeries, BiRatFunc)):
        return f.derive()
    if hasattr(f, "derive"):
        return f.derive()
    return 0


def expand(f: BiRatFunc, t_prec: int, x_window=DEFAULT_X_WINDOW) -> TruncatedSeries:
    return _as_birat(f).expand(t_prec, x_window)


def _reconstruct_precondition(s: TruncatedSeries, bounds, mode: str):
    dxn, dxd, dtn, dtd = bounds
    if mode == "exact" and s.t_prec <= dtn + dtd:
        raise InsufficientPrecision(
            f"t-precision {s.t_prec} must exceed dt_num + dt_den = {dtn + dtd}"
        )
    xp = s.x_precision()
    if xp <= dxn + dxd:
        raise InsufficientPrecision(f"x-precision {xp} must exceed dx_num + dx_den = {dxn + dxd}")


def _denominator_constraints(s: TruncatedSeries, bounds, mode: str):
    """Rows of the homogeneous system on the denominator coefficients.

    Column (a, b) stands for x^a t^b in D; a row is a coefficient (k, e) of
    D*s that must vanish because it lies outside the numerator's support.
    """
    dxn, dxd, dtn, dtd = bounds
    cols = [(a, b) for b in range(dtd + 1) for a in range(dxd + 1)]
    n = s.t_prec
    rows_data = {i: r for i, r in s.items() if i >= 0}
    allowed = (lambda k, e: 0 <= e <= dxn and k <= dtn) if mode == "exact" else (lambda k, e: 0 <= e <= dxn)
    eqs: dict[tuple[int, int], dict[int, fmpq]] = {}
    for k in range(n):
        # x-window where (D*s)_k is fully known
        hi = float("inf")
        lo = None
        for b in range(min(k, dtd) + 1):
            r = rows_data.get(k - b)
            if r is None:
                continue
            if r.prec is not None:
                hi = min(hi, r.prec)
            if not r.poly.is_zero():
                lo = r.lo if lo is None else min(lo, r.lo)
        if lo is None:
            continue
        top = 0
        for b in range(min(k, dtd) + 1):
            r = rows_data.get(k - b)
            if r is not None and not r.poly.is_zero():
                top = max(top, r.lo + r.poly.degree() + dxd)
        e_hi = top + 1 if hi == float("inf") else min(hi, top + 1)
        for e in range(lo, e_hi):
            if allowed(k, e):
                continue
            row: dict[int, fmpq] = {}
            for ci, (a, b) in enumerate(cols):
                if b > k:
                    continue
                r = rows_data.get(k - b)
                if r is None:
                    continue
                c = r.coeff(e - a) if (r.prec is None or e - a < r.prec) else None
                if c is None:
                    continue
                if c != 0:
                    row[ci] = c
            if row:
                eqs[(k, e)] = row
    return cols, list(eqs.values())


def _nullspace(rows: list[dict[int, fmpq]], ncols: int) -> list[list[fmpq]]:
    from .linalg import nullspace_sparse

    return nullspace_sparse(rows, ncols)


def rational_reconstruct(s: TruncatedSeries, deg_bounds=(8, 8, 8, 8), mode: str = "exact") -> BiRatFunc:
    """Find f = N/D with expand(f) matching s to its full precision.

    mode "exact": N, D in Q[x, t] within all four bounds (an element of Q(x,t)).
    mode "field": D in Q[x, t] within (dx_den, dt_den), N in Q[x][[t]] of
    x-degree <= dx_num known mod t^prec; certifies membership in k((t))(x).

    The denominator of least total degree (then least t-degree) is returned.
    """
    if mode not in ("exact", "field"):
        raise ValueError(mode)
    dxn, dxd, dtn, dtd = deg_bounds
    _reconstruct_precondition(s, deg_bounds, mode)
    for i, r in s.items():
        if i < 0 and not r.known_zero():
            raise NoReconstruction("series has a pole in t")
    cols, eqs = _denominator_constraints(s, deg_bounds, mode)
    colidx = {c: i for i, c in enumerate(cols)}
    for total in range(dxd + dtd + 1):
        for bt in range(min(total, dtd) + 1):
            ax = total - bt
            if ax > dxd:
                continue
            sel = [colidx[(a, b)] for b in range(bt + 1) for a in range(ax + 1)]
            # the new monomials must be used, else a smaller level would have found it
            remap = {c: j for j, c in enumerate(sel)}
            sub = []
            for row in eqs:
                rr = {remap[c]: v for c, v in row.items() if c in remap}
                if rr:
                    sub.append(rr)
            basis = _nullspace(sub, len(sel))
            for vec in basis:
                terms = {cols[sel[j]]: v for j, v in enumerate(vec) if v != 0}
                D = MCTX.from_dict(terms)
                if D.is_zero() or D.subs({"t": 0}).is_zero():
                    continue
                f = _numerator_for(s, D, deg_bounds, mode)
                if f is not None:
                    return f
    raise NoReconstruction(f"no reconstruction within bounds {tuple(deg_bounds)}")


def _numerator_for(s: TruncatedSeries, D, bounds, mode: str) -> BiRatFunc | None:
    dxn, dxd, dtn, dtd = bounds
    ds = t_slices(D)
    n = s.t_prec
    terms: dict[tuple[int, int], fmpq] = {}
    for k in range(n):
        acc = None
        for b, dp in ds.items():
            if b > k:
                continue
            r = s.row(k - b)
            if r.is_zero():
                continue
            p = r * XLaurent(0, dp, None)
            acc = p if acc is None else acc + p
        if acc is None:
            continue
        for e, c in acc.terms():
            if e < 0 or e > dxn or (mode == "exact" and k > dtn):
                return None
            terms[(e, k)] = c
    N = MCTX.from_dict(terms)
    if mode == "exact":
        return BiRatFunc(N, D)
    return BiRatFunc(N, D, n)
