"""Multivariate polynomials over Q (flint, degrevlex) with normal forms modulo
ideals whose Groebner bases come from sympy.

A `PolyRing` is just a tuple of variable names; rings with the same names
share a flint context. Ideals keep their reduced Groebner basis; sums of
ideals in disjoint variable sets reuse the union of the bases, which is again
a Groebner basis.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import flint
import sympy

from .errors import DegreeOverflow

fmpq = flint.fmpq
Poly = flint.fmpq_mpoly


class PolyRing:
    __slots__ = ("names", "ctx", "_index")

    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        self.ctx = flint.fmpq_mpoly_ctx.get(self.names, "degrevlex")
        self._index = {n: i for i, n in enumerate(self.names)}

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"PolyRing{self.names}"

    @property
    def nvars(self) -> int:
        return len(self.names)

    def var(self, name: str) -> Poly:
        return self.ctx.gen(self._index[name])

    def __getitem__(self, name: str) -> Poly:
        return self.var(name)

    def index(self, name: str) -> int:
        return self._index[name]

    def const(self, c) -> Poly:
        return self.ctx.constant(fmpq(c) if not isinstance(c, fmpq) else c)

    def zero(self) -> Poly:
        return self.ctx.constant(0)

    def one(self) -> Poly:
        return self.ctx.constant(1)

    def monomial(self, exps: Sequence[int], c=1) -> Poly:
        return self.ctx.term(coeff=fmpq(c) if not isinstance(c, fmpq) else c, exp_vec=tuple(exps))

    def parse(self, text: str) -> Poly:
        expr = sympy.sympify(text, locals={n: sympy.Symbol(n) for n in self.names})
        return self.from_sympy(expr)

    def from_sympy(self, expr) -> Poly:
        gens = [sympy.Symbol(n) for n in self.names]
        p = sympy.Poly(sympy.expand(expr), *gens, domain="QQ")
        return self.ctx.from_dict({m: fmpq(int(c.p), int(c.q)) for m, c in p.terms()})

    def to_sympy(self, p: Poly):
        gens = [sympy.Symbol(n) for n in self.names]
        acc = sympy.Integer(0)
        for m, c in zip(p.monoms(), p.coeffs()):
            term = sympy.Rational(int(c.p), int(c.q))
            for g, e in zip(gens, m):
                if e:
                    term *= g**e
            acc += term
        return acc

    def embed(self, p: Poly, source: "PolyRing") -> Poly:
        """Reinterpret p from `source` (whose names are a subset) in self."""
        if source == self:
            return p
        return p.compose(*[self.var(n) for n in source.names], ctx=self.ctx)

    def hom(self, p: Poly, images: dict, source: "PolyRing") -> Poly:
        """Substitute source variables by polynomials of self (missing names
        map to themselves, which must then exist in self)."""
        args = [images[n] if n in images else self.var(n) for n in source.names]
        return p.compose(*args, ctx=self.ctx)

    def monomials_upto(self, deg: int, names: Sequence[str] | None = None) -> list[tuple[int, ...]]:
        """Exponent vectors of total degree <= deg in the given variables."""
        idx = [self._index[n] for n in (names if names is not None else self.names)]
        out = []

        def rec(k, left, cur):
            if k == len(idx):
                v = [0] * self.nvars
                for i, e in zip(idx, cur):
                    v[i] = e
                out.append(tuple(v))
                return
            for e in range(left + 1):
                rec(k + 1, left - e, cur + [e])

        rec(0, deg, [])
        out.sort(key=lambda m: (sum(m), tuple(-e for e in m)))
        return out


def ring(names: Iterable[str]) -> PolyRing:
    return PolyRing(tuple(names))


def terms(p: Poly) -> list[tuple[tuple[int, ...], fmpq]]:
    return list(zip(p.monoms(), p.coeffs()))


def total_degree(p: Poly) -> int:
    if p.is_zero():
        return -1
    return max(sum(m) for m in p.monoms())


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


class Ideal:
    """Ideal of a PolyRing given by generators; normal forms via a reduced
    Groebner basis (degrevlex)."""

    __slots__ = ("ring", "gens", "gb", "_lead")

    def __init__(self, R: PolyRing, gens: Iterable[Poly], gb: Sequence[Poly] | None = None):
        self.ring = R
        self.gens = tuple(g for g in gens if not g.is_zero())
        if gb is None:
            gb = _groebner(R, self.gens)
        self.gb = tuple(gb)
        self._lead = [(g.monoms()[0], g.coeffs()[0], g) for g in self.gb]

    @staticmethod
    def zero(R: PolyRing) -> "Ideal":
        return Ideal(R, (), ())

    def is_unit(self) -> bool:
        return any(all(e == 0 for e in m) for m, _, _ in self._lead)

    def reduce(self, p: Poly) -> Poly:
        """Normal form of p."""
        if not self._lead or p.is_zero():
            return p
        ctx = self.ring.ctx
        rem = {}
        while not p.is_zero():
            ms = p.monoms()
            m, c = ms[0], p.coeffs()[0]
            for lm, lc, g in self._lead:
                if _divides(lm, m):
                    q = tuple(a - b for a, b in zip(m, lm))
                    p = p - ctx.term(coeff=c / lc, exp_vec=q) * g
                    break
            else:
                rem[m] = c
                p = p - ctx.term(coeff=c, exp_vec=m)
        return ctx.from_dict(rem) if rem else ctx.constant(0)

    def contains(self, p: Poly) -> bool:
        return self.reduce(p).is_zero()

    def standard(self, m: Sequence[int]) -> bool:
        """True if the monomial is not divisible by any leading monomial."""
        return not any(_divides(lm, m) for lm, _, _ in self._lead)

    def __add__(self, other: "Ideal") -> "Ideal":
        if other.ring != self.ring:
            raise ValueError("ideals in different rings")
        return Ideal(self.ring, self.gens + other.gens)

    def extend(self, R: PolyRing) -> "Ideal":
        """Same generators read in a bigger ring (names a superset)."""
        gens = [R.embed(g, self.ring) for g in self.gens]
        gb = [R.embed(g, self.ring) for g in self.gb]
        # degrevlex restricted to a subset of variables in the same relative
        # order keeps leading monomials, so the basis stays a Groebner basis.
        if _order_compatible(self.ring.names, R.names):
            return Ideal(R, gens, gb)
        return Ideal(R, gens)

    def __repr__(self):
        return f"Ideal({', '.join(str(g) for g in self.gens) or '0'})"


def _order_compatible(small: Sequence[str], big: Sequence[str]) -> bool:
    pos = [big.index(n) for n in small]
    return pos == sorted(pos)


def disjoint_sum(R: PolyRing, ideals: Sequence[Ideal]) -> Ideal:
    """Sum of ideals; when their bases use pairwise disjoint variables the
    union of the bases is already a Groebner basis."""
    seen: set = set()
    disjoint = True
    for I in ideals:
        used = {n for g in I.gb for n in _used(g, I.ring)}
        if used & seen:
            disjoint = False
        seen |= used
    if not disjoint:
        return Ideal(R, [R.embed(g, I.ring) for I in ideals for g in I.gens])
    gens, gb = [], []
    for I in ideals:
        E = I.extend(R)
        gens.extend(E.gens)
        gb.extend(E.gb)
    return Ideal(R, gens, gb)


def _used(p: Poly, R: PolyRing) -> list[str]:
    used = [False] * R.nvars
    for m in p.monoms():
        for i, e in enumerate(m):
            if e:
                used[i] = True
    return [n for n, u in zip(R.names, used) if u]


@lru_cache(maxsize=256)
def _groebner_cached(names: tuple, gens_text: tuple) -> tuple:
    R = PolyRing(names)
    syms = [sympy.Symbol(n) for n in names]
    exprs = [sympy.sympify(t, locals={n: s for n, s in zip(names, syms)}) for t in gens_text]
    G = sympy.groebner(exprs, *syms, order="grevlex", domain="QQ")
    return tuple(str(R.from_sympy(g.as_expr())) for g in G.exprs)


def _groebner(R: PolyRing, gens: Sequence[Poly]) -> tuple:
    if not gens:
        return ()
    key = tuple(sorted(str(R.to_sympy(g)) for g in gens))
    texts = _groebner_cached(R.names, key)
    out = []
    for t in texts:
        g = R.parse(t)
        lc = g.coeffs()[0]
        out.append(g * (1 / lc))
    return tuple(out)


def check_degree(p: Poly, cap: int, what: str = "polynomial"):
    if total_degree(p) > cap:
        raise DegreeOverflow(f"{what} has degree {total_degree(p)} > cap {cap}")


def coefficient_split(p: Poly, R: PolyRing, leg: Sequence[str]) -> dict:
    """Write p = sum_m c_m * m with m monomials in the `leg` variables and
    c_m free of them. Returns {leg exponent tuple: c_m}."""
    idx = [R.index(n) for n in leg]
    out: dict = {}
    ctx = R.ctx
    for m, c in zip(p.monoms(), p.coeffs()):
        key = tuple(m[i] for i in idx)
        rest = list(m)
        for i in idx:
            rest[i] = 0
        t = ctx.term(coeff=c, exp_vec=tuple(rest))
        out[key] = out[key] + t if key in out else t
    return out


def vector(p: Poly, basis_index: dict) -> dict:
    """Sparse coordinate vector of p over a monomial basis {exps: column}."""
    out = {}
    for m, c in zip(p.monoms(), p.coeffs()):
        if m not in basis_index:
            raise KeyError(m)
        out[basis_index[m]] = c
    return out
