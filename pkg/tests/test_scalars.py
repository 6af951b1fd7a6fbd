from fractions import Fraction

import pytest
import sympy
from flint import fmpq_poly

from oracle import expansion, series_terms, sym, t
from pvpatch.errors import DenominatorDegenerate, InsufficientPrecision, NoReconstruction
from pvpatch.scalars import (
    BiRatFunc,
    RatFunc,
    TruncatedSeries,
    XLaurent,
    derive,
    expand,
    parse_biratfunc,
    rational_reconstruct,
)

X, T = BiRatFunc.x(), BiRatFunc.t()
WIN = (-10, 10)


def test_derive_power_rule():
    assert derive(RatFunc(fmpq_poly([0, 0, 1]))) == RatFunc(fmpq_poly([0, 2]))
    assert derive(XLaurent.monomial(-1)) == XLaurent.monomial(-2, -1)
    assert derive(X * X) == 2 * X


def test_derive_geometric_against_quotient_rule():
    f = 1 / (1 - T * X)
    got = expand(derive(f), 6, WIN)
    want, _ = sym("t / (1 - t*x)^2")
    assert series_terms(got, 8) == expansion(want, 6, 8)
    assert derive(f) == T / ((1 - T * X) * (1 - T * X))


def test_expand_constant():
    s = expand(BiRatFunc.const(1), 5, WIN)
    assert list(s.terms()) == [(0, 0, 1)]


def test_expand_geometric():
    s = expand(1 / (1 - T * X), 7, WIN)
    assert series_terms(s, 10) == {(i, i): 1 for i in range(7)}


def test_expand_moebius_against_long_division():
    s = expand((X + T) / (X - T), 6, WIN)
    want = {(0, 0): 1}
    want.update({(i, -i): 2 for i in range(1, 6)})
    assert series_terms(s, 8) == want
    e, _ = sym("(x + t) / (x - t)")
    assert series_terms(s, 8) == expansion(e, 6, 8)


def test_series_derivative_commutes_with_expand():
    f = (X * X + T) / (1 - T * X * X)
    assert expand(f, 6, WIN).derive().matches(expand(derive(f), 6, WIN))


def test_reconstruct_geometric():
    s = expand(1 / (1 - T * X), 8, WIN)
    assert rational_reconstruct(s, (1, 1, 1, 1)) == 1 / (1 - T * X)


def test_reconstruct_constant():
    f = rational_reconstruct(expand(BiRatFunc.const(5), 4, WIN), (0, 0, 0, 0))
    assert f == BiRatFunc.const(5) and f.to_text() == "(5) / (1)"


def test_reconstruct_exponential_fails():
    terms = {(i, i): Fraction(1, sympy.factorial(i)) for i in range(12)}
    s = TruncatedSeries.from_terms(terms, 12, WIN)
    with pytest.raises(NoReconstruction):
        rational_reconstruct(s, (4, 4, 4, 4))


def test_reconstruct_needs_precision():
    s = expand(1 / (1 - T * X), 3, WIN)
    with pytest.raises(InsufficientPrecision):
        rational_reconstruct(s, (4, 4, 4, 4))


def test_field_mode_accepts_truncated_numerator():
    # numerator with a non-rational t-expansion (an exponential in t) over 1 - x
    num = sum(T**i * Fraction(1, sympy.factorial(i)) for i in range(9))
    s = expand(num / (1 - X), 9, WIN)
    f = rational_reconstruct(s, (0, 1, 0, 1), mode="field")
    assert f.t_prec == 9
    assert f.expand(9, WIN).matches(s)


def test_truncated_needs_unit_denominator():
    with pytest.raises(DenominatorDegenerate):
        BiRatFunc(X.num, T.num, 4)


def test_text_round_trip():
    f = (3 * X * X - T) / (2 * X - 7 * T * T)
    assert parse_biratfunc(f.to_text()) == f
    g = f.truncate(5)
    assert parse_biratfunc(g.to_text()).t_prec == 5


def test_xlaurent_inverse():
    u = XLaurent.from_terms({-1: 1, 0: 1})
    v = u.inverse(6)
    assert (u * v).matches(XLaurent.monomial(0))


def test_series_inverse():
    s = expand(1 + T * X + T * T / X, 6, WIN)
    prod = s * s.inverse()
    assert prod.matches(TruncatedSeries.const(1, 6, WIN))


def test_split_exponent_rule():
    s = TruncatedSeries.from_terms({(0, -2): 1, (0, 0): 3, (0, 1): 2}, 3, WIN)
    p, u = s.split()
    assert dict(((i, e), c) for i, e, c in p.terms()) == {(0, 1): 2}
    assert dict(((i, e), c) for i, e, c in u.terms()) == {(0, -2): 1, (0, 0): 3}


def test_sympy_oracle_sanity():
    e, prec = sym("(1) / (1 - t) + O(t^3)")
    assert prec == 3 and sympy.simplify(e - 1 / (1 - t)) == 0
