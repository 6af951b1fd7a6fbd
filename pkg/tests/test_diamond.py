from fractions import Fraction

import pytest

from oracle import expansion, series_terms, sym
from pvpatch.diamond import (
    SPECIALS,
    DiamondElem,
    FieldTag,
    audit,
    embed,
    intersect_to_F,
    special_series,
    split_additive,
    split_tagged,
)
from pvpatch.errors import IllegalCoercion, NotInF
from pvpatch.scalars import BiRatFunc, TruncatedSeries, expand

X, T = BiRatFunc.x(), BiRatFunc.t()
WIN = (-10, 10)


def terms(s):
    return {(i, e): c for i, e, c in s.terms()}


def test_tag_order():
    F, F1, F2, F0 = FieldTag.F, FieldTag.F1, FieldTag.F2, FieldTag.F0
    assert F <= F1 and F <= F2 and F1 <= F0 and F2 <= F0
    assert not F1 <= F2 and not F2 <= F1
    assert F1.join(F2) is F0 and F.join(F1) is F1


def test_embed_up():
    e = DiamondElem.from_F(X * X, 4, WIN)
    assert embed(e, FieldTag.F1).tag is FieldTag.F1
    lp = DiamondElem.special("logP", 4, WIN)
    assert embed(lp, FieldTag.F0).tag is FieldTag.F0


def test_embed_across_is_illegal():
    lu = DiamondElem.special("logU", 4, WIN)
    with pytest.raises(IllegalCoercion):
        embed(lu, FieldTag.F1)


def test_split_decision_rule():
    s = TruncatedSeries.from_terms({(0, -2): 1, (0, 0): 3, (0, 1): 2}, 2, WIN)
    p, u = split_additive(s)
    assert terms(p) == {(0, 1): 2}
    assert terms(u) == {(0, -2): 1, (0, 0): 3}
    z = TruncatedSeries.zero(3, WIN)
    p, u = split_additive(z)
    assert p.known_zero() and u.known_zero()


def test_split_geometric():
    p, u = split_additive(expand(1 / (1 - T * X), 6, WIN))
    assert terms(p) == {(i, i): 1 for i in range(1, 6)}
    assert terms(u) == {(0, 0): 1}


def test_split_tagged_sides():
    p, u = split_tagged(expand((X + T) / (X - T), 5, WIN))
    assert p.tag is FieldTag.F1 and u.tag is FieldTag.F2
    assert audit(p) and audit(u)


def test_intersect_round_trip():
    m = intersect_to_F(expand(X / (X - T), 10, WIN), (2, 2, 2, 2))
    assert m.value == X / (X - T)


def test_intersect_constant():
    assert intersect_to_F(expand(BiRatFunc.const(7), 4, WIN), (0, 0, 0, 0)).value == BiRatFunc.const(7)


def test_logP_is_not_in_F():
    with pytest.raises(NotInF):
        intersect_to_F(special_series("logP", 14, WIN), (6, 6, 6, 6))


@pytest.mark.parametrize("kind", ["logP", "logU", "expP", "expU"])
def test_special_closed_form_derivatives(kind):
    assert SPECIALS[kind].check(8, WIN)


@pytest.mark.parametrize("kind, text", [
    ("logP", "-log(1 - t*x)"),
    ("logU", "-log(1 - t/x)"),
    ("expP", "exp(t*x)"),
    ("expU", "exp(t/x)"),
])
def test_special_series_against_sympy(kind, text):
    e, _ = sym(text)
    assert series_terms(special_series(kind, 7, WIN), 9) == expansion(e, 7, 9)


def test_provenance_propagates():
    a = DiamondElem.special("logP", 5, WIN)
    b = DiamondElem.from_F(X, 5, WIN)
    c = DiamondElem.special("logU", 5, WIN)
    assert (a * b).tag is FieldTag.F1
    assert (a + c).tag is FieldTag.F0
    assert audit(a * b + b)


def test_p_series_rejects_negative_exponents():
    with pytest.raises(IllegalCoercion):
        DiamondElem.p_series(TruncatedSeries.from_terms({(0, -1): Fraction(1)}, 2, WIN))
    with pytest.raises(IllegalCoercion):
        DiamondElem.u_poly(TruncatedSeries.from_terms({(0, 1): Fraction(1)}, 2, WIN))
