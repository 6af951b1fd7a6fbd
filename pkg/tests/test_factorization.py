import random

import pytest
import sympy

from oracle import laurent_poly, t, x
from pvpatch.diamond import DiamondElem, FieldTag
from pvpatch.errors import PrecisionExhausted, SingularResidue
from pvpatch.factorization import (
    birkhoff_residue,
    factorize,
    random_laurent_matrix,
    reassemble_residue,
    reassembly_residual,
)
from pvpatch.matrices import Mat
from pvpatch.scalars import BiRatFunc, TruncatedSeries, XLaurent

X, T = BiRatFunc.x(), BiRatFunc.t()
WIN = (-6, 6)


def xl(terms):
    return XLaurent.from_terms(terms)


def ident(n, prec, window=WIN):
    one, zero = DiamondElem.from_F(1, prec, window), DiamondElem.from_F(0, prec, window)
    return Mat([[one if i == j else zero for j in range(n)] for i in range(n)])


def test_residue_identity():
    I = Mat([[xl({0: 1}), XLaurent.zero()], [XLaurent.zero(), xl({0: 1})]])
    r = birkhoff_residue(I)
    assert r.Lambda == (0, 0) and r.steps == 0
    assert all(a.matches(b) for (_, _, a), (_, _, b) in zip(r.Aplus.entries(), I.entries()))


def test_residue_middle_form():
    D = Mat([[xl({1: 1}), XLaurent.zero()], [XLaurent.zero(), xl({-1: 1})]])
    r = birkhoff_residue(D)
    assert r.Lambda == (1, -1)
    assert all(e.matches(xl({0: 1}) if i == j else XLaurent.zero()) for i, j, e in r.Aplus.entries())


@pytest.mark.parametrize("seed", range(8))
def test_residue_random_reassembles(seed):
    rng = random.Random(seed)
    while True:
        A = Mat([[xl({e: rng.randint(-3, 3) for e in range(-3, 4)}) for _ in range(2)] for _ in range(2)])
        try:
            r = birkhoff_residue(A)
            break
        except SingularResidue:
            continue
    back = reassemble_residue(r)
    for (_, _, a), (_, _, b) in zip(back.entries(), A.entries()):
        assert a.matches(b)
    # sides: Aminus in Q[x^-1], Aplus in the x-power series
    assert all(e.max_exponent() is None or e.max_exponent() <= 0 for _, _, e in r.Aminus.entries())
    assert all(e.known_zero() or e.lo >= 0 for _, _, e in r.Aplus.entries())


def test_factorize_identity():
    f = factorize(ident(2, 6), 6, WIN)
    assert f.verified and f.audit()
    assert all(e.value.matches(TruncatedSeries.const(int(i == j), 6, WIN)) for i, j, e in f.A2.entries())


def test_factorize_F_matrix_keeps_A2_trivial():
    B = Mat([[DiamondElem.from_F(1 + T, 6, WIN), DiamondElem.from_F(X, 6, WIN)],
             [DiamondElem.from_F(0, 6, WIN), DiamondElem.from_F(1 / (1 - X), 6, WIN)]])
    f = factorize(B, 6, WIN)
    assert f.A1 is B
    assert all(e.tag is FieldTag.F for _, _, e in f.A2.entries())
    assert reassembly_residual(f, B) == 6


def test_factorize_one_plus_tE():
    prec = 8
    c = DiamondElem.from_F(T * (X + 1 / X), prec, WIN).value
    one = TruncatedSeries.const(1, prec, WIN)
    A = Mat([[one + c, c], [c, one + c]])
    f = factorize(A, prec, WIN)
    assert f.audit()
    assert reassembly_residual(f, A) >= prec
    # independent oracle: multiply the factors back in sympy; any difference
    # below t^prec may only sit at x-exponents beyond the verified precision
    A1 = sympy.Matrix(2, 2, lambda i, j: laurent_poly(f.A1[i, j].value))
    A2i = sympy.Matrix(2, 2, lambda i, j: laurent_poly(f.A2_inv[i, j].value))
    c = t * (x + 1 / x)
    want = sympy.Matrix([[1 + c, c], [c, 1 + c]])
    for e in (A2i * A1 - want).applyfunc(sympy.expand):
        for k in range(prec):
            for term in sympy.Add.make_args(sympy.expand(e.coeff(t, k))):
                if term != 0:
                    assert term.as_coeff_exponent(x)[1] >= f.x_verified, (k, term)


def test_factorize_random_seeded():
    rng = random.Random(7)
    for n in (1, 2, 3):
        A = random_laurent_matrix(rng, n, 8, WIN)
        f = factorize(A, 8, WIN)
        assert reassembly_residual(f, A) >= 8 and f.audit()


def test_factorize_rejects_overprecision():
    A = Mat([[TruncatedSeries.const(1, 4, WIN)]])
    with pytest.raises(PrecisionExhausted):
        factorize(A, 6, WIN)


def test_factor_sides_are_tagged():
    rng = random.Random(3)
    f = factorize(random_laurent_matrix(rng, 2, 6, WIN), 6, WIN)
    assert all(e.tag <= FieldTag.F1 for _, _, e in f.A1.entries())
    assert all(e.tag <= FieldTag.F2 for _, _, e in f.A2.entries())
