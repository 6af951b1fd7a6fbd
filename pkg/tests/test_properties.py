"""Property tests for the algebraic invariants of the kernel."""

import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from pvpatch.factorization import factorize, random_laurent_matrix, reassembly_residual
from pvpatch.groups import get_group
from pvpatch.matrices import Mat
from pvpatch.scalars import BiRatFunc, TruncatedSeries, rational_reconstruct
from pvpatch.torsors import derivation_well_defined, make_trivial_torsor

PREC, WIN = 12, (-8, 16)
X, T = BiRatFunc.x(), BiRatFunc.t()
SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])

small = st.integers(-3, 3)


@st.composite
def polys(draw, unit: bool = False):
    p = BiRatFunc.const(1 if unit else draw(small))
    for a in range(3):
        for b in range(3):
            if (a, b) != (0, 0) and draw(st.booleans()):
                p = p + draw(small) * X ** a * T ** b
    return p


@st.composite
def birats(draw):
    # denominators with constant term 1 expand without x-poles at t = 0
    return draw(polys()) / draw(polys(unit=True))


def one():
    return TruncatedSeries.const(1, PREC, WIN)


@SETTINGS
@given(birats(), birats(), birats())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a - a).is_zero()


@SETTINGS
@given(birats(), birats())
def test_leibniz(a, b):
    assert (a * b).derive() == a.derive() * b + a * b.derive()


@SETTINGS
@given(birats(), birats())
def test_expand_is_a_ring_homomorphism(a, b):
    ea, eb = a.expand(PREC, WIN), b.expand(PREC, WIN)
    assert (a + b).expand(PREC, WIN).matches(ea + eb)
    assert (a * b).expand(PREC, WIN).matches(ea * eb)


@SETTINGS
@given(birats())
def test_expand_commutes_with_derivation(a):
    assert a.derive().expand(PREC, WIN).matches(a.expand(PREC, WIN).derive())


@SETTINGS
@given(birats())
def test_reconstruct_inverts_expand(a):
    # the strategy stays inside degree 2 in both variables, well under the bounds
    assert rational_reconstruct(a.expand(18, (-8, 20)), (8, 8, 8, 8), "exact") == a


@SETTINGS
@given(birats())
def test_series_inverse(a):
    if a.is_zero():
        a = a + 1
    e = a.expand(PREC, WIN)
    assert (e * e.inverse()).matches(one())


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10 ** 6), st.integers(1, 2))
def test_factorization_reassembles(seed, n):
    A = random_laurent_matrix(random.Random(seed), n, 8, (-6, 6))
    fz = factorize(A, 8, (-6, 6))
    assert fz.audit()
    assert reassembly_residual(fz, A) >= 8


@st.composite
def sl2_generators(draw):
    a = [[draw(birats()) for _ in range(2)] for _ in range(2)]
    if draw(st.booleans()):
        a[1][1] = -a[0][0]
    return Mat(a)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(sl2_generators())
def test_well_defined_iff_traceless(A):
    X_ = make_trivial_torsor(get_group("SL2"))
    assert derivation_well_defined(X_, A).ok == A.trace().is_zero()
