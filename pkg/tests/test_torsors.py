import pytest

from pvpatch.diamond import FieldTag
from pvpatch.errors import DegreeOverflow, FixtureRequired, ZeroScalar
from pvpatch.groups import get_group, trivial
from pvpatch.matrices import Mat
from pvpatch.scalars import BiRatFunc
from pvpatch.torsors import (
    DifferentialStructure,
    FiniteAlgebra,
    TorsorPresentation,
    constants_bounded,
    derivation_well_defined,
    diff_ideal_correspondence_check,
    make_trivial_torsor,
    pv_report,
    rescale_derivation,
    same_structure,
    transport_derivation,
)

X, T = BiRatFunc.x(), BiRatFunc.t()
ZERO, ONE = BiRatFunc.const(0), BiRatFunc.const(1)


def gm(a):
    return DifferentialStructure(make_trivial_torsor(get_group("Gm")), Mat([[a]]))


def test_trivial_torsor_Gm():
    S = make_trivial_torsor(get_group("Gm"))
    assert tuple(S.ring.names) == ("z11", "zdi")
    img = S.coaction.apply(S.ring.parse("z11"))
    assert str(img).replace(" ", "") == "z11*u11"
    assert S.is_torsor()


def test_trivial_torsor_SL2_and_GL2():
    S = make_trivial_torsor(get_group("SL2"))
    assert [str(r) for r in S.relations()] == [
        "-z12*z21*zdi + z11*z22*zdi - 1", "-z12*z21 + z11*z22 - 1", "zdi - 1"]
    G = make_trivial_torsor(get_group("GL2"))
    assert [str(r) for r in G.relations()] == ["-z12*z21*zdi + z11*z22*zdi - 1"]
    assert tuple(G.ring.names) == ("z11", "z12", "z21", "z22", "zdi")
    assert S.is_torsor() and G.is_torsor()


def test_GLn_any_A_well_defined():
    A = Mat([[X, T], [ONE, X * X]])
    assert derivation_well_defined(make_trivial_torsor(get_group("GL2")), A).ok


def test_SL2_nilpotent_well_defined():
    A = Mat([[ZERO, X / (1 - T)], [ZERO, ZERO]])
    assert derivation_well_defined(make_trivial_torsor(get_group("SL2")), A).ok


def test_SL2_trace_one_rejected():
    rep = derivation_well_defined(make_trivial_torsor(get_group("SL2")), Mat([[ONE, ZERO], [ZERO, ZERO]]))
    assert not rep.ok
    assert "not in the ideal" in rep.offending
    # delta(det Z - 1) = tr(A) det Z, which reduces to 1 modulo the ideal
    assert ("-z12*z21 + z11*z22 - 1", ["1"]) in rep.certificate


def test_rescale_by_one_is_identity():
    ds = gm(ONE)
    assert same_structure(rescale_derivation(ds, 1), ds)


def test_rescale_by_x():
    r = rescale_derivation(gm(ONE), X)
    assert r.A[0, 0] == X and r.scale == X


def test_rescale_by_zero_refused():
    with pytest.raises(ZeroScalar):
        rescale_derivation(gm(ONE), 0)


def test_rescale_preserves_constants_verdict():
    ds = gm(ONE)
    a = pv_report(ds, 2, (6, 6, 6, 6)).constants.new_constants
    b = pv_report(rescale_derivation(ds, X), 2, (6, 6, 6, 6)).constants.new_constants
    assert a == b is False


def test_Gm_zero_has_new_constant():
    rep = constants_bounded(gm(ZERO), 1)
    assert rep.new_constants
    assert any("z11" in p for p in rep.polys(gm(ZERO).torsor))


def test_Gm_one_has_no_new_constants():
    rep = constants_bounded(gm(ONE), 2, (6, 6, 6, 6))
    assert not rep.new_constants
    assert rep.verdict == "no new constants up to monomial degree <= 2, coefficient bounds (6, 6, 6, 6)"


def test_trivial_group_constants_are_K():
    ds = DifferentialStructure(make_trivial_torsor(trivial(1)), Mat([[ZERO]]))
    assert not constants_bounded(ds, 2).new_constants


def test_constants_degree_cap():
    with pytest.raises(DegreeOverflow):
        constants_bounded(gm(ONE), 5, degree_cap=4)


def test_transport_identity():
    ds = gm(X)
    S = ds.torsor
    out = transport_derivation(ds, S, {"z11": S.ring.parse("z11"), "zdi": S.ring.parse("zdi")})
    assert same_structure(out, ds)


def test_transport_borel_to_diagonal():
    a, b = X / (1 - T), T * X
    ds = DifferentialStructure(make_trivial_torsor(get_group("Borel")), Mat([[a, b], [ZERO, -a]]))
    R = ds.torsor.ring
    target = TorsorPresentation(get_group("Gm"), FieldTag.F, "q")
    out = transport_derivation(ds, target, {"q11": R.parse("z11"), "qdi": R.parse("z22")})
    assert out.A[0, 0] == a


def test_transport_to_constants():
    ds = gm(X)
    target = TorsorPresentation(trivial(1), FieldTag.F, "q")
    R = ds.torsor.ring
    out = transport_derivation(ds, target, {"q11": R.one(), "qdi": R.one()})
    assert out.A[0, 0].is_zero()


@pytest.mark.parametrize("alg, count", [(FiniteAlgebra.K(), 2), (FiniteAlgebra.dual_numbers(), 3),
                                        (FiniteAlgebra.KxK(), 4)])
def test_ideal_correspondence(alg, count):
    rep = diff_ideal_correspondence_check(gm(ONE), alg)
    assert rep.ok
    assert len(rep.ideals) == count


def test_correspondence_needs_simple_fixture():
    with pytest.raises(FixtureRequired):
        diff_ideal_correspondence_check(gm(ZERO), FiniteAlgebra.K())
