import itertools

import pytest
import sympy

from pvpatch.errors import DegreeOverflow, NotNormal
from pvpatch.groups import (
    STABILITY_FIXTURES,
    catalog_groups,
    check_hopf_axioms,
    check_ideal_stable,
    comultiply,
    comultiply_ring,
    get_group,
    group_algebra,
    intersection_invariants_equals_generated,
    invariants_bounded,
    left_right_invariants_agree,
    matrix_coaction,
    right_translation,
    stability_criteria_agree,
    twisted_translation,
)
from pvpatch.induction import _product_algebra
from pvpatch.polys import PolyRing


def sym_image(f_text, n=2):
    src = PolyRing([f"t{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1)] + ["tdi"])
    R = comultiply_ring(n)
    return R.to_sympy(comultiply(src.parse(f_text), n, src))


def test_comultiply_matrix_rule():
    a = sympy.symbols("t11 t12 t21 t22 u11 u12 u21 u22")
    t11, t12, t21, t22, u11, u12, u21, u22 = a
    assert sympy.expand(sym_image("t11") - (t11 * u11 + t12 * u21)) == 0


def test_comultiply_det_multiplicative():
    t11, t12, t21, t22, u11, u12, u21, u22 = sympy.symbols("t11 t12 t21 t22 u11 u12 u21 u22")
    dt, du = t11 * t22 - t12 * t21, u11 * u22 - u12 * u21
    assert sympy.expand(sym_image("t11*t22 - t12*t21") - dt * du) == 0


def test_comultiply_sl2_relation_in_ideal_sum():
    # explicit witness: D(det - 1) = (det - 1) det' + (det' - 1)
    t11, t12, t21, t22, u11, u12, u21, u22 = sympy.symbols("t11 t12 t21 t22 u11 u12 u21 u22")
    dt, du = t11 * t22 - t12 * t21, u11 * u22 - u12 * u21
    assert sympy.expand(sym_image("t11*t22 - t12*t21 - 1") - ((dt - 1) * du + (du - 1))) == 0


@pytest.mark.parametrize("G", [g.name for g in catalog_groups()])
def test_hopf_axioms(G):
    rep = check_hopf_axioms(get_group(G))
    assert rep.ok, rep.details


def test_zero_ideal_is_stable():
    act = right_translation(get_group("GL2"), get_group("Ga"))
    assert check_ideal_stable([act.algebra.ring.zero()], act).stable


def test_identity_point_not_stable_under_unipotents():
    act = right_translation(get_group("GL2"), get_group("Ga"))
    R = act.algebra.ring
    J = [R.parse(s) for s in ("t11 - 1", "t12", "t21", "t22 - 1")]
    cert = check_ideal_stable(J, act)
    assert not cert.stable
    assert cert.offending == "t12"  # its image t11*u12 + t12 acquires the fresh u12


def test_det_ideal_stable_under_SL2():
    act = right_translation(get_group("GL2"), get_group("SL2"))
    R = act.algebra.ring
    assert check_ideal_stable([R.parse("t11*t22 - t12*t21 - 1")], act).stable


@pytest.mark.parametrize("fixture", STABILITY_FIXTURES, ids=lambda f: f"{f[0]}-{f[1]}-{f[2][0]}")
def test_stability_criteria_agree(fixture):
    a, b = stability_criteria_agree(*fixture)
    assert a == b


def test_trivial_group_invariants_are_everything():
    G = get_group("GL2")
    B = invariants_bounded(right_translation(G, get_group("trivial")), 2)
    assert B.dim == len(group_algebra(G).standard_monomials(2))


@pytest.mark.parametrize("G", ["Ga", "Gm", "SL2"])
def test_KG_to_the_G_is_K(G):
    G = get_group(G)
    assert invariants_bounded(twisted_translation(G, G), 3).only_constants()


def test_Gm_diagonal_invariants_enumeration():
    Gm = get_group("Gm")
    alg = _product_algebra(Gm, Gm, "y", "t")
    act = matrix_coaction(alg, [("y", False), ("t", True)], Gm)
    B = invariants_bounded(act, 2)
    # oracle: standard monomials y^a ydi^b t^c tdi^d (never y*ydi or t*tdi);
    # weight a - b - c + d must vanish
    want = 0
    for a, b, c, d in itertools.product(range(3), repeat=4):
        if a + b + c + d <= 2 and not (a and b) and not (c and d) and a - b - c + d == 0:
            want += 1
    assert B.dim == want == 3
    zg = alg.ring.parse("y11*t11")
    assert act.combined_ideal.contains(act.apply(zg) - act.lift(zg))
    z = alg.ring.parse("y11")
    assert not act.combined_ideal.contains(act.apply(z) - act.lift(z))


def test_unipotent_pair_intersection_is_constants():
    rep = intersection_invariants_equals_generated(
        get_group("SL2"), [get_group("Ga"), get_group("Ga_lower")], get_group("SL2"), 3)
    assert rep.equal and rep.dims["intersection"] == 1


def test_single_subgroup_trivially_equal():
    Ga = get_group("Ga")
    assert intersection_invariants_equals_generated(get_group("SL2"), [Ga], Ga, 2).equal


def test_torus_pair_intersection():
    rep = intersection_invariants_equals_generated(
        get_group("GmxGm"), [get_group("Gm_first"), get_group("Gm_second")], get_group("GmxGm"), 2)
    assert rep.equal and rep.dims["intersection"] == 1


def test_left_right_full_translation():
    Gm = get_group("Gm")
    rep = left_right_invariants_agree(Gm, Gm, 3)
    assert rep.equal and rep.dims == {"right": 1, "left": 1}


def test_left_right_borel():
    assert left_right_invariants_agree(get_group("Borel"), get_group("Ga"), 3).equal


def test_left_right_refuses_non_normal():
    with pytest.raises(NotNormal):
        left_right_invariants_agree(get_group("SL2"), get_group("Ga"), 2)


def test_degree_cap_enforced():
    G = get_group("SL2")
    with pytest.raises(DegreeOverflow):
        invariants_bounded(twisted_translation(G, G), 5, degree_cap=4)
