import pytest
import sympy

from pvpatch.diamond import SPECIALS
from pvpatch.errors import BadAction, NotNormal
from pvpatch.groups import get_group
from pvpatch.induction import (
    canonical_embedding_surjective,
    corrupt_row,
    evaluation_is_isomorphism,
    field_K,
    ind_GG_isomorphism,
    induce,
    induce_finite_galois,
    intersection_invariants_fixture,
    quadratic_algebra,
    quotient_by_normal,
    shipped_fixtures,
    trivial_induces_trivial,
    unipotent_fixture,
    verify_ind_identities,
)
from pvpatch.torsors import TorsorPresentation, make_trivial_torsor


@pytest.mark.parametrize("G", ["Gm", "Ga", "Borel"])
def test_ind_G_G_is_Y(G):
    rep = ind_GG_isomorphism(get_group(G), 2)
    assert rep.ok, rep.dims


@pytest.mark.parametrize("H, G", [("Ga", "Borel"), ("Gm_torus", "Borel"), ("Ga", "SL2")])
def test_trivial_induces_trivial(H, G):
    rep = trivial_induces_trivial(get_group(H), get_group(G), 2)
    assert rep.ok, rep.dims


def test_unipotent_generators_are_entries_of_Z0_T():
    ind = unipotent_fixture()
    R = ind.ring
    gens = {k: R.to_sympy(v) for k, v in ind.generators.items()}
    y11, y12, y21, y22 = sympy.symbols("y11 y12 y21 y22")
    T = sympy.Matrix(2, 2, sympy.symbols("t11 t12 t21 t22"))
    Y = sympy.Matrix([[y11, y12], [y21, y22]])
    W = Y * T
    for i in range(2):
        for j in range(2):
            assert sympy.expand(gens[f"w{i + 1}{j + 1}"] - W[i, j]) == 0
    # invariance oracle on the Ga-torsor: y -> y h_c, T -> h_c^-1 T
    c = sympy.Symbol("c")
    h = sympy.Matrix([[1, c], [0, 1]])
    pt = {y11: 1, y21: 0, y22: 1}
    W0 = (Y * T).subs(pt)
    W1 = ((Y * h) * (h.inv() * T)).subs(pt)
    assert (W1 - W0).applyfunc(sympy.expand) == sympy.zeros(2, 2)


def test_unipotent_induced_equation():
    ind = unipotent_fixture()
    assert ind.A is not None
    assert ind.A[0, 1] == SPECIALS["logP"].derivative
    assert ind.A[1, 0].is_zero() and ind.A[0, 0].is_zero() and ind.A[1, 1].is_zero()


def test_quotient_G_by_G_is_point():
    q = quotient_by_normal(make_trivial_torsor(get_group("Borel")), get_group("Borel"), 3)
    assert q.is_point and q.certificate["invariants_are_constants"]


def test_quotient_borel_by_Ga():
    q = quotient_by_normal(make_trivial_torsor(get_group("Borel")), get_group("Ga"), 3)
    assert q.quotient_group.name == "Gm"
    assert str(q.generators["q11"]) == "z11"
    c = q.certificate
    assert c["invariant"] and c["generates"] and c["coaction_restricts"]


def test_central_quotient_not_in_catalog():
    with pytest.raises(NotNormal):
        quotient_by_normal(make_trivial_torsor(get_group("SL2")), get_group("center_SL2"), 2)


def test_borel_is_rejected_and_really_not_normal():
    with pytest.raises(NotNormal):
        quotient_by_normal(make_trivial_torsor(get_group("SL2")), get_group("Borel"), 2)
    # a conjugate of an upper unipotent leaves the Borel (t21 = 0 fails)
    g, b = sympy.Matrix([[1, 0], [1, 1]]), sympy.Matrix([[1, 1], [0, 1]])
    assert (g * b * g.inv())[1, 0] != 0


def test_ind_identities_borel():
    rep = verify_ind_identities("Borel", 3)
    assert rep.quotient_is_KH and rep.quotient_recovers_R


def test_ind_identity_E_equals_G():
    # E = G: the induced torsor is G itself and the identity is the quotient one
    q = quotient_by_normal(make_trivial_torsor(get_group("GmxGm")), get_group("Gm_first"), 3)
    assert q.quotient_group.name == "Gm"


@pytest.mark.parametrize("name", sorted(shipped_fixtures()))
def test_canonical_embedding_surjective(name):
    ind = shipped_fixtures()[name]
    assert canonical_embedding_surjective(ind, 2)
    assert not canonical_embedding_surjective(corrupt_row(ind, 0), 2)


def test_equivariance_square():
    ind = induce(TorsorPresentation(get_group("Ga"), prefix="y"), get_group("Borel"))
    assert ind.equivariance_square()


def test_intersection_fixture():
    rep = intersection_invariants_fixture(2)
    assert rep.ok


def test_finite_induction_H_equals_G():
    L = quadratic_algebra(3)
    ind = induce_finite_galois(L, 2, 2)
    assert ind.dim == L.dim and evaluation_is_isomorphism(ind, L)


def test_finite_induction_from_trivial():
    ind = induce_finite_galois(field_K(), 5, 1)
    assert ind.dim == 5 and ind.invariants_dim() == 1 and ind.is_galois()


def test_finite_induction_C4_from_C2():
    ind = induce_finite_galois(quadratic_algebra(2), 4, 2)
    assert ind.dim == 4
    assert ind.invariants_dim() == 1
    assert ind.is_galois()


def test_bad_action_rejected():
    L = quadratic_algebra(2)
    bad = type(L)(L.mult, L.order, [[[1, 0], [0, 2]]] * L.order, "bad")
    with pytest.raises(BadAction):
        bad.check_action()
