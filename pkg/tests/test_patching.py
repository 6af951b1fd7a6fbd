import json
from pathlib import Path

import pytest
import sympy

from oracle import laurent_poly, sym, t, x
from pvpatch.diamond import FieldTag
from pvpatch.errors import GaugeMismatch
from pvpatch.groups import get_group
from pvpatch.matrices import Mat
from pvpatch.patching import (
    Patch,
    corrupt_gauge,
    patch,
    perturb,
    require_gauge,
    sl2_problem,
    special_matrix,
    theta_trivialize,
    trivial_problem,
    verify_solution,
)

FROZEN = json.loads((Path(__file__).parent / "fixtures" / "sl2_A.json").read_text())
WIN = (-12, 12)


@pytest.fixture(scope="module")
def sl2():
    P = sl2_problem(10, WIN)
    return P, patch(P, 10, (8, 8, 8, 8))


def test_theta_trivial_patch():
    I = special_matrix([[1, 0], [0, 1]], 6, WIN)
    th = theta_trivialize(Patch(get_group("trivial2"), I, special_matrix([[0, 0], [0, 0]], 6, WIN), FieldTag.F1))
    assert th.text == [["t11", "t12"], ["t21", "t22"]] and th.consistent


def test_theta_unipotent_patch():
    P = sl2_problem(6, WIN, literal=True)
    th = theta_trivialize(P.patch1, P)
    assert th.text == [["t11 + logP*t21", "t12 + logP*t22"], ["t21", "t22"]]
    assert th.consistent


def test_theta_Gm_patch():
    from pvpatch.diamond import SPECIALS
    from pvpatch.patching import _const_elem

    Z = special_matrix([["expP"]], 6, WIN)
    A = Mat([[_const_elem(SPECIALS["expP"].derivative, 6, WIN)]])
    th = theta_trivialize(Patch(get_group("Gm"), Z, A, FieldTag.F1))
    assert th.text == [["expP*t11"]] and th.consistent


def test_patch_trivial():
    P = trivial_problem(get_group("SL2"), 6, WIN)
    sol = patch(P, 6)
    assert all(a.is_zero() for _, _, a in sol.A.entries())
    assert all(e.value.matches(special_matrix([[1, 0], [0, 1]], 6, WIN)[i, j].value) for i, j, e in sol.Z.entries())
    rep = verify_solution(sol, P)
    assert rep.ok


def test_sl2_frozen_matrix(sl2):
    P, sol = sl2
    assert [[a.to_text() for a in row] for row in sol.A.rows] == FROZEN["A"]


def test_sl2_trace_zero(sl2):
    _, sol = sl2
    assert sol.A.trace().is_zero()
    assert sol.reconstruction_modes == ["field"] * 4


def _equation_defects(A_text, Zsol, prec=10):
    """sympy only: lowest t-order where den_0 den_1 (dZ - A Z) is nonzero, per
    row and column of Z (Z taken from its exact Laurent rows)."""
    Z = sympy.Matrix(2, 2, lambda i, j: laurent_poly(Zsol[i, j].value))
    bad = []
    for i in range(2):
        parts = [sympy.fraction(sympy.together(sym(A_text[i][k])[0])) for k in range(2)]
        D = parts[0][1] * parts[1][1]
        for col in range(2):
            total = D * sympy.diff(Z[i, col], x)
            for k, (num, _) in enumerate(parts):
                total -= num * parts[1 - k][1] * Z[k, col]
            total = sympy.expand(total * x**40)
            for m in range(prec):
                if sympy.expand(total.coeff(t, m)) != 0:
                    bad.append((i, col, m))
                    break
    return bad


def test_sl2_equation_independent_oracle(sl2):
    _, sol = sl2
    assert _equation_defects(FROZEN["A"], sol.Z) == []


def test_oracle_sees_a_perturbation(sl2):
    _, sol = sl2
    A = [list(r) for r in FROZEN["A"]]
    A[0][1] = A[0][1].replace(" + O(t^10)", " + x*t^9 + O(t^10)")
    assert _equation_defects(A, sol.Z)


def test_sl2_gauge_sides(sl2):
    _, sol = sl2
    assert all(e.tag <= FieldTag.F1 for _, _, e in sol.M1.entries())
    assert all(e.tag <= FieldTag.F2 for _, _, e in sol.M2.entries())
    assert sol.certificates["gauge_coherent_to"] == 10


def test_sl2_verification(sl2):
    P, sol = sl2
    rep = verify_solution(sol, P, 2, (6, 6, 6, 6))
    assert rep.ok
    assert not rep.constants.new_constants
    assert rep.coherence["pv_claimed"]


def test_perturbed_A_fails(sl2):
    P, sol = sl2
    rep = verify_solution(sol, P, 2, (6, 6, 6, 6), A=perturb(sol.A, 0, 1, 9))
    assert not rep.ok
    assert rep.residuals["equation"] == 9


def test_corrupted_gauge_detected(sl2):
    P, sol = sl2
    with pytest.raises(GaugeMismatch):
        require_gauge(corrupt_gauge(sol.M1, 5), P.patch1.Z, sol.M2, P.patch2.Z, 10)


def test_literal_atoms_give_trivial_torsor():
    # both witnesses inside their own patch fields: A = 0 and z11 is a constant
    P = sl2_problem(10, WIN, literal=True)
    sol = patch(P, 10, (8, 8, 8, 8))
    assert all(a.is_zero() for _, _, a in sol.A.entries())
    rep = verify_solution(sol, P, 2, (6, 6, 6, 6))
    assert rep.constants.new_constants
    assert not rep.ok


def test_borel_block_problem_upper_triangular():
    from pvpatch.ebp import borel_ebp, build_hypothesis_data

    P = build_hypothesis_data(borel_ebp(10, WIN))
    sol = patch(P, 10, (8, 8, 8, 8))
    assert sol.A[1, 0].is_zero()
    assert verify_solution(sol, P).ok
