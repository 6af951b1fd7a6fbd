import json
from pathlib import Path

import pytest
import sympy

from oracle import laurent_poly, sym, t, x
from pvpatch.diamond import DiamondElem, FieldTag
from pvpatch.ebp import (
    PVPresentation,
    base_change_derivation_check,
    borel_ebp,
    build_hypothesis_data,
    compositum_base_change,
    gm_expP_fixture,
    gm_inverse,
    n_trivial_ebp,
    reject_non_split,
    solve_split_ebp,
)
from pvpatch.errors import NonSplitEBP, PreconditionFailed
from pvpatch.matrices import Mat

FROZEN = json.loads((Path(__file__).parent / "fixtures" / "borel_ebp_A.json").read_text())
WIN = (-12, 12)


@pytest.fixture(scope="module")
def borel():
    return solve_split_ebp(borel_ebp(10, WIN), 10, (8, 8, 8, 8), 2)


def test_base_change_trivial():
    one = Mat([[DiamondElem.from_F(1, 6, WIN)]])
    zero = Mat([[DiamondElem.from_F(0, 6, WIN)]])
    R = PVPresentation("trivial1", FieldTag.F, zero, one)
    R2 = compositum_base_change(R)
    assert R2.level is FieldTag.F2 and R2.group.n == 1 and R2.group.order == 1


def test_base_change_Gm_keeps_equation():
    R = gm_expP_fixture(8, WIN)
    R2 = compositum_base_change(R)
    assert R2.level is FieldTag.F2 and R2.A is R.A
    assert R2.A_F[0, 0].to_text() == "(t) / (1)"
    assert R2.witness_tag() is FieldTag.F0


def test_base_change_derivation_compatible():
    R = gm_expP_fixture(8, WIN)
    assert base_change_derivation_check(R, compositum_base_change(R), 8, count=20)


def test_base_change_refuses_F0_witness():
    R = gm_expP_fixture(6, WIN)
    bad = PVPresentation("Gm", FieldTag.F, R.A, Mat([[DiamondElem.special("expU", 6, WIN) * R.witness[0, 0]]]))
    with pytest.raises(PreconditionFailed):
        compositum_base_change(bad)


def test_hypothesis_N_trivial():
    P = build_hypothesis_data(n_trivial_ebp(8, WIN))
    assert P.patch1.subgroup.name.startswith("trivial")
    assert all(e.value.matches(P.patch1.Z[i, j].value) for i, j, e in P.patch1.Z.entries())


def test_hypothesis_borel_blocks():
    P = build_hypothesis_data(borel_ebp(8, WIN))
    assert (P.patch1.subgroup.name, P.patch2.subgroup.name) == ("Ga", "Gm_torus")
    assert P.patch1.Z.n == 2 and P.patch2.Z[0, 1].is_zero() and P.patch2.Z[1, 0].is_zero()
    assert P.check()


def test_hypothesis_H_trivial():
    P = build_hypothesis_data(gm_inverse(8, WIN))
    assert P.patch2.subgroup.name.startswith("trivial")


def test_N_trivial_solution_is_R():
    sol = solve_split_ebp(n_trivial_ebp(10, WIN), 10)
    assert sol.ok
    assert sol.solution.A[0, 0].to_text() == "(t) / (1) + O(t^10)"
    assert "degenerate pair: recovery is the identity" in sol.recovery.details


def test_borel_frozen(borel):
    assert [[a.to_text() for a in r] for r in borel.solution.A.rows] == FROZEN["A"]
    assert borel.solution.A[1, 0].is_zero()


def test_borel_recovery(borel):
    rec = borel.recovery
    assert rec.generator_match and rec.coaction_match and rec.derivation_match and rec.injective
    assert borel.report.ok


def test_borel_equation_independent_oracle(borel):
    Z = sympy.Matrix(2, 2, lambda i, j: laurent_poly(borel.solution.Z[i, j].value))
    for i in range(2):
        parts = [sympy.fraction(sympy.together(sym(FROZEN["A"][i][k])[0])) for k in range(2)]
        D = parts[0][1] * parts[1][1]
        for col in range(2):
            total = D * sympy.diff(Z[i, col], x)
            for k, (num, _) in enumerate(parts):
                total -= num * parts[1 - k][1] * Z[k, col]
            total = sympy.expand(total * x**40)
            assert all(sympy.expand(total.coeff(t, m)) == 0 for m in range(10))


def test_gm_inverse():
    sol = solve_split_ebp(gm_inverse(10, WIN), 10)
    assert sol.ok
    assert sol.solution.A[0, 0].to_text() == "(-t) / (x^2) + O(t^10)"


def test_non_split_rejected():
    with pytest.raises(NonSplitEBP):
        reject_non_split({"split": False})
    reject_non_split({"split": True})
