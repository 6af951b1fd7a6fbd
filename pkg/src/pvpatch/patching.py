"""Differential torsor patching over the diamond.

Two patches give fundamental matrices Z1 (equation over F1) and Z2 (equation
over F2), both over F0. Factoring Q = Z2 Z1^-1 = M2^-1 M1 gives one matrix
Z = M1 Z1 = M2 Z2; its equation matrix dZ Z^-1 is then over F1 and over F2,
hence over F, and is recovered by rational reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .diamond import SPECIAL_KINDS, DiamondElem, FieldTag, audit, intersect_to_F
from .errors import (
    FactorizationFailed,
    GaugeMismatch,
    InsufficientPrecision,
    NotInF,
    PreconditionFailed,
    ReconstructionFailed,
    SingularFundamentalMatrix,
)
from .factorization import Factorization, factorize, reassembly_residual
from .groups import (
    GroupPresentation,
    check_ideal_stable,
    generated_subgroup,
    get_group,
    right_translation,
    subgroup_inclusion,
)
from .matrices import Mat
from .scalars import BiRatFunc, TruncatedSeries, _as_birat
from .torsors import (
    DEFAULT_CONST_BOUNDS,
    ConstantsReport,
    DifferentialStructure,
    constants_bounded,
    derivation_well_defined,
    make_trivial_torsor,
)

DEFAULT_T_PREC = 10
DEFAULT_X_WINDOW = (-12, 12)
DEFAULT_BOUNDS = (8, 8, 8, 8)


def _val(e):
    return e.value if isinstance(e, DiamondElem) else e


def values(M: Mat) -> Mat:
    return M.map(_val)


def _first_bad(D: Mat, prec: int) -> int | None:
    worst = None
    for _, _, e in D.entries():
        e = e.truncate_t(prec)
        for i, r in e.items():
            if not r.known_zero():
                worst = i if worst is None else min(worst, i)
                break
    return worst


def series_inverse(Z: Mat) -> Mat:
    """Z^-1 = adj(Z) det(Z)^-1 over truncated series."""
    d = Z.det()
    try:
        dinv = d.inverse()
    except ZeroDivisionError as ex:
        raise SingularFundamentalMatrix(f"fundamental matrix is singular at working precision: {ex}") from ex
    return Z.adjugate().map(lambda e: e * dinv)


@dataclass
class Patch:
    """H_i with fundamental matrix Z (DiamondElem entries over F0) and
    equation matrix A (DiamondElem entries over the patch field)."""

    subgroup: GroupPresentation
    Z: Mat
    A: Mat
    side: FieldTag
    label: str = ""


@dataclass
class PatchingProblem:
    group: GroupPresentation
    patch1: Patch
    patch2: Patch
    t_prec: int = DEFAULT_T_PREC
    x_window: tuple = DEFAULT_X_WINDOW
    scale: BiRatFunc = field(default_factory=lambda: BiRatFunc.const(1))
    label: str = ""

    def derivative(self, e: TruncatedSeries) -> TruncatedSeries:
        d = e.derive()
        if self.scale == 1:
            return d
        return d * self.scale.expand(self.t_prec, e.x_window)

    def check(self) -> dict:
        """Precondition certificate: sides, provenance, subgroups, equations."""
        out = {}
        for k, (p, side) in enumerate(((self.patch1, FieldTag.F1), (self.patch2, FieldTag.F2)), 1):
            if p.side != side:
                raise PreconditionFailed(f"patch {k} must be over {side.value}")
            subgroup_inclusion(p.subgroup, self.group)
            a_ok = all(e.tag <= side and audit(e) for _, _, e in p.A.entries())
            if not a_ok:
                raise PreconditionFailed(f"patch {k}: equation matrix is not over {side.value}")
            Zv = values(p.Z)
            Av = values(p.A)
            series_inverse(Zv)
            dZ = Zv.map(self.derivative)
            bad = _first_bad(dZ - Av @ Zv, self.t_prec)
            if bad is not None:
                raise PreconditionFailed(f"patch {k}: dZ != A Z at t^{bad}")
            out[f"patch{k}"] = {"side": side.value, "equation_holds_to": self.t_prec,
                                "Z_atoms": sorted(set().union(*[e.atoms for _, _, e in p.Z.entries()]))}
        return out


@dataclass
class ThetaData:
    """Images of the generators Z_i T in F0[G]: entry (i, j) is
    sum_k Z[i][k] * t_kj; `consistent` records dZ = A Z termwise."""

    images: list
    consistent: bool
    text: list


def theta_trivialize(patch: Patch, problem: PatchingProblem | None = None) -> ThetaData:
    n = patch.Z.n
    Zv = values(patch.Z)
    series_inverse(Zv)
    images = [[[(k, patch.Z[i, k]) for k in range(n) if not patch.Z[i, k].is_zero()] for j in range(n)]
              for i in range(n)]
    text = []
    for i in range(n):
        row = []
        for j in range(n):
            parts = []
            for k, e in images[i][j]:
                c = _short(e)
                mon = f"t{k + 1}{j + 1}"
                parts.append(mon if c == "1" else f"{c}*{mon}")
            row.append(" + ".join(parts) or "0")
        text.append(row)
    deriv = problem.derivative if problem is not None else (lambda e: e.derive())
    dZ = Zv.map(deriv)
    prec = min(e.t_prec for _, _, e in Zv.entries())
    consistent = _first_bad(dZ - values(patch.A) @ Zv, prec) is None
    return ThetaData(images, consistent, text)


def _short(e: DiamondElem) -> str:
    special = [a for a in e.atoms if a in SPECIAL_KINDS]
    if e.tag == FieldTag.F and e.value.is_exact_rows():
        terms = list(e.value.terms())
        if len(terms) == 1 and terms[0][:2] == (0, 0):
            c = terms[0][2]
            return str(c)
    if len(special) == 1 and e.ops <= {"embed"}:
        return special[0]
    return "(" + "+".join(special or sorted(e.atoms)) + "-expression)"


@dataclass
class PatchSolution:
    Z: Mat  # DiamondElem, F0
    M1: Mat  # F1
    M2: Mat  # F2
    A: Mat  # BiRatFunc
    structure: DifferentialStructure
    factorization: Factorization
    Q: Mat
    certificates: dict
    reconstruction_modes: list

    @property
    def t_prec(self) -> int:
        return self.factorization.prec


def gauge_check(M1: Mat, Z1: Mat, M2: Mat, Z2: Mat, prec: int) -> int | None:
    """First t-order where M1 Z1 and M2 Z2 differ (None if they agree)."""
    return _first_bad(values(M1) @ values(Z1) - values(M2) @ values(Z2), prec)


def require_gauge(M1, Z1, M2, Z2, prec):
    bad = gauge_check(M1, Z1, M2, Z2, prec)
    if bad is not None:
        raise GaugeMismatch(f"M1 Z1 != M2 Z2 at t^{bad} (working precision t^{prec})")


def equation_matrix_series(Z: Mat, problem: PatchingProblem) -> Mat:
    Zv = values(Z)
    return Zv.map(problem.derivative) @ series_inverse(Zv)


def patch(problem: PatchingProblem, prec: int | None = None, bounds=DEFAULT_BOUNDS) -> PatchSolution:
    prec = prec or problem.t_prec
    pre = problem.check()
    p1, p2 = problem.patch1, problem.patch2
    Z1, Z2 = values(p1.Z), values(p2.Z)
    Q = Z2 @ series_inverse(Z1)
    fz = factorize(Q, prec, problem.x_window)
    if not fz.verified or not fz.audit():
        raise FactorizationFailed(f"factorization residual t^{fz.residual}, audit {fz.audit()}")
    M1, M2 = fz.A1, fz.A2
    require_gauge(M1, p1.Z, M2, p2.Z, prec)
    Z = M1 @ p1.Z
    Aser = equation_matrix_series(Z, problem)
    rows, modes = [], []
    for i in range(Aser.n):
        row = []
        for j in range(Aser.m):
            try:
                mem = intersect_to_F(Aser[i, j], bounds)
            except (NotInF, InsufficientPrecision) as ex:
                raise ReconstructionFailed(f"entry ({i + 1},{j + 1}) of A: {ex}") from ex
            row.append(mem.value)
            modes.append(mem.mode)
        rows.append(row)
    A = Mat(rows)
    # independent re-verification: dZ = A Z with A expanded from its closed form
    Zv = values(Z)
    Aexp = A.map(lambda a: a.expand(prec, problem.x_window))
    eq_bad = _first_bad(Zv.map(problem.derivative) - Aexp @ Zv, prec)
    if eq_bad is not None:
        raise ReconstructionFailed(f"reconstructed A fails dZ = A Z at t^{eq_bad}")
    S = make_trivial_torsor(problem.group)
    ds = DifferentialStructure(S, A, problem.scale)
    cert = {
        "preconditions": pre,
        "factorization_residual": fz.residual,
        "factorization_audit": fz.audit(),
        "gauge_coherent_to": prec,
        "M1_side": "F1" if all(e.tag <= FieldTag.F1 for _, _, e in M1.entries()) else "?",
        "M2_side": "F2" if all(e.tag <= FieldTag.F2 for _, _, e in M2.entries()) else "?",
        "equation_verified_to": prec,
        "Lambda": list(fz.Lambda),
    }
    return PatchSolution(Z, M1, M2, A, ds, fz, Q, cert, modes)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


SHADOW_SUBGROUPS = ("Ga", "Ga_lower", "Gm_torus", "Borel", "GmxGm", "Gm_first", "Gm_second")


def candidate_ideals(G: GroupPresentation) -> list[tuple[str, list[str]]]:
    """Low-degree ideals of K[G] (generators in t11.., detinv) used for the
    simplicity shadow: subgroup ideals, coordinate hyperplanes and the like."""
    n = G.n
    coords = [f"t{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1)]
    out = []
    for c in coords:
        out.append((f"({c})", [c]))
        out.append((f"({c} - 1)", [f"{c} - 1"]))
    if n == 2:
        out.append(("(t11 - t22)", ["t11 - t22"]))
        out.append(("(t12 - t21)", ["t12 - t21"]))
        out.append(("(t12 + t21)", ["t12 + t21"]))
    if n == 1:
        out.append(("(t11 + 1)", ["t11 + 1"]))
        out.append(("I(mu2)", ["t11**2 - 1"]))
    for name in SHADOW_SUBGROUPS:
        H = get_group(name)
        if H.n == n and H.name != G.name:
            out.append((f"I({H.name})", list(H.ideal_gens)))
    out.append(("identity", [f"t{i}{j} - {int(i == j)}" for i in range(1, n + 1) for j in range(1, n + 1)]))
    return out


@dataclass
class SimplicityShadow:
    H1: str
    H2: str
    survivors: list  # nontrivial proper ideals stable under both
    checked: list  # (label, stable under H1, stable under H2, proper, nonzero)

    @property
    def ok(self) -> bool:
        return not self.survivors


def simplicity_shadow(G: GroupPresentation, H1: GroupPresentation, H2: GroupPresentation,
                      degree_cap: int = 4) -> SimplicityShadow:
    """Every candidate ideal that is stable under both H1 and H2 must be (0)
    or (1) in K[G]."""
    from .groups import _rename
    from .polys import Ideal

    R = G.ring("t")
    IG = G.ideal("t")
    a1, a2 = right_translation(G, H1), right_translation(G, H2)
    checked, survivors = [], []
    for label, gens in candidate_ideals(G):
        polys = [R.parse(_rename(g, "t")) for g in gens]
        polys = [IG.reduce(p) for p in polys]
        polys = [p for p in polys if not p.is_zero()]
        if not polys:
            checked.append((label, True, True, True, False))
            continue
        J = Ideal(R, list(IG.gens) + polys)
        proper = not J.is_unit()
        if not proper:
            checked.append((label, True, True, False, True))
            continue
        s1 = check_ideal_stable(polys, a1, degree_cap).stable
        s2 = check_ideal_stable(polys, a2, degree_cap).stable
        checked.append((label, s1, s2, True, True))
        if s1 and s2:
            survivors.append(label)
    return SimplicityShadow(H1.name, H2.name, survivors, checked)


@dataclass
class VerificationReport:
    residuals: dict
    constants: ConstantsReport | None
    shadow: SimplicityShadow | None
    coherence: dict
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        out = {"residuals": self.residuals, "coherence": self.coherence, "failures": self.failures, "ok": self.ok}
        if self.constants is not None:
            out["constants"] = {"verdict": self.constants.verdict, "degree": self.constants.degree,
                                "bounds": list(self.constants.bounds),
                                "truncated_at": self.constants.truncated_at}
        if self.shadow is not None:
            out["simplicity_shadow"] = {
                "stable_under": [self.shadow.H1, self.shadow.H2],
                "survivors": self.shadow.survivors,
                "checked": len(self.shadow.checked),
                "verdict": "no proper nonzero candidate ideal stable under both subgroups"
                if self.shadow.ok else "stable candidate ideals remain",
            }
        return out


def verify_solution(sol: PatchSolution, problem: PatchingProblem, degree: int = 2,
                    const_bounds=DEFAULT_CONST_BOUNDS, degree_cap: int = 4,
                    A: Mat | None = None) -> VerificationReport:
    """Independent checks of a solution. Pass `A` to verify a different
    (e.g. corrupted) equation matrix against the same Z."""
    prec = sol.t_prec
    A = sol.A if A is None else A
    failures = []
    res = {}
    r = reassembly_residual(sol.factorization, sol.Q)
    res["factorization"] = r
    if r < prec:
        failures.append(f"factorization reassembly fails at t^{r}")
    g = gauge_check(sol.M1, problem.patch1.Z, sol.M2, problem.patch2.Z, prec)
    res["gauge"] = prec if g is None else g
    if g is not None:
        failures.append(f"gauge mismatch at t^{g}")
    Zv = values(sol.Z)
    Aexp = A.map(lambda a: _as_birat(a).expand(prec, problem.x_window))
    e = _first_bad(Zv.map(problem.derivative) - Aexp @ Zv, prec)
    res["equation"] = prec if e is None else e
    if e is not None:
        failures.append(f"dZ != A Z at t^{e}")

    # det coherence: d(det Z) = tr(A) det Z
    dZ = Zv.det()
    tr = Aexp.trace()
    dd = _first_bad(Mat([[problem.derivative(dZ) - tr * dZ]]), prec)
    coherence = {"det_equation": dd is None,
                 "M1_tags_F1": all(x.tag <= FieldTag.F1 and audit(x) for _, _, x in sol.M1.entries()),
                 "M2_tags_F2": all(x.tag <= FieldTag.F2 and audit(x) for _, _, x in sol.M2.entries())}
    wd = derivation_well_defined(sol.structure.torsor, A)
    coherence["derivation_well_defined"] = wd.ok
    for k, v in coherence.items():
        if not v:
            failures.append(f"coherence check failed: {k}")


    # the PV claims (no new constants, simplicity) are only made when the
    # two patch groups generate G; otherwise they are recorded as not claimed
    H1, H2 = problem.patch1.subgroup, problem.patch2.subgroup
    claim = generates(H1, H2, problem.group)
    coherence["pv_claimed"] = claim
    consts = shadow = None
    if claim:
        ds = DifferentialStructure(sol.structure.torsor, A, problem.scale)
        consts = constants_bounded(ds, degree, const_bounds, degree_cap)
        if consts.new_constants:
            failures.append(consts.verdict)
        if problem.group.n > 1 or not problem.group.name.startswith("trivial"):
            shadow = simplicity_shadow(problem.group, H1, H2, degree_cap)
            if not shadow.ok:
                failures.append(f"stable ideals survive: {shadow.survivors}")
    return VerificationReport(res, consts, shadow, coherence, failures)


def generates(H1: GroupPresentation, H2: GroupPresentation, G: GroupPresentation) -> bool:
    """Catalog fact: H1 and H2 generate G (or one of them is G)."""
    if G.name in (H1.name, H2.name) or (G.order == 1):
        return True
    names = [h.name for h in (H1, H2) if not h.name.startswith("trivial")]
    if not names:
        return False
    try:
        return generated_subgroup(names).name == G.name
    except PreconditionFailed:
        return False


def perturb(A: Mat, i: int, j: int, t_power: int) -> Mat:
    """A with entry (i, j) shifted by x * t^t_power (a negative control)."""
    x, t = BiRatFunc.x(), BiRatFunc.t()
    rows = [list(r) for r in A.rows]
    rows[i][j] = _as_birat(rows[i][j]) + x * t**t_power
    return Mat(rows)


def corrupt_gauge(M: Mat, t_power: int) -> Mat:
    """M with t^t_power added to its (0, 0) entry."""
    rows = [list(r) for r in M.rows]
    e = rows[0][0]
    bump = TruncatedSeries.from_terms({(t_power, 0): Fraction(1)}, e.value.t_prec, e.value.x_window)
    rows[0][0] = DiamondElem(e.value + bump, e.tag, e.atoms, e.ops | {"corrupt"})
    return Mat(rows)


# ---------------------------------------------------------------------------
# shipped problems
# ---------------------------------------------------------------------------


def _const_elem(c, prec, window):
    return DiamondElem.from_F(c, prec, window)


def special_matrix(layout, prec: int, window) -> Mat:
    """Matrix from a layout of 0/1/special-kind names."""
    def conv(v):
        if isinstance(v, str):
            return DiamondElem.special(v, prec, window)
        if isinstance(v, BiRatFunc):
            return DiamondElem.from_F(v, prec, window)
        return _const_elem(v, prec, window)

    return Mat([[conv(v) for v in row] for row in layout])


def sl2_problem(t_prec: int = DEFAULT_T_PREC, x_window=DEFAULT_X_WINDOW, literal: bool = False) -> PatchingProblem:
    """Upper/lower unipotent patches of SL2.

    Default: Z1 = [[1, logU], [0, 1]] with A1 = [[0, logU'], [0, 0]] over F,
    Z2 = [[1, 0], [logP, 1]]. Each witness lies outside its own patch field,
    so neither patch is trivial. `literal=True` puts logP in Z1 and logU in
    Z2 instead; then Z1, Z2 are already over F1, F2 and the solution is the
    trivial torsor.
    """
    from .diamond import SPECIALS

    pr, window = t_prec, (x_window[0], x_window[1])
    up, lo = ("logP", "logU") if literal else ("logU", "logP")
    Z1 = special_matrix([[1, up], [0, 1]], pr, window)
    Z2 = special_matrix([[1, 0], [lo, 1]], pr, window)
    z = _const_elem(0, pr, window)
    A1 = Mat([[z, DiamondElem.from_F(SPECIALS[up].derivative, pr, window)], [z, z]])
    A2 = Mat([[z, z], [DiamondElem.from_F(SPECIALS[lo].derivative, pr, window), z]])
    G = get_group("SL2")
    return PatchingProblem(G, Patch(get_group("Ga"), Z1, A1, FieldTag.F1, f"upper unipotent, {up}"),
                           Patch(get_group("Ga_lower"), Z2, A2, FieldTag.F2, f"lower unipotent, {lo}"),
                           t_prec, tuple(x_window), label="sl2" + ("-literal" if literal else ""))


def trivial_problem(G: GroupPresentation, t_prec: int = DEFAULT_T_PREC, x_window=DEFAULT_X_WINDOW) -> PatchingProblem:
    n = G.n
    I = special_matrix([[int(i == j) for j in range(n)] for i in range(n)], t_prec, x_window)
    Zr = special_matrix([[0] * n for _ in range(n)], t_prec, x_window)
    from .groups import trivial

    T = trivial(n)
    return PatchingProblem(G, Patch(T, I, Zr, FieldTag.F1, "trivial"), Patch(T, I, Zr, FieldTag.F2, "trivial"),
                           t_prec, tuple(x_window), label="trivial")


def rescaled_problem(problem: PatchingProblem, a) -> PatchingProblem:
    """Same fundamental matrices under the derivation a * delta: A_i -> a A_i."""
    a = _as_birat(a)
    prec, window = problem.t_prec, problem.x_window

    def sc(p: Patch) -> Patch:
        ae = DiamondElem.from_F(a, prec, window)
        return Patch(p.subgroup, p.Z, p.A.map(lambda e: e * ae), p.side, p.label)

    return PatchingProblem(problem.group, sc(problem.patch1), sc(problem.patch2), prec, window,
                           problem.scale * a, problem.label + "-rescaled")
