"""Split differential embedding problems G = N x| H -> H.

Given a PV ring R/F for H whose fundamental matrix lies over F1, and a PV
ring R1/F1 for N with fundamental matrix over F0, patch Ind_N^G(R1) over F1
against F2 (x) Ind_H^G(R) over F2. The solution S is a PV ring for G, and
S^N recovers R.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .diamond import SPECIALS, DiamondElem, FieldTag, audit, embed
from .errors import (
    BlockEmbeddingUndefined,
    NonSplitEBP,
    PreconditionFailed,
    RecoveryFailed,
)
from .groups import (
    SemidirectData,
    get_group,
    invariants_bounded,
    leg_names,
    matrix_coaction,
    semidirect,
    trivial,
)
from .linalg import rank, row_basis
from .matrices import Mat
from .patching import (
    DEFAULT_BOUNDS,
    DEFAULT_T_PREC,
    DEFAULT_X_WINDOW,
    Patch,
    PatchingProblem,
    PatchSolution,
    VerificationReport,
    patch,
    special_matrix,
    values,
    verify_solution,
)
from .polys import PolyRing
from .scalars import BiRatFunc, _as_birat
from .torsors import DifferentialStructure, TorsorPresentation, make_trivial_torsor


@dataclass
class PVPresentation:
    """A PV ring F_level[Z, det^-1]/I_G with delta(Z) = A Z and an embedding
    witness: the fundamental matrix as DiamondElem entries."""

    group_name: str
    level: FieldTag
    A: Mat  # DiamondElem entries
    witness: Mat  # DiamondElem entries
    label: str = ""
    A_F: Mat | None = None  # closed form of A when it is over F

    @property
    def group(self):
        return get_group(self.group_name)

    @property
    def torsor(self) -> TorsorPresentation:
        return TorsorPresentation(self.group, self.level, "z", self.label or self.group_name)

    def witness_tag(self) -> FieldTag:
        tag = FieldTag.F
        for _, _, e in self.witness.entries():
            tag = tag.join(e.tag)
        return tag

    def A_tag(self) -> FieldTag:
        tag = FieldTag.F
        for _, _, e in self.A.entries():
            tag = tag.join(e.tag)
        return tag

    def equation_defect(self, t_prec: int) -> int | None:
        from .patching import _first_bad

        Zv, Av = values(self.witness), values(self.A)
        return _first_bad(Zv.map(lambda e: e.derive()) - Av @ Zv, t_prec)

    def structure(self, A_F: Mat) -> DifferentialStructure:
        return DifferentialStructure(self.torsor, A_F)


def compositum_base_change(R: PVPresentation, target: FieldTag = FieldTag.F2) -> PVPresentation:
    """F2 (x) R: same generators, relations and equation; the witness is
    re-tagged into F0 (it lies in F1, the extension sits in F0)."""
    if not R.A_tag() <= FieldTag.F:
        raise PreconditionFailed("base change needs an equation matrix over F")
    if not R.witness_tag() <= FieldTag.F1:
        raise PreconditionFailed("base change needs a witness over F1")
    wit = R.witness.map(lambda e: embed(e, FieldTag.F0))
    return PVPresentation(R.group_name, target, R.A, wit, (R.label or R.group_name) + f" over {target.value}", R.A_F)


def base_change_derivation_check(R: PVPresentation, R2: PVPresentation, t_prec: int, count: int = 20,
                                 seed: int = 0) -> bool:
    """delta commutes with F (x) R -> F2 (x) R: for random f(Z) with
    coefficients in F, the derivative of the evaluated series equals the
    evaluation of delta(f) computed from A in R2."""
    rng = random.Random(seed)
    Zv = values(R2.witness)
    Av = values(R2.A)
    n = Zv.n
    window = Zv[0, 0].x_window
    x, t = BiRatFunc.x(), BiRatFunc.t()
    dZ = Av @ Zv  # delta(Z) as R2 prescribes
    ok = True
    for _ in range(count):
        # f = c * Z_ab * Z_cd + d * Z_ef with c, d in F
        c = (x + rng.randint(1, 3)) / (1 - t * rng.randint(0, 2) * x)
        d = BiRatFunc.const(rng.randint(-3, 3)) + t * x * rng.randint(0, 2)
        a, b, e, g, h, k = (rng.randrange(n) for _ in range(6))
        cs, ds_ = c.expand(t_prec, window), d.expand(t_prec, window)
        f = cs * Zv[a, b] * Zv[e, g] + ds_ * Zv[h, k]
        # Leibniz with delta(Z) = A Z for the generators and d/dx on F
        df = (c.derive().expand(t_prec, window) * Zv[a, b] * Zv[e, g]
              + cs * (dZ[a, b] * Zv[e, g] + Zv[a, b] * dZ[e, g])
              + d.derive().expand(t_prec, window) * Zv[h, k] + ds_ * dZ[h, k])
        if not (f.derive() - df).truncate_t(t_prec).known_zero():
            ok = False
    return ok and R.A is R2.A


# ---------------------------------------------------------------------------
# block realizations of (N, H) inside G
# ---------------------------------------------------------------------------


def _zero_like(e: DiamondElem) -> DiamondElem:
    return e - e


def _one_like(e: DiamondElem) -> DiamondElem:
    return e.one_like()


def _diag(entries) -> Mat:
    z = _zero_like(entries[0])
    n = len(entries)
    return Mat([[entries[i] if i == j else z for j in range(n)] for i in range(n)])


@dataclass(frozen=True)
class BlockRealization:
    """How the fundamental matrices of N- and H-torsors sit in G (n x n), and
    how R's coordinates map into S^N."""

    group: str
    N: str
    H: str
    n_source_N: str  # group of R1's presentation
    h_source: str  # group of R's presentation
    recovery: dict  # R variable -> S polynomial text
    leg_map: dict  # R's group leg (prefix v) -> H leg in G (prefix u), as text

    def embed_N(self, Z: Mat, A: Mat) -> tuple[Mat, Mat]:
        return _BLOCK_FUNCS[(self.group, "N")](Z, A)

    def embed_H(self, Z: Mat, A: Mat) -> tuple[Mat, Mat]:
        return _BLOCK_FUNCS[(self.group, "H")](Z, A)


def _borel_N(Z, A):
    return Z, A  # R1 is already presented for the upper unipotent 2 x 2 group


def _borel_H(Z, A):
    z = Z[0, 0]
    a = A[0, 0]
    return _diag([z, z.inverse()]), _diag([a, -a])


def _gmxgm_N(Z, A):
    z, a = Z[0, 0], A[0, 0]
    return _diag([z, _one_like(z)]), _diag([a, _zero_like(a)])


def _gmxgm_H(Z, A):
    z, a = Z[0, 0], A[0, 0]
    return _diag([_one_like(z), z]), _diag([_zero_like(a), a])


def _ident_block(Z, A):
    return Z, A


_BLOCK_FUNCS = {
    ("Borel", "N"): _borel_N,
    ("Borel", "H"): _borel_H,
    ("GmxGm", "N"): _gmxgm_N,
    ("GmxGm", "H"): _gmxgm_H,
}

BLOCKS = {
    "Borel": BlockRealization("Borel", "Ga", "Gm_torus", "Ga", "Gm", {"z11": "z11", "zdi": "z22"},
                              {"v11": "u11", "vdi": "u22"}),
    "GmxGm": BlockRealization("GmxGm", "Gm_first", "Gm_second", "Gm", "Gm", {"z11": "z22", "zdi": "z11*zdi"},
                              {"v11": "u22", "vdi": "u11*udi"}),
}


def block_realization(G_name: str) -> BlockRealization:
    if G_name not in BLOCKS:
        raise BlockEmbeddingUndefined(f"no matrix realization of the semidirect pair for {G_name}")
    return BLOCKS[G_name]


# ---------------------------------------------------------------------------
# problems and solutions
# ---------------------------------------------------------------------------


@dataclass
class SplitEBP:
    semidirect: SemidirectData
    R: PVPresentation | None  # for H over F, witness over F1 (None: H trivial)
    R1: PVPresentation | None  # for N over F1, witness over F0 (None: N trivial)
    t_prec: int = DEFAULT_T_PREC
    x_window: tuple = DEFAULT_X_WINDOW
    label: str = ""

    def check(self) -> dict:
        out = {}
        if self.R is not None:
            if not self.R.witness_tag() <= FieldTag.F1:
                raise PreconditionFailed("R must lie in F1 (its witness is not F1-constructible)")
            if not self.R.A_tag() <= FieldTag.F:
                raise PreconditionFailed("R's equation matrix must be over F")
            d = self.R.equation_defect(self.t_prec)
            if d is not None:
                raise PreconditionFailed(f"R: dZ != A Z at t^{d}")
            out["R_witness"] = self.R.witness_tag().value
        if self.R1 is not None:
            if not self.R1.A_tag() <= FieldTag.F1:
                raise PreconditionFailed("R1's equation matrix must be over F1")
            d = self.R1.equation_defect(self.t_prec)
            if d is not None:
                raise PreconditionFailed(f"R1: dZ != A Z at t^{d}")
            out["R1_witness"] = self.R1.witness_tag().value
            out["R1_witness_outside_F1"] = not self.R1.witness_tag() <= FieldTag.F1
        return out


def trivial_split(G_name: str) -> SemidirectData:
    """G = 1 x| G (N trivial)."""
    G = get_group(G_name)
    return SemidirectData(trivial(G.n), G, G, {"N_trivial": True})


def inverse_split(G_name: str) -> SemidirectData:
    """G = G x| 1 (H trivial): the inverse-problem degeneration."""
    G = get_group(G_name)
    return SemidirectData(G, trivial(G.n), G, {"H_trivial": True})


def _identity_mat(n, prec, window):
    return special_matrix([[int(i == j) for j in range(n)] for i in range(n)], prec, window)


def _zero_mat(n, prec, window):
    return special_matrix([[0] * n for _ in range(n)], prec, window)


def build_hypothesis_data(ebp: SplitEBP) -> PatchingProblem:
    sd = ebp.semidirect
    G, N, H = sd.G, sd.N, sd.H
    n, prec, window = G.n, ebp.t_prec, ebp.x_window
    n_triv, h_triv = N.name.startswith("trivial"), H.name.startswith("trivial")
    if n_triv or h_triv:
        embedN = embedH = _ident_block
    else:
        blk = block_realization(G.name)
        embedN, embedH = blk.embed_N, blk.embed_H
    if n_triv or ebp.R1 is None:
        Z1, A1 = _identity_mat(n, prec, window), _zero_mat(n, prec, window)
    else:
        Z1, A1 = embedN(ebp.R1.witness, ebp.R1.A)
    if h_triv or ebp.R is None:
        Z2, A2 = _identity_mat(n, prec, window), _zero_mat(n, prec, window)
    else:
        R2 = compositum_base_change(ebp.R, FieldTag.F2)
        Z2, A2 = embedH(R2.witness, R2.A)
    return PatchingProblem(G, Patch(N, Z1, A1, FieldTag.F1, "Ind_N^G(R1)"),
                           Patch(H, Z2, A2, FieldTag.F2, "F2 (x) Ind_H^G(R)"),
                           prec, tuple(window), label=ebp.label)


@dataclass
class RecoveryCertificate:
    degree: int
    generator_match: bool
    injective: bool
    coaction_match: bool
    derivation_match: bool
    invariant_dim: int
    image_dim: int
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.generator_match and self.injective and self.coaction_match and self.derivation_match

    def to_json(self) -> dict:
        return {"degree": self.degree, "generator_match": self.generator_match, "injective": self.injective,
                "coaction_match": self.coaction_match, "derivation_match": self.derivation_match,
                "invariant_dim": self.invariant_dim, "image_dim": self.image_dim, "details": self.details,
                "ok": self.ok}


@dataclass
class EBPSolution:
    solution: PatchSolution
    problem: PatchingProblem
    report: VerificationReport
    recovery: RecoveryCertificate
    preconditions: dict

    @property
    def ok(self) -> bool:
        return self.report.ok and self.recovery.ok


def delta_full(ds: DifferentialStructure, f) -> dict:
    """delta(f) reduced, as {monomial: coefficient in F}."""
    out: dict = {}
    for c, p in ds.delta(f):
        for m, q in zip(p.monoms(), p.coeffs()):
            m = tuple(m)
            out[m] = out[m] + c * BiRatFunc.const(q) if m in out else c * BiRatFunc.const(q)
    return {m: v for m, v in out.items() if not v.is_zero()}


def _A_over_F(R: PVPresentation) -> Mat:
    if R.A_F is not None:
        return R.A_F

    def conv(e):
        vals = list(e.value.terms())
        if e.value.is_exact_rows() and not any(i != 0 or x != 0 for i, x, _ in vals):
            return BiRatFunc.const(vals[0][2] if vals else 0)
        from .diamond import intersect_to_F

        return intersect_to_F(e.value, (4, 4, 4, 4)).value

    return R.A.map(conv)


def recover(sol: PatchSolution, ebp: SplitEBP, deg: int = 2, degree_cap: int = 4) -> RecoveryCertificate:
    """S^N against R at degree <= deg: the N-invariants of S are spanned by
    the images of R's standard monomials, the map is injective there, and it
    intertwines the H-co-actions and the derivations."""
    sd = ebp.semidirect
    S = sol.structure.torsor
    details = []
    if sd.N.name.startswith("trivial") or ebp.R is None:
        # N trivial: S itself is R up to base change; H trivial: S^G = F
        inv = invariants_bounded(matrix_coaction(S.algebra, [("z", False)], sd.N), deg, degree_cap)
        trivial_h = ebp.R is None
        gm = inv.only_constants() if trivial_h else inv.dim == len(S.algebra.standard_monomials(deg))
        details.append("degenerate pair: recovery is the identity")
        return RecoveryCertificate(deg, gm, True, True, True, inv.dim, inv.dim, details)
    blk = block_realization(sd.G.name)
    RS = S.ring
    IS = S.ideal
    Rt = ebp.R.torsor
    RR = Rt.ring
    phi = {v: RS.parse(text) for v, text in blk.recovery.items()}

    def push(p):
        return IS.reduce(RS.hom(p, phi, RR))

    # generator match
    Nact = matrix_coaction(S.algebra, [("z", False)], sd.N)
    inv = invariants_bounded(Nact, deg, degree_cap)
    monos_S = inv.monomials
    idx = {m: i for i, m in enumerate(monos_S)}
    imgs = []
    for m in Rt.algebra.standard_monomials(deg):
        p = push(RR.monomial(m))
        v = [0] * len(monos_S)
        fits = True
        for mm, c in zip(p.monoms(), p.coeffs()):
            if tuple(mm) not in idx:
                fits = False
                break
            v[idx[tuple(mm)]] = c
        if fits:
            imgs.append(v)
    n = len(monos_S)
    r_img = rank(imgs, n)
    r_inv = rank(inv.vectors, n)
    gen_match = r_img == r_inv == rank(list(imgs) + list(inv.vectors), n)
    injective = r_img == len(imgs)
    if not gen_match:
        details.append(f"invariants dim {r_inv}, image dim {r_img}")

    # co-action match: rho_S(phi(z)) = (phi (x) iota)(rho_R(z)) over H
    Hact = matrix_coaction(S.algebra, [("z", False)], sd.H, "u")
    C = Hact.combined
    CI = Hact.combined_ideal
    Ract = matrix_coaction(Rt.algebra, [("z", False)], Rt.group, "v")
    CR = Ract.combined
    iota = {v: C.parse(text) for v, text in blk.leg_map.items()}
    iota.update({v: C.embed(p, RS) for v, p in phi.items()})
    co_ok = True
    for v in RR.names:
        lhs = Hact.apply(phi[v])
        rhs = C.hom(Ract.apply(RR[v]), iota, CR)
        if not CI.contains(lhs - rhs):
            co_ok = False
            details.append(f"co-action mismatch on {v}")

    # derivation match: delta_S(phi(g)) = phi(delta_R(g))
    dsS = sol.structure
    dsR = ebp.R.structure(_A_over_F(ebp.R))
    der_ok = True
    for v in RR.names:
        lhs = delta_full(dsS, phi[v])
        rhs: dict = {}
        for c, p in dsR.delta(RR[v]):
            q = push(p)
            for m, cc in zip(q.monoms(), q.coeffs()):
                m = tuple(m)
                term = c * BiRatFunc.const(cc)
                rhs[m] = rhs[m] + term if m in rhs else term
        keys = set(lhs) | set(rhs)
        zero = BiRatFunc.const(0)
        for m in keys:
            if not (lhs.get(m, zero) - rhs.get(m, zero)).is_zero():
                der_ok = False
                details.append(f"derivation mismatch on {v} at monomial {m}")
    return RecoveryCertificate(deg, gen_match, injective, co_ok, der_ok, r_inv, r_img, details)


def solve_split_ebp(ebp: SplitEBP, prec: int | None = None, bounds=DEFAULT_BOUNDS, deg: int = 2,
                    const_bounds=(6, 6, 6, 6), degree_cap: int = 4) -> EBPSolution:
    pre = ebp.check()
    problem = build_hypothesis_data(ebp)
    sol = patch(problem, prec or ebp.t_prec, bounds)
    report = verify_solution(sol, problem, deg, const_bounds, degree_cap)
    rec = recover(sol, ebp, deg, degree_cap)
    if not rec.ok:
        raise RecoveryFailed(f"S^N does not match R at degree <= {deg}: {rec.details}")
    return EBPSolution(sol, problem, report, rec, pre)


# ---------------------------------------------------------------------------
# shipped problems
# ---------------------------------------------------------------------------


def gm_expP_fixture(prec: int, window) -> PVPresentation:
    """G_m over F: delta z = t z, z -> expP in F1."""
    e = DiamondElem.special("expP", prec, window)
    a = SPECIALS["expP"].derivative
    A = Mat([[DiamondElem.from_F(a, prec, window)]])
    return PVPresentation("Gm", FieldTag.F, A, Mat([[e]]), "R: dz = t z", Mat([[a]]))


def ga_logU_fixture(prec: int, window) -> PVPresentation:
    """G_a over F1: delta y = -t/(x^2 - t x), y -> logU in F0 (2 x 2 form)."""
    Z = special_matrix([[1, "logU"], [0, 1]], prec, window)
    z = DiamondElem.from_F(0, prec, window)
    A = Mat([[z, DiamondElem.from_F(SPECIALS["logU"].derivative, prec, window)], [z, z]])
    return PVPresentation("Ga", FieldTag.F1, A, Z, "R1: dy = -t/(x^2 - t x)")


def gm_expU_fixture(prec: int, window) -> PVPresentation:
    """G_m over F1: delta y = -t/x^2 y, y -> expU in F0 (not in F1)."""
    e = DiamondElem.special("expU", prec, window)
    A = Mat([[DiamondElem.from_F(SPECIALS["expU"].derivative, prec, window)]])
    return PVPresentation("Gm", FieldTag.F1, A, Mat([[e]]), "R1: dy = -t/x^2 y")


def borel_ebp(t_prec: int = DEFAULT_T_PREC, x_window=DEFAULT_X_WINDOW) -> SplitEBP:
    return SplitEBP(semidirect(get_group("Borel")), gm_expP_fixture(t_prec, x_window),
                    ga_logU_fixture(t_prec, x_window), t_prec, tuple(x_window), "borel-ebp")


def gm_inverse(t_prec: int = DEFAULT_T_PREC, x_window=DEFAULT_X_WINDOW) -> SplitEBP:
    """Inverse-problem mode for G_m: H trivial, N = G_m."""
    return SplitEBP(inverse_split("Gm"), None, gm_expU_fixture(t_prec, x_window), t_prec, tuple(x_window),
                    "gm-inverse")


def n_trivial_ebp(t_prec: int = DEFAULT_T_PREC, x_window=DEFAULT_X_WINDOW) -> SplitEBP:
    """N trivial: the solution is R base-changed; recovery is the identity."""
    return SplitEBP(trivial_split("Gm"), gm_expP_fixture(t_prec, x_window), None, t_prec, tuple(x_window),
                    "gm-n-trivial")


def reject_non_split(doc: dict):
    if not doc.get("split", True):
        raise NonSplitEBP("non-split embedding problems are not supported: reducing them to split ones "
                          "needs torsor decompositions that are not algorithmic here")
