"""Induced torsors Ind_H^G, quotients X/N as invariant rings, and induction of
finite Galois algebras.

Everything lives in the ring K[Y] (x) K[G] with Y-variables prefixed "y" and
G-variables prefixed "t". The induced torsor (Y x G)/H is presented by the
closed-form generators W = Z0.T (Z0 a matrix over K[Y], by default Y itself)
and the generic invariant-kernel computation is kept as a cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import flint

from .errors import BadAction, DegreeOverflow, GeneratorAuditFailed, NotInvariant, NotNormal, PreconditionFailed
from .groups import (
    DEFAULT_DEGREE_CAP,
    Algebra,
    GroupPresentation,
    InvariantBasis,
    _identity,
    _leg_map,
    det_poly,
    get_group,
    invariants_bounded,
    leg_names,
    matmul_poly,
    matrix_coaction,
    matrix_vars,
    require_normal,
    semidirect,
    subgroup_inclusion,
)
from .linalg import intersect_spans, rank, row_basis
from .matrices import Mat
from .polys import Ideal, Poly, PolyRing, disjoint_sum, total_degree
from .torsors import (
    DifferentialStructure,
    TorsorPresentation,
    _matrix_derivation_images,
    combine_matrices,
    solve_matrix_derivation,
    transport_derivation,
)

fmpq = flint.fmpq


# ---------------------------------------------------------------------------
# span bookkeeping
# ---------------------------------------------------------------------------


class _Coords:
    """Coordinate vectors of polynomials over a growing monomial index."""

    def __init__(self):
        self.index: dict = {}

    def vec(self, p: Poly) -> dict:
        return {self.index.setdefault(m, len(self.index)): c for m, c in zip(p.monoms(), p.coeffs())}

    def dense(self, vs: Sequence[dict]) -> list[list[fmpq]]:
        n = len(self.index)
        out = []
        for v in vs:
            row = [fmpq(0)] * n
            for k, c in v.items():
                row[k] = c
            out.append(row)
        return out


def _span_rank(polys: Sequence[Poly]) -> int:
    C = _Coords()
    vs = [C.vec(p) for p in polys]
    return rank(C.dense(vs), len(C.index)) if C.index else 0


def _spans_compare(a: Sequence[Poly], b: Sequence[Poly]) -> tuple[int, int, int]:
    """(rank a, rank b, rank a+b)."""
    C = _Coords()
    va, vb = [C.vec(p) for p in a], [C.vec(p) for p in b]
    n = len(C.index)
    if n == 0:
        return 0, 0, 0
    da, db = C.dense(va), C.dense(vb)
    return rank(da, n), rank(db, n), rank(da + db, n)


def _basis_polys(B: InvariantBasis, R: PolyRing, vectors=None) -> list[Poly]:
    out = []
    for v in (B.vectors if vectors is None else vectors):
        p = R.zero()
        for c, m in zip(v, B.monomials):
            if c != 0:
                p += R.monomial(m, c)
        out.append(p)
    return out


def _product_algebra(Y: GroupPresentation, G: GroupPresentation, yp: str = "y", tp: str = "t") -> Algebra:
    R = PolyRing(leg_names(yp, Y.n) + leg_names(tp, G.n))
    I = disjoint_sum(R, [Y.ideal(yp), G.ideal(tp)])
    return Algebra(R, I, f"K[{Y.name}] (x) K[{G.name}]")


def _intersection(bases: Sequence[InvariantBasis]) -> list:
    n = len(bases[0].monomials)
    inter = bases[0].vectors
    for b in bases[1:]:
        inter = intersect_spans(inter, b.vectors, n)
    return inter


# ---------------------------------------------------------------------------
# induced torsors
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class InducedPresentation:
    """Ind_H^G(Y) presented by W = Z0.T, det^-1 = ydi.tdi inside K[Y] (x) K[G].

    `Z0` is a matrix of polynomials over K[Y] (the generic point of Y unless
    a fixture overrides it); `Z0_field` optionally records the fundamental
    matrix over an overfield that realizes it.
    """

    source: TorsorPresentation
    group: GroupPresentation
    Z0: list
    Z0_field: Mat | None = None
    A: Mat | None = None
    audit: dict = field(default_factory=dict)

    @property
    def H(self) -> GroupPresentation:
        return self.source.group

    @cached_property
    def algebra(self) -> Algebra:
        return _product_algebra(self.H, self.group)

    @property
    def ring(self) -> PolyRing:
        return self.algebra.ring

    @cached_property
    def result(self) -> TorsorPresentation:
        return TorsorPresentation(self.group, self.source.base, "w", f"Ind_{self.H.name}^{self.group.name}")

    @cached_property
    def generators(self) -> dict:
        """w_ij -> (Z0 T)_ij and wdi -> ydi tdi, in the product ring."""
        R, n = self.ring, self.group.n
        Z0 = [[R.embed(e, self.source.ring) for e in row] for row in self.Z0]
        T = matrix_vars(R, "t", n)
        return _leg_map(R, n, "w", matmul_poly(Z0, T), R["ydi"] * R["tdi"])

    @cached_property
    def twist(self):
        """(y, g).h = (y.h, h^-1 g) on K[Y] (x) K[G]."""
        return matrix_coaction(self.algebra, [("y", False), ("t", True)], self.H, "u", label="Ind twist")

    @cached_property
    def g_action(self):
        """Right translation of G on the K[G] factor."""
        return matrix_coaction(self.algebra, [("t", False)], self.group, "u", label="G on Ind")

    def generator_audit(self) -> dict:
        act = self.twist
        CI = act.combined_ideal
        inv = {v: CI.contains(act.apply(p) - act.lift(p)) for v, p in self.generators.items()}
        IR = self.algebra.ideal
        Rw = self.result.ring
        rels = [IR.contains(self.ring.hom(g, self.generators, Rw)) for g in self.result.relations()]
        return {"invariant": inv, "relations_hold": all(rels)}

    def _at_identity(self, R: PolyRing) -> dict:
        n = self.group.n
        vals = {f"t{i}{j}": R.const(int(i == j)) for i in range(1, n + 1) for j in range(1, n + 1)}
        vals["tdi"] = R.one()
        return vals

    def equivariance_square(self) -> bool:
        """Restricting the G-co-action to H and specializing T -> I agrees with
        the H-co-action of the source on Z0 (co-action square on generators)."""
        actG = matrix_coaction(self.algebra, [("t", False)], self.H, "u")
        RC = actG.combined
        Ysrc = self.source.coaction
        for p in self.generators.values():
            lhs = RC.hom(actG.apply(p), self._at_identity(RC), RC)
            rhs = RC.embed(Ysrc.apply(_restrict(self.ring.hom(p, self._at_identity(self.ring), self.ring),
                                                self.ring, self.source.ring)), Ysrc.combined)
            if not actG.combined_ideal.contains(lhs - rhs):
                return False
        return True

    def specialize_identity(self) -> list[Poly]:
        """Generators with T -> I, as elements of K[Y]."""
        R = self.ring
        return [_restrict(R.hom(p, self._at_identity(R), R), R, self.source.ring) for p in self.generators.values()]

    def to_json(self) -> dict:
        return {
            "H": self.H.name,
            "G": self.group.name,
            "generators": {k: str(v) for k, v in self.generators.items()},
            "Z0_field": None if self.Z0_field is None else [
                [{"tag": e.tag.value, "atoms": sorted(e.atoms)} for e in row] for row in self.Z0_field.rows],
            "A": None if self.A is None else [[e.to_text() for e in row] for row in self.A.rows],
            "audit": self.audit,
        }


def _restrict(p: Poly, R: PolyRing, S: PolyRing) -> Poly:
    """Read p (using only S's variables) as an element of S."""
    return p.compose(*[S.var(n) if n in S.names else S.zero() for n in R.names], ctx=S.ctx)


def induce(Y: TorsorPresentation, G: GroupPresentation, Z0=None, Z0_field: Mat | None = None,
           A: Mat | None = None) -> InducedPresentation:
    """Ind_H^G(Y) from the generator recipe, with the invariance audit.

    `A` (optional) is the source's differential matrix; the induced one is the
    restriction of delta(y) = A y, delta(t) = 0 to the generators.
    """
    H = Y.group
    subgroup_inclusion(H, G)
    if Y.prefix != "y":
        Y = TorsorPresentation(H, Y.base, "y", Y.name)
    if Z0 is None:
        Z0 = Y.Z()
    if Z0_field is not None:
        d = Z0_field.det()
        if d.is_zero():
            raise PreconditionFailed("Z0 is not invertible")
    ind = InducedPresentation(Y, G, Z0, Z0_field)
    audit = ind.generator_audit()
    ind.audit = {"invariant": all(audit["invariant"].values()), "relations_hold": audit["relations_hold"]}
    if not all(audit["invariant"].values()):
        bad = [k for k, v in audit["invariant"].items() if not v]
        raise NotInvariant(f"generators {bad} are not invariant under the {H.name}-twist")
    if not audit["relations_hold"]:
        raise NotInvariant(f"generators do not satisfy the relations of {G.name}")
    if A is not None:
        ind.A = induced_structure(ind, A)
    return ind


def induced_structure(ind: InducedPresentation, A: Mat) -> Mat:
    """delta on K[Y] (x) K[G] with K[G] constant, restricted to W."""
    ds = DifferentialStructure(ind.source, A)
    R = ind.ring
    derivs = []
    for M in ds.decomposition.mats:
        img = _matrix_derivation_images(ind.source.ring, "y", ind.source.n, M)
        d = {k: R.embed(v, ind.source.ring) for k, v in img.items()}
        d.update({k: R.zero() for k in R.names if k.startswith("t")})
        derivs.append(d)
    n = ind.group.n
    W = [[ind.generators[f"w{i}{j}"] for j in range(1, n + 1)] for i in range(1, n + 1)]
    mats = solve_matrix_derivation(R, ind.algebra.ideal, derivs, W, ind.generators["wdi"])
    return combine_matrices(ds.decomposition.scalars, mats, n, ds.decomposition.t_prec)


def canonical_embedding_surjective(ind: InducedPresentation, deg: int = 2) -> bool:
    """T -> I sends the generators to a generating set of K[Y]: products of
    at most `deg` specialized generators span the standard monomials of K[Y]
    of degree <= deg (modulo the ideal of Y)."""
    Y = ind.source
    R, I = Y.ring, Y.ideal
    gens = [I.reduce(g) for g in ind.specialize_identity()]
    prods = [R.one()]
    for k in range(1, deg + 1):
        for combo in itertools.combinations_with_replacement(range(len(gens)), k):
            p = R.one()
            for c in combo:
                p = p * gens[c]
            prods.append(I.reduce(p))
    targets = [R.monomial(m) for m in Y.algebra.standard_monomials(deg)]
    rp, _, rs = _spans_compare(prods, targets)
    return rs == rp


def corrupt_row(ind: InducedPresentation, row: int = 0) -> InducedPresentation:
    """Same induction data with one row of Z0 replaced by zeros (no audit)."""
    R = ind.source.ring
    Z0 = [[R.zero() if i == row else e for e in r] for i, r in enumerate(ind.Z0)]
    return InducedPresentation(ind.source, ind.group, Z0, None, None, {"corrupted_row": row})


@dataclass
class IsoReport:
    ok: bool
    dims: dict
    deg: int
    detail: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "dims": self.dims, "deg": self.deg, "detail": self.detail}


def _images_of_monomials(S: TorsorPresentation, R: PolyRing, I: Ideal, images: dict, deg: int) -> list[Poly]:
    out = []
    for m in S.algebra.standard_monomials(deg):
        out.append(I.reduce(R.hom(S.ring.monomial(m), images, S.ring)))
    return out


def ind_GG_isomorphism(G: GroupPresentation, deg: int = 2, degree_cap: int = DEFAULT_DEGREE_CAP) -> IsoReport:
    """Ind_G^G(Y) = Y via rho: y -> y.t identifies K[Y] with the twist
    invariants. In the product ring at degree <= deg: images of K[Y]-monomials
    of degree <= deg // 2 are invariant, and every invariant lies in the span
    of images of K[Y]-monomials of degree <= deg (the inverse, T -> I, does
    not raise degree); images are independent throughout."""
    Y = TorsorPresentation(G, prefix="y")
    ind = induce(Y, G)
    inv = invariants_bounded(ind.twist, deg, degree_cap)
    R, I = ind.ring, ind.algebra.ideal
    images = {k.replace("w", "y", 1): v for k, v in ind.generators.items()}
    half = _images_of_monomials(Y, R, I, images, deg // 2)
    full = _images_of_monomials(Y, R, I, images, deg)
    inv_polys = _basis_polys(inv, R)
    rh, ri, rhi = _spans_compare(half, inv_polys)
    rf, _, rfi = _spans_compare(full, inv_polys)
    n_half = len(Y.algebra.standard_monomials(deg // 2))
    n_full = len(Y.algebra.standard_monomials(deg))
    ok = rh == n_half and rf == n_full and rhi == ri and rfi == rf
    return IsoReport(ok, {"source": n_half, "images": rh, "invariants": ri, "source_full": n_full,
                          "covered": rfi == rf}, deg)


def trivial_induces_trivial(H: GroupPresentation, G: GroupPresentation, deg: int = 2,
                            degree_cap: int = DEFAULT_DEGREE_CAP) -> IsoReport:
    """The trivial H-torsor has the rational point 1; (1, g) gives K[Ind] -> K[G],
    which must be injective on the twist invariants and onto K[G] in degree
    <= deg // 2 (all checked inside degree <= deg)."""
    Y = TorsorPresentation(H, prefix="y")
    ind = induce(Y, G)
    R, I = ind.ring, ind.algebra.ideal
    inv = invariants_bounded(ind.twist, deg, degree_cap)
    S = G.ring("t")
    IG = G.ideal("t")
    vals = {k: S.one() if k == "ydi" else S.const(int(k[1] == k[2])) for k in R.names if k.startswith("y")}

    def to_G(p):
        return IG.reduce(p.compose(*[vals[n] if n in vals else S.var(n) for n in R.names], ctx=S.ctx))

    inv_polys = _basis_polys(inv, R)
    spec = [to_G(p) for p in inv_polys]
    injective = _span_rank(spec) == len(inv_polys)
    targets = [S.monomial(m) for m in S.monomials_upto(deg // 2) if IG.standard(m)]
    rs, rt, rst = _spans_compare(spec, targets)
    onto = rst == rs
    return IsoReport(injective and onto, {"invariants": len(inv_polys), "image": rs, "K[G] target": rt}, deg)


# ---------------------------------------------------------------------------
# Ind identities for G = N x| H
# ---------------------------------------------------------------------------


def _projection_to_H(G: GroupPresentation, R: PolyRing, prefix: str = "t") -> dict:
    """G -> G/N = H on coordinates (the H-component of the semidirect split)."""
    T = matrix_vars(R, prefix, G.n)
    z = R.zero()
    if G.name == "Borel":
        h = [[T[0][0], z], [z, T[1][1]]]
        return _leg_map(R, 2, "h", h, R[f"{prefix}di"])
    if G.name == "GmxGm":
        h = [[R.one(), z], [z, T[1][1]]]
        return _leg_map(R, 2, "h", h, R[f"{prefix}di"] * T[0][0])
    raise PreconditionFailed(f"no projection onto the complement for {G.name}")


@dataclass
class IndIdentityReport:
    group: str
    deg: int
    quotient_is_KH: bool
    quotient_recovers_R: bool
    dims: dict

    @property
    def ok(self) -> bool:
        return self.quotient_is_KH and self.quotient_recovers_R

    def to_json(self) -> dict:
        return {"group": self.group, "deg": self.deg, "ind_N_mod_N_is_K[H]": self.quotient_is_KH,
                "ind_H_mod_N_is_R": self.quotient_recovers_R, "dims": self.dims, "ok": self.ok}


def verify_ind_identities(G: GroupPresentation | str = "Borel", deg: int = 3,
                          degree_cap: int = DEFAULT_DEGREE_CAP) -> IndIdentityReport:
    """(Ind_N^G R)^N = K[H] for an N-torsor R, and (Ind_H^G R)^N = R for an
    H-torsor R, both at degree <= deg in K[R] (x) K[G]."""
    if isinstance(G, str):
        G = get_group(G)
    if deg > degree_cap:
        raise DegreeOverflow(f"degree {deg} exceeds cap {degree_cap}")
    sd = semidirect(G)
    N, H = sd.N, sd.H
    dims = {}

    # (a) R an N-torsor
    alg = _product_algebra(N, G)
    R, I = alg.ring, alg.ideal
    a1 = invariants_bounded(matrix_coaction(alg, [("y", False), ("t", True)], N), deg, degree_cap)
    a2 = invariants_bounded(matrix_coaction(alg, [("t", False)], N), deg, degree_cap)
    inter = _intersection([a1, a2])
    KH = TorsorPresentation(H, prefix="h")
    proj = _projection_to_H(G, R)
    kh_imgs = _images_of_monomials(KH, R, I, proj, deg)
    ra, rb, rab = _spans_compare(_basis_polys(a1, R, inter), kh_imgs)
    part_a = ra == rb == rab
    dims["(Ind_N R)^N"] = ra
    dims["K[H] image"] = rb

    # (b) R an H-torsor
    alg = _product_algebra(H, G)
    R, I = alg.ring, alg.ideal
    b1 = invariants_bounded(matrix_coaction(alg, [("y", False), ("t", True)], H), deg, degree_cap)
    b2 = invariants_bounded(matrix_coaction(alg, [("t", False)], N), deg, degree_cap)
    inter = _intersection([b1, b2])
    src = TorsorPresentation(H, prefix="y")
    # y -> y . pi(t): the H-torsor R mapped through the quotient G -> H
    proj = _projection_to_H(G, R)
    Yv = matrix_vars(R, "y", H.n)
    Pi = [[proj[f"h{i}{j}"] for j in range(1, 3)] for i in range(1, 3)]
    rho = _leg_map(R, H.n, "y", matmul_poly(Yv, Pi), R["ydi"] * proj["hdi"])
    inv_polys = _basis_polys(b1, R, inter)
    # all source monomials whose images can land in degree <= deg
    imgs = [p for p in _images_of_monomials(src, R, I, rho, deg) if total_degree(p) <= deg]
    n_src = len(imgs)
    ra, rb, rab = _spans_compare(inv_polys, imgs)
    part_b = ra == rb == rab and rb == n_src
    dims["(Ind_H R)^N"] = ra
    dims["R image"] = rb
    return IndIdentityReport(G.name, deg, part_a, part_b, dims)


# ---------------------------------------------------------------------------
# quotients by normal subgroups
# ---------------------------------------------------------------------------


# (G, N) -> (G/N catalog name, generator images in the z-coordinates, projection G -> G/N on the leg "u")
QUOTIENT_GENERATORS = {
    ("Borel", "Ga"): ("Gm", {"q11": "z11", "qdi": "z22"}, {"u11": "u11", "udi": "u22"}),
    ("GmxGm", "Gm_second"): ("Gm", {"q11": "z11", "qdi": "zdi*z22"}, {"u11": "u11", "udi": "udi*u22"}),
    ("GmxGm", "Gm_first"): ("Gm", {"q11": "z22", "qdi": "zdi*z11"}, {"u11": "u22", "udi": "udi*u11"}),
}


@dataclass(eq=False)
class QuotientPresentation:
    source: TorsorPresentation
    N: GroupPresentation
    quotient_group: GroupPresentation | None
    generators: dict  # q-name -> polynomial in the source ring
    certificate: dict
    structure: DifferentialStructure | None = None

    @property
    def is_point(self) -> bool:
        return self.quotient_group is None

    @property
    def result(self) -> TorsorPresentation | None:
        if self.quotient_group is None:
            return None
        return TorsorPresentation(self.quotient_group, self.source.base, "q", f"{self.source.group.name}/{self.N.name}")

    def to_json(self) -> dict:
        return {
            "G": self.source.group.name,
            "N": self.N.name,
            "quotient": None if self.quotient_group is None else self.quotient_group.name,
            "generators": {k: str(v) for k, v in self.generators.items()},
            "certificate": self.certificate,
            "A": None if self.structure is None else [[e.to_text() for e in row] for row in self.structure.A.rows],
        }


def quotient_by_normal(X: TorsorPresentation, N: GroupPresentation, deg: int = 3,
                       ds: DifferentialStructure | None = None,
                       degree_cap: int = DEFAULT_DEGREE_CAP) -> QuotientPresentation:
    """X/N = Spec K[X]^N on catalog generators, audited at degree <= deg."""
    G = X.group
    require_normal(N, G)
    if deg > degree_cap:
        raise DegreeOverflow(f"degree {deg} exceeds cap {degree_cap}")
    R = X.ring
    act = matrix_coaction(X.algebra, [(X.prefix, False)], N, "u")
    inv = invariants_bounded(act, deg, degree_cap)
    inv_polys = _basis_polys(inv, R)
    if N.name == G.name:
        ok = inv.only_constants()
        if not ok:
            raise GeneratorAuditFailed("K[X]^G has non-constant invariants")
        return QuotientPresentation(X, N, None, {}, {"invariants_are_constants": True, "deg": deg})
    key = (G.name, N.name)
    if key not in QUOTIENT_GENERATORS:
        raise NotNormal(f"no catalog quotient generators for {G.name}/{N.name}")
    Qname, gen_text, proj_text = QUOTIENT_GENERATORS[key]
    Q = get_group(Qname)
    gens = {k: X.ideal.reduce(R.parse(v.replace("z", X.prefix))) for k, v in gen_text.items()}

    CI = act.combined_ideal
    invariant = all(CI.contains(act.apply(p) - act.lift(p)) for p in gens.values())
    # generation: invariants of degree <= deg lie in the span of generator monomials
    Sq = Q.ring("q")
    qmon = []
    for m in Sq.monomials_upto(deg):
        p = R.hom(Sq.monomial(m), gens, Sq)
        qmon.append(X.ideal.reduce(p))
    ri, rq, rall = _spans_compare(inv_polys, qmon)
    generates = rall == rq
    # unique factorization: generator monomials landing in degree <= deg are independent
    low = [p for p in qmon if total_degree(p) <= deg]
    standard_q = [m for m in Sq.monomials_upto(deg) if Q.ideal("q").standard(m)]
    unique = _span_rank([X.ideal.reduce(R.hom(Sq.monomial(m), gens, Sq)) for m in standard_q]) == len(standard_q)
    # co-action restricts: rho_G(q) = q (x) pi(u)
    actG = X.coaction
    RC = actG.combined
    proj = {k: RC.parse(v) for k, v in proj_text.items()}
    restricts = True
    for k, p in gens.items():
        lhs = actG.apply(p)
        qv = RC.embed(p, R)
        rhs = qv * proj["u11"] if k == "q11" else qv * proj["udi"]
        if not actG.combined_ideal.contains(lhs - rhs):
            restricts = False
    cert = {"invariant": invariant, "generates": generates, "unique_factorization": unique,
            "coaction_restricts": restricts, "deg": deg, "invariant_dim": ri, "low_degree_images": len(low)}
    if not (invariant and generates and restricts):
        raise GeneratorAuditFailed(f"quotient generator audit failed: {cert}")
    quo = QuotientPresentation(X, N, Q, gens, cert)
    if ds is not None:
        quo.structure = transport_derivation(ds, quo.result, gens)
    return quo


# ---------------------------------------------------------------------------
# intersections with invariants
# ---------------------------------------------------------------------------


@dataclass
class IntersectionReport:
    checked: list  # (generators, stable, meets invariants)
    deg: int

    @property
    def ok(self) -> bool:
        return all(meets for _, stable, meets in self.checked if stable)

    @property
    def stable_count(self) -> int:
        return sum(1 for _, s, _ in self.checked if s)


INTERSECTION_FAMILY = (
    ("z11 - 1",), ("z22 - 1",), ("z11 - 2",), ("z11**2 - z11",), ("z12",), ("z11 - 1", "z12"),
    ("z22**2 - 4",), ("z11 - z22",), ("z12 - z11",), ("z11*z12",), ("z11 + z22 - 2",),
)


def intersection_invariants_fixture(deg: int = 2, family=INTERSECTION_FAMILY) -> IntersectionReport:
    """Borel torsor, N = Ga: every N-stable nonzero ideal in the family meets
    K[X]^N. The intersection is searched among elements J-multiples of degree
    <= deg + 2 (generator times monomial, reduced)."""
    from .groups import check_ideal_stable

    X = TorsorPresentation(get_group("Borel"))
    N = get_group("Ga")
    act = matrix_coaction(X.algebra, [("z", False)], N, "u")
    R, I = X.ring, X.ideal
    D = deg + 2
    inv = invariants_bounded(act, D, max(D, DEFAULT_DEGREE_CAP))
    inv_polys = _basis_polys(inv, R)
    out = []
    for gens_text in family:
        J = [R.parse(g) for g in gens_text]
        stable = check_ideal_stable(J, act).stable
        meets = False
        if stable:
            full = Ideal(R, list(I.gens) + J)
            if full.is_unit():
                meets = True
            else:
                elems = []
                for g in J:
                    for m in X.algebra.standard_monomials(D - total_degree(g)):
                        elems.append(I.reduce(g * R.monomial(m)))
                ra, rb, rab = _spans_compare(elems, inv_polys)
                meets = ra + rb > rab  # nonzero intersection of the two spans
        out.append((gens_text, stable, meets))
    return IntersectionReport(out, deg)


# ---------------------------------------------------------------------------
# finite Galois algebras
# ---------------------------------------------------------------------------


@dataclass
class FiniteGaloisAlgebra:
    """Commutative K-algebra with basis e_0 = 1, e_1, ...; structure constants
    mult[i][j] = coordinates of e_i e_j; a cyclic group C_order acting through
    `action[k]` = matrix of generator^k (columns = images of basis vectors)."""

    mult: list
    order: int
    action: list
    label: str = ""
    # for induced algebras: each basis vector as a function G -> L (values in L's basis)
    realization: list | None = None

    @property
    def dim(self) -> int:
        return len(self.mult)

    def product(self, a, b):
        n = self.dim
        out = [Fraction(0)] * n
        for i in range(n):
            if a[i] == 0:
                continue
            for j in range(n):
                if b[j] == 0:
                    continue
                for k in range(n):
                    out[k] += a[i] * b[j] * self.mult[i][j][k]
        return out

    def act(self, k: int, v):
        M = self.action[k % self.order]
        n = self.dim
        return [sum((M[r][c] * v[c] for c in range(n)), Fraction(0)) for r in range(n)]

    def unit(self):
        return [Fraction(int(i == 0)) for i in range(self.dim)]

    def check_action(self):
        n = self.dim
        basis = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
        for k in range(self.order):
            if self.act(k, self.unit()) != self.unit():
                raise BadAction(f"g^{k} does not fix 1")
            for a in basis:
                for b in basis:
                    if self.act(k, self.product(a, b)) != self.product(self.act(k, a), self.act(k, b)):
                        raise BadAction(f"g^{k} is not multiplicative")
        for k in range(self.order):
            for a in basis:
                if self.act(1, self.act(k, a)) != self.act(k + 1, a):
                    raise BadAction("action is not a group action")

    def invariants_dim(self) -> int:
        n = self.dim
        rows = []
        for k in range(1, self.order):
            M = self.action[k]
            for r in range(n):
                rows.append([fmpq(M[r][c].numerator, M[r][c].denominator) - int(r == c) for c in range(n)])
        return n - (rank(rows, n) if rows else 0)

    def galois_rank(self) -> int:
        """Rank of L (x) L -> prod_g L, a (x) b -> (a g(b))_g."""
        n = self.dim
        basis = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
        rows = []
        for a in basis:
            for b in basis:
                row = []
                for k in range(self.order):
                    row.extend(self.product(a, self.act(k, b)))
                rows.append([fmpq(x.numerator, x.denominator) for x in row])
        return rank(rows, n * self.order)

    def is_galois(self) -> bool:
        return self.dim == self.order and self.invariants_dim() == 1 and self.galois_rank() == self.dim ** 2


def quadratic_algebra(a, order: int = 2) -> FiniteGaloisAlgebra:
    """K[u]/(u^2 - a) with u -> -u."""
    a = Fraction(a)
    mult = [[[1, 0], [0, 1]], [[0, 1], [a, 0]]]
    mult = [[[Fraction(x) for x in v] for v in row] for row in mult]
    ident = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    sign = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(-1)]]
    return FiniteGaloisAlgebra(mult, 2, [ident, sign], f"K[u]/(u^2 - {a})")


def field_K() -> FiniteGaloisAlgebra:
    return FiniteGaloisAlgebra([[[Fraction(1)]]], 1, [[[Fraction(1)]]], "K")


def induce_finite_galois(L: FiniteGaloisAlgebra, G_order: int, H_order: int | None = None) -> FiniteGaloisAlgebra:
    """Ind_H^G(L) for H = C_m inside G = C_n (H generated by n/m): maps f: G -> L
    with f(g + h) = h.f(g), G acting by translation (f.k)(g) = f(g + k)."""
    H_order = L.order if H_order is None else H_order
    if H_order != L.order:
        raise BadAction("L is acted on by a group of the wrong order")
    if G_order % H_order:
        raise PreconditionFailed("H is not a subgroup of G")
    L.check_action()
    n, d = G_order, L.dim
    step = n // H_order
    # free values on coset representatives 0..step-1; f(r + j*step) = gen^j . f(r)
    dim = step * d
    basis = []
    for r in range(step):
        for b in range(d):
            f = [[Fraction(0)] * d for _ in range(n)]
            v = [Fraction(int(i == b)) for i in range(d)]
            for j in range(H_order):
                f[(r + j * step) % n] = L.act(j, v)
            basis.append(f)

    def coords(f):
        return [f[r][b] for r in range(step) for b in range(d)]

    def pointwise(f, g):
        return [L.product(f[i], g[i]) for i in range(n)]

    for f in basis:  # equivariance of the constructed maps
        for g in range(n):
            if f[(g + step) % n] != L.act(1, f[g]):
                raise BadAction("constructed map is not H-equivariant")
    mult = [[coords(pointwise(f, g)) for g in basis] for f in basis]
    action = []
    for k in range(n):
        cols = [coords([f[(g + k) % n] for g in range(n)]) for f in basis]
        action.append([[cols[c][r] for c in range(dim)] for r in range(dim)])
    # unit first: reorder so that e_0 is the constant function 1
    out = FiniteGaloisAlgebra(mult, n, action, f"Ind_C{H_order}^C{n}({L.label})", basis)
    return _normalize_unit(out, coords([L.unit() for _ in range(n)]))


def _normalize_unit(A: FiniteGaloisAlgebra, one: list) -> FiniteGaloisAlgebra:
    """Change basis so the first vector is 1 (needed by unit())."""
    n = A.dim
    if one == [Fraction(int(i == 0)) for i in range(n)]:
        return A
    # new basis: one, then the standard vectors not in the span
    vecs = [one]
    for i in range(n):
        e = [Fraction(int(j == i)) for j in range(n)]
        trial = vecs + [e]
        if rank([[fmpq(x.numerator, x.denominator) for x in v] for v in trial], n) == len(trial):
            vecs.append(e)
    P = [[vecs[c][r] for c in range(n)] for r in range(n)]  # columns = new basis
    Pinv = _inverse(P)

    def to_new(v):
        return [sum((Pinv[r][c] * v[c] for c in range(n)), Fraction(0)) for r in range(n)]

    def old_product(a, b):
        return A.product(a, b)

    mult = [[to_new(old_product(vecs[i], vecs[j])) for j in range(n)] for i in range(n)]
    action = []
    for k in range(A.order):
        cols = [to_new(A.act(k, vecs[c])) for c in range(n)]
        action.append([[cols[c][r] for c in range(n)] for r in range(n)])
    real = None
    if A.realization is not None:
        real = []
        for v in vecs:
            f = None
            for c, g in zip(v, A.realization):
                if c == 0:
                    continue
                scaled = [[c * x for x in val] for val in g]
                f = scaled if f is None else [[a + b for a, b in zip(u, w)] for u, w in zip(f, scaled)]
            real.append(f)
    return FiniteGaloisAlgebra(mult, A.order, action, A.label, real)


def _inverse(M):
    n = len(M)
    aug = [list(M[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def evaluation_is_isomorphism(ind: FiniteGaloisAlgebra, L: FiniteGaloisAlgebra) -> bool:
    """For H = G: f -> f(0) is a bijective, multiplicative, equivariant map
    Ind_G^G(L) -> L."""
    if ind.realization is None or ind.dim != L.dim:
        return False
    ev = [f[0] for f in ind.realization]  # images of the basis
    d = L.dim
    if rank([[fmpq(x.numerator, x.denominator) for x in v] for v in ev], d) != d:
        return False

    def apply(v):
        out = [Fraction(0)] * d
        for c, e in zip(v, ev):
            if c != 0:
                out = [a + c * b for a, b in zip(out, e)]
        return out

    n = ind.dim
    basis = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    for a in basis:
        for b in basis:
            if apply(ind.product(a, b)) != L.product(apply(a), apply(b)):
                return False
        for k in range(ind.order):
            if apply(ind.act(k, a)) != L.act(k, apply(a)):
                return False
    return True


def unipotent_fixture(prec: int = 10, window=(-12, 12)) -> InducedPresentation:
    """Ind from the upper unipotent subgroup to SL2 with Z0 = [[1, logP], [0, 1]]."""
    from .diamond import SPECIALS
    from .patching import special_matrix
    from .scalars import BiRatFunc

    Y = TorsorPresentation(get_group("Ga"), prefix="y", name="Ga-fixture")
    Z0 = special_matrix([[1, "logP"], [0, 1]], prec, window)
    zero = BiRatFunc(0)
    A = Mat([[zero, SPECIALS["logP"].derivative], [zero, zero]])
    return induce(Y, get_group("SL2"), Z0_field=Z0, A=A)


def shipped_fixtures() -> dict:
    """Induced presentations exercised by the surjectivity check."""
    out = {"unipotent_in_SL2": unipotent_fixture()}
    for g in ("Gm", "SL2", "Borel"):
        G = get_group(g)
        out[f"{g}_in_{g}"] = induce(TorsorPresentation(G, prefix="y"), G)
    out["torus_in_Borel"] = induce(TorsorPresentation(get_group("Gm_torus"), prefix="y"), get_group("Borel"))
    out["Ga_in_Borel"] = induce(TorsorPresentation(get_group("Ga"), prefix="y"), get_group("Borel"))
    return out
