"""Linear algebraic groups over Q as closed subgroups of GL_n.

Coordinates of a group "leg" with prefix p are p11, ..., pnn and pdi (the
inverse determinant). The Hopf structure is the one of GL_n: comultiplication
T -> T T', counit T -> I, antipode T -> adj(T) det(T)^-1.

Co-actions are ring maps from an algebra presentation into
(algebra) (x) K[H], both sides written in one polynomial ring whose
H-variables carry their own prefix. Stability of ideals, invariants and
their comparisons all reduce to normal forms and exact linear algebra.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import flint

from .errors import DegreeOverflow, NotNormal, PreconditionFailed, SchemaError
from .linalg import intersect_spans, nullspace_sparse, rank, row_basis
from .polys import Ideal, Poly, PolyRing, coefficient_split, disjoint_sum, total_degree

fmpq = flint.fmpq

DEFAULT_DEGREE_CAP = 4


def leg_names(prefix: str, n: int) -> list[str]:
    return [f"{prefix}{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1)] + [f"{prefix}di"]


def matrix_vars(R: PolyRing, prefix: str, n: int) -> list[list[Poly]]:
    return [[R.var(f"{prefix}{i}{j}") for j in range(1, n + 1)] for i in range(1, n + 1)]


def det_poly(M: Sequence[Sequence[Poly]]):
    n = len(M)
    if n == 1:
        return M[0][0]
    acc = None
    for j in range(n):
        minor = [[M[r][c] for c in range(n) if c != j] for r in range(1, n)]
        term = M[0][j] * det_poly(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def adjugate_poly(M):
    n = len(M)
    if n == 1:
        return [[M[0][0] * 0 + 1]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[M[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            d = det_poly(minor)
            out[j][i] = d if (i + j) % 2 == 0 else -d
    return out


def matmul_poly(A, B):
    n, m, k = len(A), len(B[0]), len(B)
    return [[sum((A[i][l] * B[l][j] for l in range(1, k)), A[i][0] * B[0][j]) for j in range(m)] for i in range(n)]


def _rename(text: str, prefix: str) -> str:
    """Group generators are written in t11.. / detinv; rename to a leg."""
    import re

    text = text.replace("detinv", f"{prefix}di")
    return re.sub(r"\bt_?(\d)(\d)\b", lambda m: f"{prefix}{m.group(1)}{m.group(2)}", text)


# ---------------------------------------------------------------------------
# group presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GroupPresentation:
    name: str
    n: int
    ideal_gens: tuple[str, ...]  # in t11.. and detinv
    points: Callable[[], list] | None = None  # sample rational points
    lie_gens: tuple | None = None
    order: int | None = None  # for finite groups

    def names(self, prefix: str = "t") -> list[str]:
        return leg_names(prefix, self.n)

    def ring(self, prefix: str = "t") -> PolyRing:
        return PolyRing(self.names(prefix))

    def relations(self, R: PolyRing, prefix: str = "t") -> list[Poly]:
        M = matrix_vars(R, prefix, self.n)
        rels = [det_poly(M) * R.var(f"{prefix}di") - 1]
        L = self.ring(prefix)
        rels += [R.embed(L.parse(_rename(g, prefix)), L) for g in self.ideal_gens]
        return rels

    def ideal(self, prefix: str = "t") -> Ideal:
        return _group_ideal(self, prefix)

    def sample_points(self) -> list[list[list[Fraction]]]:
        return list(self.points()) if self.points is not None else [_identity(self.n)]

    def contains_point(self, M) -> bool:
        R = self.ring("t")
        vals = [M[i][j] for i in range(self.n) for j in range(self.n)]
        d = _det_frac(M)
        if d == 0:
            return False
        vals.append(1 / d)
        for g in self.relations(R, "t"):
            if _eval(g, vals) != 0:
                return False
        return True

    def __repr__(self):
        return f"GroupPresentation({self.name}, n={self.n})"


_IDEAL_CACHE: dict = {}


def _group_ideal(G: GroupPresentation, prefix: str) -> Ideal:
    key = (G.name, G.n, G.ideal_gens, prefix)
    if key not in _IDEAL_CACHE:
        R = G.ring(prefix)
        _IDEAL_CACHE[key] = Ideal(R, G.relations(R, prefix))
    return _IDEAL_CACHE[key]


def _identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _det_frac(M):
    n = len(M)
    if n == 1:
        return Fraction(M[0][0])
    return sum(
        (-1) ** j * Fraction(M[0][j]) * _det_frac([[M[r][c] for c in range(n) if c != j] for r in range(1, n)])
        for j in range(n)
    )


def _eval(p: Poly, vals) -> Fraction:
    acc = Fraction(0)
    for m, c in zip(p.monoms(), p.coeffs()):
        term = Fraction(int(c.p), int(c.q))
        for v, e in zip(vals, m):
            if e:
                term *= Fraction(v) ** int(e)
        acc += term
    return acc


def _mat(rows):
    return [[Fraction(v) for v in r] for r in rows]


def _pts_gl(n):
    def pts():
        out = [_identity(n)]
        for i in range(n):
            for j in range(n):
                if i != j:
                    for c in (1, -2, 3):
                        M = _identity(n)
                        M[i][j] = Fraction(c)
                        out.append(M)
        for vals in ((2, 3, 5), (-1, Fraction(1, 2), 7)):
            M = _identity(n)
            for i in range(n):
                M[i][i] = Fraction(vals[i])
            out.append(M)
        return out

    return pts


def _pts_sl2():
    out = [_identity(2)]
    for c in (1, -2, 3):
        out.append(_mat([[1, c], [0, 1]]))
        out.append(_mat([[1, 0], [c, 1]]))
    for a in (2, -3, Fraction(1, 5)):
        out.append(_mat([[a, 0], [0, 1 / Fraction(a)]]))
    out.append(_mat([[2, 3], [1, 2]]))
    out.append(_mat([[0, 1], [-1, 0]]))
    return out


CATALOG: dict[str, GroupPresentation] = {}


def _register(G: GroupPresentation) -> GroupPresentation:
    CATALOG[G.name] = G
    return G


GL1 = _register(GroupPresentation("GL1", 1, (), _pts_gl(1)))
GL2 = _register(GroupPresentation("GL2", 2, (), _pts_gl(2)))
GL3 = _register(GroupPresentation("GL3", 3, (), _pts_gl(3)))
GM = _register(GroupPresentation("Gm", 1, (), lambda: [_mat([[c]]) for c in (1, 2, -3, Fraction(1, 7))]))
SL2 = _register(GroupPresentation("SL2", 2, ("t11*t22 - t12*t21 - 1", "detinv - 1"), _pts_sl2,
                                  lie_gens=(((0, 1), (0, 0)), ((0, 0), (1, 0)), ((1, 0), (0, -1)))))
GA = _register(GroupPresentation("Ga", 2, ("t11 - 1", "t22 - 1", "t21", "detinv - 1"),
                                 lambda: [_mat([[1, c], [0, 1]]) for c in (0, 1, -2, Fraction(3, 2))],
                                 lie_gens=(((0, 1), (0, 0)),)))
GA_LOWER = _register(GroupPresentation("Ga_lower", 2, ("t11 - 1", "t22 - 1", "t12", "detinv - 1"),
                                       lambda: [_mat([[1, 0], [c, 1]]) for c in (0, 1, -2, Fraction(3, 2))],
                                       lie_gens=(((0, 0), (1, 0)),)))
TORUS = _register(GroupPresentation("Gm_torus", 2, ("t12", "t21", "t11*t22 - 1", "detinv - 1"),
                                    lambda: [_mat([[a, 0], [0, 1 / Fraction(a)]]) for a in (1, 2, -3, Fraction(1, 5))],
                                    lie_gens=(((1, 0), (0, -1)),)))
BOREL = _register(GroupPresentation("Borel", 2, ("t21", "t11*t22 - 1", "detinv - 1"),
                                    lambda: [_mat([[a, b], [0, 1 / Fraction(a)]]) for a in (1, 2, -3) for b in (0, 1, -2)],
                                    lie_gens=(((0, 1), (0, 0)), ((1, 0), (0, -1)))))
GMXGM = _register(GroupPresentation("GmxGm", 2, ("t12", "t21"),
                                    lambda: [_mat([[a, 0], [0, b]]) for a in (1, 2, -3) for b in (1, 5, Fraction(1, 2))]))
GM1XONE = _register(GroupPresentation("Gm_first", 2, ("t12", "t21", "t22 - 1"),
                                      lambda: [_mat([[a, 0], [0, 1]]) for a in (1, 2, -3, Fraction(1, 5))]))
ONEXGM = _register(GroupPresentation("Gm_second", 2, ("t12", "t21", "t11 - 1"),
                                     lambda: [_mat([[1, 0], [0, b]]) for b in (1, 2, -3, Fraction(1, 5))]))

# {+-1} inside SL2: central, but not a certified normal pair (no quotient data)
CENTER_SL2 = _register(GroupPresentation("center_SL2", 2, ("t12", "t21", "t11 - t22", "t11**2 - 1", "detinv - 1"),
                                         lambda: [_identity(2), _mat([[-1, 0], [0, -1]])], order=2))


def trivial(n: int = 1) -> GroupPresentation:
    name = "trivial" if n == 1 else f"trivial{n}"
    if name not in CATALOG:
        gens = tuple(f"t{i}{j} - {int(i == j)}" if i == j else f"t{i}{j}"
                     for i in range(1, n + 1) for j in range(1, n + 1)) + ("detinv - 1",)
        _register(GroupPresentation(name, n, gens, lambda: [_identity(n)], order=1))
    return CATALOG[name]


def mu(k: int) -> GroupPresentation:
    """Cyclic group of order k: t^k = 1 in GL_1 (rational points: +-1 only)."""
    name = f"mu{k}"
    if name not in CATALOG:
        pts = [[[Fraction(1)]]] + ([[[Fraction(-1)]]] if k % 2 == 0 else [])
        _register(GroupPresentation(name, 1, (f"t11**{k} - 1",), lambda: pts, order=k))
    return CATALOG[name]


TRIVIAL = trivial(1)
TRIVIAL2 = trivial(2)
mu(2), mu(4)


def direct_product(G: GroupPresentation, H: GroupPresentation) -> GroupPresentation:
    """G x H block-diagonally in GL_{n+m}."""
    n, m = G.n, H.n
    N = n + m
    name = f"{G.name}x{H.name}"
    if name in CATALOG:
        return CATALOG[name]
    R = PolyRing(leg_names("t", N))
    T = matrix_vars(R, "t", N)
    B1 = [row[:n] for row in T[:n]]
    B2 = [row[n:] for row in T[n:]]
    d = R.var("tdi")
    # det(B1)^-1 = d * det(B2), det(B2)^-1 = d * det(B1)
    inv1, inv2 = d * det_poly(B2), d * det_poly(B1)
    gens = []
    for i in range(N):
        for j in range(N):
            if (i < n) != (j < n):
                gens.append(T[i][j])
    for src, block, inv in ((G, B1, inv1), (H, B2, inv2)):
        Rs = src.ring("s")
        images = {f"s{i + 1}{j + 1}": block[i][j] for i in range(src.n) for j in range(src.n)}
        images["sdi"] = inv
        for g in src.ideal_gens:
            gens.append(R.hom(Rs.parse(_rename(g, "s")), images, Rs))

    def pts():
        out = []
        for a in G.sample_points():
            for b in H.sample_points():
                M = [[Fraction(0)] * N for _ in range(N)]
                for i in range(n):
                    for j in range(n):
                        M[i][j] = a[i][j]
                for i in range(m):
                    for j in range(m):
                        M[n + i][n + j] = b[i][j]
                out.append(M)
        return out

    order = G.order * H.order if G.order and H.order else None
    return _register(GroupPresentation(name, N, tuple(str(R.to_sympy(g)).replace("tdi", "detinv") for g in gens), pts,
                                       order=order))


# catalog metadata: certified facts, not re-derived
NORMAL_PAIRS = {
    ("Ga", "Borel"),
    ("Gm_first", "GmxGm"),
    ("Gm_second", "GmxGm"),
}
GENERATION = {
    ("Ga", "Ga_lower"): "SL2",
    ("Ga", "Gm_torus"): "Borel",
    ("Gm_first", "Gm_second"): "GmxGm",
}
SEMIDIRECT = {
    # G: (N, H)
    "Borel": ("Ga", "Gm_torus"),
    "GmxGm": ("Gm_first", "Gm_second"),
}


def is_normal(N: GroupPresentation, G: GroupPresentation) -> bool:
    if N.name == G.name or N.name.startswith("trivial"):
        return True
    if G.name.startswith("trivial"):
        return N.name.startswith("trivial")
    return (N.name, G.name) in NORMAL_PAIRS or (G.n == 1 and G.name in ("Gm", "GL1") and N.n == 1)


def require_normal(N: GroupPresentation, G: GroupPresentation):
    if not is_normal(N, G):
        raise NotNormal(f"{N.name} is not a catalog-certified normal subgroup of {G.name}")


def get_group(name: str) -> GroupPresentation:
    if name in CATALOG:
        return CATALOG[name]
    if name.startswith("mu") and name[2:].isdigit():
        return mu(int(name[2:]))
    if name.startswith("trivial"):
        return trivial(int(name[7:] or 1))
    raise SchemaError(f"unknown group {name!r}")


def group_from_json(doc) -> GroupPresentation:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        name, n, gens = doc["name"], int(doc["n"]), tuple(doc.get("ideal_gens", ()))
    except (KeyError, TypeError, ValueError) as ex:
        raise SchemaError(f"bad group document: {ex}") from ex
    if name in CATALOG and CATALOG[name].n == n:
        return CATALOG[name]
    G = GroupPresentation(name, n, gens)
    flags = doc.get("flags", {})
    for sup in flags.get("normal_in", []):
        NORMAL_PAIRS.add((name, sup))
    return G


# ---------------------------------------------------------------------------
# Hopf structure
# ---------------------------------------------------------------------------


def comultiply_ring(n: int, legs=("t", "u")) -> PolyRing:
    return PolyRing([v for p in legs for v in leg_names(p, n)])


def comultiply(f: Poly, n: int, src: PolyRing | None = None, legs=("t", "u")) -> Poly:
    """Delta: T -> T T', detinv -> detinv detinv'."""
    a, b = legs
    src = src or PolyRing(leg_names(a, n))
    R = comultiply_ring(n, legs)
    A, B = matrix_vars(R, a, n), matrix_vars(R, b, n)
    AB = matmul_poly(A, B)
    images = {f"{a}{i}{j}": AB[i - 1][j - 1] for i in range(1, n + 1) for j in range(1, n + 1)}
    images[f"{a}di"] = R.var(f"{a}di") * R.var(f"{b}di")
    return R.hom(f, images, src)


def _leg_map(R: PolyRing, n: int, src_prefix: str, images_matrix, di_image) -> dict:
    out = {f"{src_prefix}{i}{j}": images_matrix[i - 1][j - 1] for i in range(1, n + 1) for j in range(1, n + 1)}
    out[f"{src_prefix}di"] = di_image
    return out


@dataclass
class HopfReport:
    group: str
    coassociative: bool
    counit: bool
    antipode: bool
    hopf_ideal: bool
    details: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.coassociative and self.counit and self.antipode and self.hopf_ideal


def check_hopf_axioms(G: GroupPresentation) -> HopfReport:
    """Coassociativity, counit and antipode laws on the generators t_ij, detinv,
    each as an identity in K[G] (resp. K[G]^{(x)2}, K[G]^{(x)3}); plus the
    Hopf-ideal conditions for G's relations."""
    n = G.n
    R1 = G.ring("t")
    I1 = G.ideal("t")
    R3 = PolyRing(leg_names("t", n) + leg_names("u", n) + leg_names("v", n))
    I3 = disjoint_sum(R3, [G.ideal("t"), G.ideal("u"), G.ideal("v")])
    T, U, V = (matrix_vars(R3, p, n) for p in "tuv")
    details = []

    # coassociativity: (Delta (x) id) Delta = (id (x) Delta) Delta
    coassoc = True
    TU_V = matmul_poly(matmul_poly(T, U), V)
    T_UV = matmul_poly(T, matmul_poly(U, V))
    for i in range(n):
        for j in range(n):
            if not I3.contains(TU_V[i][j] - T_UV[i][j]):
                coassoc = False
                details.append(f"coassociativity fails at t{i + 1}{j + 1}")
    if not I3.contains(R3["tdi"] * R3["udi"] * R3["vdi"] - R3["tdi"] * (R3["udi"] * R3["vdi"])):
        coassoc = False

    # counit: (eps (x) id) Delta = id = (id (x) eps) Delta
    counit = True
    Tm = matrix_vars(R1, "t", n)
    Id = [[R1.const(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            left = matmul_poly(Id, Tm)[i][j]
            right = matmul_poly(Tm, Id)[i][j]
            if not (I1.contains(left - Tm[i][j]) and I1.contains(right - Tm[i][j])):
                counit = False
                details.append(f"counit fails at t{i + 1}{j + 1}")
    # eps must be a point of G: generators vanish at I
    eps_vals = [Fraction(int(i == j)) for i in range(n) for j in range(n)] + [Fraction(1)]
    for g in G.relations(R1, "t"):
        if _eval(g, eps_vals) != 0:
            counit = False
            details.append(f"identity is not a point: {g}")

    # antipode: m (S (x) id) Delta = eps = m (id (x) S) Delta
    antipode = True
    d = R1["tdi"]
    S = [[e * d for e in row] for row in adjugate_poly(Tm)]
    for P in (matmul_poly(S, Tm), matmul_poly(Tm, S)):
        for i in range(n):
            for j in range(n):
                if not I1.contains(P[i][j] - int(i == j)):
                    antipode = False
                    details.append(f"antipode fails at ({i + 1},{j + 1})")
    if not I1.contains(det_poly(Tm) * d - 1):
        antipode = False

    # Hopf ideal: Delta(I) in I(x)K + K(x)I, S(I) in I, eps(I) = 0
    hopf = True
    R2 = comultiply_ring(n)
    I2 = disjoint_sum(R2, [G.ideal("t"), G.ideal("u")])
    Sm = {f"t{i}{j}": S[i - 1][j - 1] for i in range(1, n + 1) for j in range(1, n + 1)}
    Sm["tdi"] = det_poly(Tm)
    for g in G.relations(R1, "t"):
        if not I2.contains(comultiply(g, n, R1)):
            hopf = False
            details.append(f"comultiplication leaves the ideal: {g}")
        if not I1.contains(R1.hom(g, Sm, R1)):
            hopf = False
            details.append(f"antipode leaves the ideal: {g}")
    return HopfReport(G.name, coassoc, counit, antipode, hopf, details)


@dataclass(frozen=True)
class SubgroupInclusion:
    sub: GroupPresentation
    super: GroupPresentation
    witness: tuple  # normal forms of super's relations modulo sub's ideal


def subgroup_inclusion(sub: GroupPresentation, sup: GroupPresentation) -> SubgroupInclusion:
    if sub.n != sup.n:
        raise PreconditionFailed("subgroup must live in the same GL_n")
    I = sub.ideal("t")
    R = sub.ring("t")
    wit = tuple(str(I.reduce(g)) for g in sup.relations(R, "t"))
    if any(w != "0" for w in wit):
        raise PreconditionFailed(f"{sub.name} is not contained in {sup.name}")
    return SubgroupInclusion(sub, sup, wit)


@dataclass(frozen=True)
class SemidirectData:
    N: GroupPresentation
    H: GroupPresentation
    G: GroupPresentation
    certificate: dict


def semidirect(G: GroupPresentation) -> SemidirectData:
    """G = N x| H for catalog G, certified by the mutually inverse maps
    N x H -> G, (n, h) -> n h and G -> N x H on coordinate rings."""
    if G.name not in SEMIDIRECT:
        raise PreconditionFailed(f"no semidirect decomposition for {G.name}")
    N, H = (get_group(s) for s in SEMIDIRECT[G.name])
    subgroup_inclusion(N, G)
    subgroup_inclusion(H, G)
    n = G.n
    # (n, h) -> n h lands in G
    R2 = PolyRing(leg_names("a", n) + leg_names("b", n))
    I2 = disjoint_sum(R2, [N.ideal("a"), H.ideal("b")])
    A, B = matrix_vars(R2, "a", n), matrix_vars(R2, "b", n)
    AB = matmul_poly(A, B)
    images = _leg_map(R2, n, "t", AB, R2["adi"] * R2["bdi"])
    lands = all(I2.contains(R2.hom(g, images, G.ring("t"))) for g in G.relations(G.ring("t"), "t"))
    # inverse: g -> (g h(g)^-1, h(g)) with h(g) the H-component (diagonal part)
    RG = G.ring("t")
    IG = G.ideal("t")
    T = matrix_vars(RG, "t", n)
    d = RG["tdi"]
    if G.name == "Borel":
        h = [[T[0][0], RG.zero()], [RG.zero(), T[1][1]]]
        hinv = [[T[1][1], RG.zero()], [RG.zero(), T[0][0]]]
    else:  # GmxGm
        h = [[RG.one(), RG.zero()], [RG.zero(), T[1][1]]]
        hinv = [[RG.one(), RG.zero()], [RG.zero(), T[0][0] * d]]
    nn = matmul_poly(T, hinv)
    back = matmul_poly(nn, h)
    roundtrip = all(IG.contains(back[i][j] - T[i][j]) for i in range(n) for j in range(n))
    in_n = all(IG.contains(RG.hom(g, _leg_map(RG, n, "t", nn, RG.one()), RG))
               for g in N.relations(RG, "t") if "tdi" not in str(g)) if G.name == "Borel" else True
    cert = {"product_lands_in_G": lands, "roundtrip": roundtrip, "N_component_in_N": in_n}
    if not all(cert.values()):
        raise PreconditionFailed(f"semidirect certificate failed for {G.name}: {cert}")
    return SemidirectData(N, H, G, cert)


# ---------------------------------------------------------------------------
# co-actions, stability, invariants
# ---------------------------------------------------------------------------


@dataclass
class Algebra:
    """Presentation ring / ideal of a comodule algebra."""

    ring: PolyRing
    ideal: Ideal
    name: str = ""

    def standard_monomials(self, deg: int) -> list[tuple[int, ...]]:
        return [m for m in self.ring.monomials_upto(deg) if self.ideal.standard(m)]


def group_algebra(G: GroupPresentation, prefix: str = "t") -> Algebra:
    return Algebra(G.ring(prefix), G.ideal(prefix), f"K[{G.name}]")


@dataclass
class CoAction:
    """rho: K[X] -> K[X] (x) K[H] as images of the algebra variables in the
    combined ring (algebra names followed by the H-leg names)."""

    algebra: Algebra
    group: GroupPresentation
    leg: str
    combined: PolyRing
    images: dict
    label: str = ""

    @cached_property
    def combined_ideal(self) -> Ideal:
        return disjoint_sum(self.combined, [self.algebra.ideal, self.group.ideal(self.leg)])

    @cached_property
    def group_ideal(self) -> Ideal:
        return self.group.ideal(self.leg).extend(self.combined)

    @property
    def leg_names(self) -> list[str]:
        return leg_names(self.leg, self.group.n)

    def apply(self, f: Poly) -> Poly:
        return self.combined.hom(f, self.images, self.algebra.ring)

    def lift(self, f: Poly) -> Poly:
        """f (x) 1."""
        return self.combined.embed(f, self.algebra.ring)

    def at_point(self, f: Poly, M) -> Poly:
        """h(f) for a rational point h of H: specialize the H-leg."""
        img = self.apply(f)
        n = self.group.n
        vals = {}
        for i in range(n):
            for j in range(n):
                vals[f"{self.leg}{i + 1}{j + 1}"] = self.combined.const(_q(M[i][j]))
        vals[f"{self.leg}di"] = self.combined.const(_q(1 / _det_frac(M)))
        spec = self.combined.hom(img, vals, self.combined)
        R = self.algebra.ring
        return R.hom(spec, {v: R.zero() for v in self.leg_names}, self.combined)


def _q(v) -> fmpq:
    v = Fraction(v)
    return fmpq(v.numerator, v.denominator)


def _block_images(R: PolyRing, src: str, leg: str, n: int, twisted: bool):
    X = matrix_vars(R, src, n)
    U = matrix_vars(R, leg, n)
    if not twisted:
        M = matmul_poly(X, U)
        di = R[f"{src}di"] * R[f"{leg}di"]
    else:
        Uinv = [[e * R[f"{leg}di"] for e in row] for row in adjugate_poly(U)]
        M = matmul_poly(Uinv, X)
        di = R[f"{src}di"] * det_poly(U)
    return _leg_map(R, n, src, M, di)


def matrix_coaction(alg: Algebra, blocks: Sequence[tuple[str, bool]], H: GroupPresentation,
                    leg: str = "u", label: str = "") -> CoAction:
    """Co-action on an algebra made of n x n matrix blocks: each block with
    prefix p goes to p.h (right translation) or h^-1.p (twisted=True)."""
    R = PolyRing(list(alg.ring.names) + leg_names(leg, H.n))
    images = {}
    for prefix, twisted in blocks:
        images.update(_block_images(R, prefix, leg, H.n, twisted))
    return CoAction(alg, H, leg, R, images, label)


def right_translation(G: GroupPresentation, H: GroupPresentation, prefix: str = "t") -> CoAction:
    return matrix_coaction(group_algebra(G, prefix), [(prefix, False)], H, label=f"right translation by {H.name}")


def twisted_translation(G: GroupPresentation, H: GroupPresentation, prefix: str = "t") -> CoAction:
    """x.h = h^-1 x."""
    return matrix_coaction(group_algebra(G, prefix), [(prefix, True)], H, label=f"x.h = h^-1 x by {H.name}")


@dataclass
class StabilityCertificate:
    stable: bool
    # per generator: {K[H]-standard monomial: normal form of its coefficient mod J}
    reductions: list
    offending: str | None = None


def check_ideal_stable(J: Sequence[Poly], action: CoAction, degree_cap: int = DEFAULT_DEGREE_CAP) -> StabilityCertificate:
    """rho_H(J) in J (x) K[H]: write rho(j) over the standard monomials of the
    H-leg and reduce every coefficient modulo J + I_X."""
    alg = action.algebra
    Jgens = [g for g in J if not g.is_zero()]
    for g in Jgens:
        if total_degree(g) > degree_cap:
            raise DegreeOverflow(f"generator of degree {total_degree(g)} exceeds cap {degree_cap}")
    full = Ideal(alg.ring, list(alg.ideal.gens) + Jgens)
    full_c = full.extend(action.combined)
    GI = action.group_ideal
    reductions = []
    for j in Jgens:
        img = GI.reduce(action.apply(j))
        parts = coefficient_split(img, action.combined, action.leg_names)
        rec = {}
        for mono, coeff in sorted(parts.items()):
            r = full_c.reduce(coeff)
            rec[mono] = str(r)
            if not r.is_zero():
                reductions.append(rec)
                return StabilityCertificate(False, reductions, offending=str(j))
        reductions.append(rec)
    return StabilityCertificate(True, reductions)


def check_ideal_stable_points(J: Sequence[Poly], action: CoAction) -> bool:
    """Pointwise form: h(J) in J for the sample rational points h of H.
    Agrees with the co-action criterion when those points are dense in H."""
    alg = action.algebra
    Jgens = [g for g in J if not g.is_zero()]
    full = Ideal(alg.ring, list(alg.ideal.gens) + Jgens)
    for M in action.group.sample_points():
        for j in Jgens:
            if not full.contains(action.at_point(j, M)):
                return False
    return True


@dataclass
class InvariantBasis:
    """Invariants of degree <= deg, as polynomials and as coordinate vectors
    over the standard monomials of the algebra."""

    deg: int
    monomials: list
    vectors: list
    polys: list

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def only_constants(self) -> bool:
        if not self.vectors:
            return True
        const = tuple([0] * len(self.monomials[0]))
        k = self.monomials.index(const) if const in self.monomials else None
        if k is None or len(self.vectors) != 1:
            return False
        return all(c == 0 for i, c in enumerate(self.vectors[0]) if i != k)


def _invariance_matrix(action: CoAction, monos):
    CI = action.combined_ideal
    cols: dict = {}
    rows_by_mono = []
    R = action.algebra.ring
    for m in monos:
        f = R.monomial(m)
        diff = CI.reduce(action.apply(f) - action.lift(f))
        v = {}
        for mm, c in zip(diff.monoms(), diff.coeffs()):
            k = cols.setdefault(mm, len(cols))
            v[k] = c
        rows_by_mono.append(v)
    # kernel of the map monomial-coordinates -> images: columns = monomials
    system = [dict() for _ in range(len(cols))]
    for j, v in enumerate(rows_by_mono):
        for k, c in v.items():
            system[k][j] = c
    return system


def invariants_bounded(action: CoAction, deg: int, degree_cap: int = DEFAULT_DEGREE_CAP) -> InvariantBasis:
    """Kernel of rho_H - (. (x) 1) on the standard monomials of degree <= deg."""
    if deg > degree_cap:
        raise DegreeOverflow(f"degree {deg} exceeds cap {degree_cap}")
    alg = action.algebra
    monos = alg.standard_monomials(deg)
    system = _invariance_matrix(action, monos)
    ker = nullspace_sparse(system, len(monos)) if system else [
        [fmpq(int(i == j)) for i in range(len(monos))] for j in range(len(monos))
    ]
    ker = row_basis(ker, len(monos)) if ker else []
    R = alg.ring
    polys = []
    for v in ker:
        p = R.zero()
        for c, m in zip(v, monos):
            if c != 0:
                p += R.monomial(m, c)
        polys.append(p)
    return InvariantBasis(deg, monos, ker, polys)


def same_span(a: InvariantBasis, b: InvariantBasis) -> bool:
    if a.monomials != b.monomials:
        raise ValueError("invariant bases over different monomial sets")
    n = len(a.monomials)
    ra, rb = rank(a.vectors, n), rank(b.vectors, n)
    return ra == rb == rank(list(a.vectors) + list(b.vectors), n)


@dataclass
class ComparisonReport:
    equal: bool
    dims: dict
    deg: int


def intersection_invariants_equals_generated(G: GroupPresentation, subgroups: Sequence[GroupPresentation],
                                             H: GroupPresentation, deg: int,
                                             degree_cap: int = DEFAULT_DEGREE_CAP) -> ComparisonReport:
    """Intersection of K[G]^{H_i} equals K[G]^H (twisted action x.h = h^-1 x)."""
    bases = [invariants_bounded(twisted_translation(G, Hi), deg, degree_cap) for Hi in subgroups]
    target = invariants_bounded(twisted_translation(G, H), deg, degree_cap)
    n = len(target.monomials)
    inter = bases[0].vectors
    for b in bases[1:]:
        inter = intersect_spans(inter, b.vectors, n)
    inter_b = InvariantBasis(deg, target.monomials, inter, [])
    dims = {Hi.name: b.dim for Hi, b in zip(subgroups, bases)}
    dims["intersection"] = len(inter)
    dims[f"{H.name} (generated)"] = target.dim
    return ComparisonReport(same_span(inter_b, target), dims, deg)


def generated_subgroup(names: Sequence[str]) -> GroupPresentation:
    if len(names) == 1:
        return get_group(names[0])
    key = tuple(names)
    for pair, gen in GENERATION.items():
        if set(pair) == set(key):
            return get_group(gen)
    raise PreconditionFailed(f"no catalog generation fact for {names}")


def left_right_invariants_agree(G: GroupPresentation, N: GroupPresentation, deg: int,
                                degree_cap: int = DEFAULT_DEGREE_CAP) -> ComparisonReport:
    require_normal(N, G)
    a = invariants_bounded(right_translation(G, N), deg, degree_cap)
    b = invariants_bounded(twisted_translation(G, N), deg, degree_cap)
    return ComparisonReport(same_span(a, b), {"right": a.dim, "left": b.dim}, deg)


def left_right_stability_agree(G: GroupPresentation, N: GroupPresentation, J: Sequence[Poly]) -> bool:
    require_normal(N, G)
    return (check_ideal_stable(J, right_translation(G, N)).stable
            == check_ideal_stable(J, twisted_translation(G, N)).stable)


# (G, H, generators of J): right translation of K[G] by H
STABILITY_FIXTURES = (
    ("SL2", "Ga", ("t21",)),
    ("SL2", "Ga", ("t11 - 1",)),
    ("SL2", "Ga", ("t12",)),
    ("SL2", "Ga_lower", ("t12",)),
    ("SL2", "Gm_torus", ("t12",)),
    ("SL2", "Gm_torus", ("t11 - 1",)),
    ("Borel", "Ga", ("t11 - 2",)),
    ("Borel", "Gm_torus", ("t12",)),
    ("GmxGm", "Gm_first", ("t22 - 3",)),
    ("GmxGm", "Gm_second", ("t22 - 3",)),
)


def stability_criteria_agree(G_name: str, H_name: str, J_text: Sequence[str]) -> tuple[bool, bool]:
    """(co-action reduction verdict, pointwise verdict) for one fixture."""
    G, H = get_group(G_name), get_group(H_name)
    act = right_translation(G, H)
    R = act.algebra.ring
    J = [R.parse(j) for j in J_text]
    return check_ideal_stable(J, act).stable, check_ideal_stable_points(J, act)


def catalog_groups() -> list[GroupPresentation]:
    direct_product(GM, GM)
    return list(CATALOG.values())
