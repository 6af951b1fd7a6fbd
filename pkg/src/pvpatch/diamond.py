"""The formal diamond F = k((t))(x) inside F1 = Frac k[[x,t]], F2 = Frac k[x^-1][[t]],
both inside F0 = k((x))((t)).

Membership is tracked by provenance: every DiamondElem records which atoms it
was built from, and the tag is the join of the atoms' fields. Atom kinds:

    "F"        elements of F (expansions of BiRatFunc, powers of x)
    "P-series" x-power-series parts (x-exponents >= 0), e.g. positive parts
               produced by split_additive or the residue factor Aplus
    "logP", "expP"                       P-side special elements
    "U-poly"   polynomials in x^-1 (x-exponents <= 0), e.g. nonpositive parts
    "logU", "expU"                       U-side special elements
    "F0-data"  raw overfield input
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import IllegalCoercion, InsufficientPrecision, NoReconstruction, NotInF
from .scalars import (
    DEFAULT_X_WINDOW,
    BiRatFunc,
    TruncatedSeries,
    XLaurent,
    rational_reconstruct,
)


class FieldTag(enum.Enum):
    F = "F"
    F1 = "F1"
    F2 = "F2"
    F0 = "F0"

    def __le__(self, other: "FieldTag") -> bool:
        return other in _ABOVE[self]

    def __lt__(self, other: "FieldTag") -> bool:
        return self != other and self <= other

    def join(self, other: "FieldTag") -> "FieldTag":
        if self <= other:
            return other
        if other <= self:
            return self
        return FieldTag.F0


_ABOVE = {
    FieldTag.F: {FieldTag.F, FieldTag.F1, FieldTag.F2, FieldTag.F0},
    FieldTag.F1: {FieldTag.F1, FieldTag.F0},
    FieldTag.F2: {FieldTag.F2, FieldTag.F0},
    FieldTag.F0: {FieldTag.F0},
}

ATOM_FIELD = {
    "F": FieldTag.F,
    "P-series": FieldTag.F1,
    "logP": FieldTag.F1,
    "expP": FieldTag.F1,
    "U-poly": FieldTag.F2,
    "logU": FieldTag.F2,
    "expU": FieldTag.F2,
    "F0-data": FieldTag.F0,
}

ALLOWED_ATOMS = {
    tag: frozenset(a for a, f in ATOM_FIELD.items() if f <= tag) for tag in FieldTag
}


def tag_of_atoms(atoms) -> FieldTag:
    tag = FieldTag.F
    for a in atoms:
        tag = tag.join(ATOM_FIELD[a])
    return tag


class DiamondElem:
    """A series value together with its field tag and construction trace."""

    __slots__ = ("value", "tag", "atoms", "ops")

    def __init__(self, value: TruncatedSeries, tag: FieldTag, atoms=frozenset(), ops=frozenset()):
        self.value = value
        self.tag = tag
        self.atoms = frozenset(atoms)
        self.ops = frozenset(ops)

    # constructors -------------------------------------------------------------
    @staticmethod
    def from_F(f, t_prec: int, x_window=DEFAULT_X_WINDOW) -> "DiamondElem":
        if not isinstance(f, BiRatFunc):
            f = BiRatFunc.const(f)
        return DiamondElem(f.expand(t_prec, x_window), FieldTag.F, {"F"})

    @staticmethod
    def x_power(k: int, t_prec: int, x_window=DEFAULT_X_WINDOW) -> "DiamondElem":
        return DiamondElem(TruncatedSeries.const(XLaurent.monomial(k), t_prec, x_window), FieldTag.F, {"F"})

    @staticmethod
    def p_series(s: TruncatedSeries) -> "DiamondElem":
        for _, r in s.items():
            if not r.known_zero() and r.lo < 0:
                raise IllegalCoercion("P-series atom must have x-exponents >= 0")
        return DiamondElem(s, FieldTag.F1, {"P-series"})

    @staticmethod
    def u_poly(s: TruncatedSeries) -> "DiamondElem":
        for _, r in s.items():
            if not r.exact:
                raise IllegalCoercion("U-poly atom must be an exact polynomial in x^-1 per t-row")
            m = r.max_exponent()
            if m is not None and m > 0:
                raise IllegalCoercion("U-poly atom must have x-exponents <= 0")
        return DiamondElem(s, FieldTag.F2, {"U-poly"})

    @staticmethod
    def data(s: TruncatedSeries) -> "DiamondElem":
        return DiamondElem(s, FieldTag.F0, {"F0-data"})

    @staticmethod
    def special(kind: str, t_prec: int, x_window=DEFAULT_X_WINDOW) -> "DiamondElem":
        return DiamondElem(special_series(kind, t_prec, x_window), ATOM_FIELD[kind], {kind})

    # arithmetic ---------------------------------------------------------------
    def _combine(self, other, value, op):
        if not isinstance(other, DiamondElem):
            return DiamondElem(value, self.tag, self.atoms, self.ops | {op})
        return DiamondElem(
            value, self.tag.join(other.tag), self.atoms | other.atoms, self.ops | other.ops | {op}
        )

    def _val(self, other):
        return other.value if isinstance(other, DiamondElem) else other

    def __add__(self, other):
        return self._combine(other, self.value + self._val(other), "add")

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, self.value - self._val(other), "add")

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return DiamondElem(-self.value, self.tag, self.atoms, self.ops | {"neg"})

    def __mul__(self, other):
        return self._combine(other, self.value * self._val(other), "mul")

    __rmul__ = __mul__

    def inverse(self) -> "DiamondElem":
        return DiamondElem(self.value.inverse(), self.tag, self.atoms, self.ops | {"inv"})

    def derive(self) -> "DiamondElem":
        # d/dx preserves each atom class: d(P-series) is a P-series, d(U-poly)
        # a U-poly, dlogP, dlogU lie in F and the exponentials reproduce
        # themselves up to a factor in F.
        atoms = set(self.atoms)
        for a, img in (("logP", "F"), ("logU", "F")):
            if a in atoms:
                atoms.discard(a)
                atoms.add(img)
        return DiamondElem(self.value.derive(), tag_of_atoms(atoms) if atoms else self.tag, atoms, self.ops | {"derive"})

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def one_like(self) -> "DiamondElem":
        return DiamondElem(TruncatedSeries.const(1, self.value.t_prec, self.value.x_window), FieldTag.F, {"F"})

    def retag(self, tag: FieldTag) -> "DiamondElem":
        return embed(self, tag)

    def audit(self) -> bool:
        return audit(self)

    def __repr__(self):
        return f"DiamondElem[{self.tag.value}]({self.value!r})"


def embed(f: DiamondElem, target: FieldTag) -> DiamondElem:
    if not f.tag <= target:
        raise IllegalCoercion(f"cannot coerce {f.tag.value} into {target.value}")
    return DiamondElem(f.value, target, f.atoms, f.ops | {"embed"})


def audit(f: DiamondElem) -> bool:
    """Provenance audit: the recorded atoms all belong to the tagged field."""
    return f.atoms <= ALLOWED_ATOMS[f.tag]


# ---------------------------------------------------------------------------
# special elements
# ---------------------------------------------------------------------------

SPECIAL_KINDS = ("logP", "logU", "expP", "expU")


def special_series(kind: str, t_prec: int, x_window=DEFAULT_X_WINDOW) -> TruncatedSeries:
    terms = {}
    for i in range(t_prec):
        if kind == "logP" and i >= 1:
            terms[(i, i)] = Fraction(1, i)
        elif kind == "logU" and i >= 1:
            terms[(i, -i)] = Fraction(1, i)
        elif kind == "expP":
            terms[(i, i)] = Fraction(1, math.factorial(i))
        elif kind == "expU":
            terms[(i, -i)] = Fraction(1, math.factorial(i))
    if kind not in SPECIAL_KINDS:
        raise ValueError(kind)
    return TruncatedSeries.from_terms(terms, t_prec, x_window)


@dataclass(frozen=True)
class SpecialElement:
    """A special atom with its closed-form derivative.

    For the logarithms the derivative lies in F; for expP it is t * expP and
    for expU it is -t/x^2 * expU, recorded as the factor with
    `self_multiple=True`.
    """

    kind: str
    derivative: BiRatFunc
    self_multiple: bool = False

    def series(self, t_prec: int, x_window=DEFAULT_X_WINDOW) -> TruncatedSeries:
        return special_series(self.kind, t_prec, x_window)

    def derivative_series(self, t_prec: int, x_window=DEFAULT_X_WINDOW) -> TruncatedSeries:
        d = self.derivative.expand(t_prec, x_window)
        if self.self_multiple:
            return d * self.series(t_prec, x_window)
        return d

    def check(self, t_prec: int, x_window=DEFAULT_X_WINDOW) -> bool:
        """derive(series) == closed-form derivative, termwise to t_prec."""
        return self.series(t_prec, x_window).derive().matches(self.derivative_series(t_prec, x_window))


def _specials():
    x, t = BiRatFunc.x(), BiRatFunc.t()
    return {
        "logP": SpecialElement("logP", t / (1 - t * x)),
        "logU": SpecialElement("logU", -t / (x * x - t * x)),
        "expP": SpecialElement("expP", t, self_multiple=True),
        "expU": SpecialElement("expU", -t / (x * x), self_multiple=True),
    }


SPECIALS = _specials()


# ---------------------------------------------------------------------------
# splitting and intersection
# ---------------------------------------------------------------------------


def split_additive(e: TruncatedSeries) -> tuple[TruncatedSeries, TruncatedSeries]:
    """x-exponents >= 1 to the P-part, <= 0 to the U-part, row by row."""
    return e.split()


def split_tagged(e) -> tuple[DiamondElem, DiamondElem]:
    value = e.value if isinstance(e, DiamondElem) else e
    p, u = split_additive(value)
    ops = (e.ops if isinstance(e, DiamondElem) else frozenset()) | {"split"}
    return (
        DiamondElem(p, FieldTag.F1, {"P-series"}, ops),
        DiamondElem(u, FieldTag.F2, {"U-poly"}, ops),
    )


@dataclass(frozen=True)
class FMembership:
    value: BiRatFunc
    mode: str
    bounds: tuple[int, int, int, int]


def intersect_to_F(e: TruncatedSeries, bounds=(8, 8, 8, 8), mode: str = "auto") -> FMembership:
    """Certify that e lies in F = k((t))(x) by reconstruction.

    mode "exact" looks for an element of Q(x, t); "field" allows numerator
    t-coefficients that are only known to the series precision; "auto" tries
    exact first. Failure means "not in F up to bounds", nothing stronger.
    """
    modes = ("exact", "field") if mode == "auto" else (mode,)
    last = None
    for m in modes:
        try:
            return FMembership(rational_reconstruct(e, bounds, m), m, tuple(bounds))
        except (NoReconstruction, InsufficientPrecision) as ex:
            last = ex
    raise NotInF(f"not in F up to bounds {tuple(bounds)}: {last}")
