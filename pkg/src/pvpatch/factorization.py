"""Factorization A = A2^-1 A1 over the diamond.

Two stages:

1. Residue Birkhoff at t^0: A0 = Aminus * x^Lambda * Aplus with Aminus over
   Q[x^-1] (invertible there) and Aplus over the x-power series (invertible
   constant term). Computed by row reduction with Q[x^-1]-row operations.
2. t-adic absorption: keep B = M2 A M1^-1 = I + O(t^m), split the t^m error
   into x^{>=1} and x^{<=0} parts and push exp(t^m P) into M1, exp(-t^m U)
   into M2.

All factor entries are DiamondElem values, so side membership is carried by
provenance and can be audited afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .diamond import DiamondElem, FieldTag, audit
from .errors import PrecisionExhausted, SingularResidue, WindowExhausted
from .linalg import nullspace_dense
from .matrices import Mat, det
from .scalars import TruncatedSeries, XLaurent

DEFAULT_CAPS = (24, 48, 96)


# ---------------------------------------------------------------------------
# residue level
# ---------------------------------------------------------------------------


def _row_valuation(row) -> int | None:
    """Valuation of a row of XLaurent; None if all known coefficients vanish.

    Raises WindowExhausted if an entry whose coefficients are unknown could
    still carry the leading term.
    """
    known = [e.valuation() for e in row if not e.known_zero()]
    if not known:
        if all(e.is_zero() for e in row):
            return None
        raise WindowExhausted("row has no known nonzero coefficient in the window")
    v = min(known)
    for e in row:
        if e.known_zero() and not e.is_zero() and e.prec <= v:
            raise WindowExhausted("row valuation not certified within the window")
    return v


@dataclass(frozen=True)
class Residue:
    Aminus: Mat  # entries exact XLaurent with exponents <= 0
    Aminus_inv: Mat
    Lambda: tuple[int, ...]
    Aplus: Mat  # entries with x-order >= 0
    steps: int


def birkhoff_residue(A0, cap: int = 24, max_steps: int | None = None) -> Residue:
    """A0 = Aminus * diag(x^Lambda) * Aplus at the residue level.

    Row i of the working matrix W has valuation v_i and leading row L_i. While
    L is singular, take the canonical left-kernel vector c, let i0 be the row
    with c_i != 0 of smallest valuation (then lowest index) and replace row i0
    by sum_i c_i x^(v_i0 - v_i) row_i; every shift is <= 0, so this is a
    Q[x^-1] row operation with constant determinant c_i0.
    """
    A0 = A0 if isinstance(A0, Mat) else Mat(A0)
    n = A0.n
    d = det(A0.rows)
    if d.known_zero():
        raise SingularResidue("determinant of the residue matrix vanishes on the window")
    dval = d.valuation()
    W = [list(r) for r in A0.rows]
    one, zero = XLaurent.monomial(0), XLaurent.zero()
    Am = [[one if i == j else zero for j in range(n)] for i in range(n)]
    Ami = [[one if i == j else zero for j in range(n)] for i in range(n)]
    steps = 0
    limit = max_steps if max_steps is not None else 4 * n * (abs(dval) + cap + 4)
    while True:
        vals = []
        for r in W:
            v = _row_valuation(r)
            if v is None:
                raise SingularResidue("zero row in residue elimination")
            vals.append(v)
        L = [[r[j].coeff(v) for j in range(n)] for r, v in zip(W, vals)]
        ker = nullspace_dense([[L[i][j] for i in range(n)] for j in range(n)], n)
        if not ker:
            break
        if sum(vals) > dval or steps >= limit:
            raise WindowExhausted("residue elimination did not stabilize in the window")
        c = ker[0]
        support = [i for i in range(n) if c[i] != 0]
        i0 = min(support, key=lambda i: (vals[i], i))
        new = [zero] * n
        for i in support:
            shift = vals[i0] - vals[i]
            for j in range(n):
                new[j] = new[j] + W[i][j].shift(shift).scale(c[i])
        W[i0] = new
        # E: row i0 = sum c_i x^(v_i0 - v_i) e_i.  Aminus <- Aminus E^-1,
        # Aminus_inv <- E Aminus_inv.
        ci0 = c[i0]
        coeffs = {i: XLaurent.monomial(vals[i0] - vals[i], c[i]) for i in support}
        Ami[i0] = [
            _sum(zero, [coeffs[i] * Ami[i][j] for i in support]) for j in range(n)
        ]
        # E^-1 differs from I in column i0 only: e_i0 / c_i0 minus the rest.
        inv_col = {i0: XLaurent.monomial(0, 1 / ci0)}
        for i in support:
            if i != i0:
                inv_col[i] = coeffs[i].scale(-1 / ci0)
        for r in range(n):
            a = Am[r][i0]
            Am[r] = [
                (Am[r][j] if j != i0 else zero) + (a * inv_col[j] if j in inv_col else zero)
                for j in range(n)
            ]
        steps += 1
    Aplus = Mat([[e.shift(-v) for e in r] for r, v in zip(W, vals)])
    return Residue(Mat(Am), Mat(Ami), tuple(vals), Aplus, steps)


def _sum(zero, items):
    acc = zero
    for it in items:
        acc = acc + it
    return acc


def reassemble_residue(res: Residue) -> Mat:
    n = len(res.Lambda)
    zero = XLaurent.zero()
    mid = Mat([[XLaurent.monomial(res.Lambda[i]) if i == j else zero for j in range(n)] for i in range(n)])
    return res.Aminus @ mid @ res.Aplus


def inverse_laurent(M: Mat, cap: int) -> Mat:
    """Inverse via adjugate / det, det inverted to absolute precision cap."""
    d = det(M.rows)
    dinv = d.inverse(cap)
    return M.adjugate().map(lambda e: e * dinv)


# ---------------------------------------------------------------------------
# t-adic stage
# ---------------------------------------------------------------------------


@dataclass
class Factorization:
    A1: Mat  # DiamondElem entries, tag F1
    A2: Mat  # DiamondElem entries, tag F2
    A2_inv: Mat
    Lambda: tuple[int, ...]
    prec: int
    residual: int  # first t-order where A2^-1 A1 - A is not known to vanish
    x_verified: int | float  # x-precision up to which that check is exhaustive
    cap: int
    residue_steps: int = 0
    notes: list = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return self.residual >= self.prec

    def audit(self) -> bool:
        ok1 = all(e.tag <= FieldTag.F1 and audit(e) for _, _, e in self.A1.entries())
        ok2 = all(e.tag <= FieldTag.F2 and audit(e) for _, _, e in self.A2.entries())
        ok3 = all(e.tag <= FieldTag.F2 and audit(e) for _, _, e in self.A2_inv.entries())
        return ok1 and ok2 and ok3


def _as_mat(A) -> Mat:
    return A if isinstance(A, Mat) else Mat(A)


def _values(M: Mat) -> Mat:
    return M.map(lambda e: e.value if isinstance(e, DiamondElem) else e)


def _tshift(e: DiamondElem, m: int, prec: int) -> DiamondElem:
    return DiamondElem(e.value.shift_t(m).truncate_t(prec), e.tag, e.atoms, e.ops | {"mul"})


def _exp_t(P: Mat, m: int, prec: int, sign: int, one: DiamondElem) -> Mat:
    """exp(sign * t^m P) to t-precision prec."""
    n = P.n
    zero = one - one
    ident = Mat([[one if i == j else zero for j in range(n)] for i in range(n)])
    X = P.map(lambda e: _tshift(e * sign, m, prec))
    out = ident
    term = ident
    k = 1
    while k * m < prec:
        term = (term @ X).map(lambda e, k=k: e * Fraction(1, k))
        out = out + term
        k += 1
    return out


def _diag_x(exps, t_prec, window) -> Mat:
    n = len(exps)
    zero = DiamondElem.from_F(0, t_prec, window)
    return Mat([[DiamondElem.x_power(exps[i], t_prec, window) if i == j else zero for j in range(n)] for i in range(n)])


def _lift(M: Mat, kind: str, t_prec: int, window) -> Mat:
    def conv(e):
        s = TruncatedSeries.const(e, t_prec, window)
        if kind == "P":
            return DiamondElem.p_series(s)
        return DiamondElem.u_poly(s)

    return M.map(conv)


def _factorize_once(A: Mat, prec: int, window, cap: int) -> Factorization:
    n = A.n
    work = (window[0], cap)
    A = A.map(lambda e: e.truncate_t(prec).with_window(work))
    for _, _, e in A.entries():
        if e.i0 < 0 and any(not r.known_zero() for i, r in e.items() if i < 0):
            raise SingularResidue("entries with negative t-powers; rescale by a power of t first")
    A0 = A.map(lambda e: e.row(0))
    res = birkhoff_residue(A0, cap)
    lam = res.Lambda
    lam_p = [max(v, 0) for v in lam]
    lam_m = [min(v, 0) for v in lam]

    Aplus = _lift(res.Aplus, "P", prec, work)
    Aminus = _lift(res.Aminus, "U", prec, work)
    Aminus_inv = _lift(res.Aminus_inv, "U", prec, work)
    M1 = _diag_x(lam_p, prec, work) @ Aplus
    M2 = _diag_x([-v for v in lam_m], prec, work) @ Aminus_inv
    M2inv = Aminus @ _diag_x(lam_m, prec, work)

    aplus_inv = inverse_laurent(res.Aplus, cap).map(lambda e: TruncatedSeries.const(e, prec, work))
    xneg = Mat([[TruncatedSeries.const(XLaurent.monomial(-lam_p[i]), prec, work) if i == j
                 else TruncatedSeries.zero(prec, work) for j in range(n)] for i in range(n)])
    B = _values(M2) @ A @ aplus_inv @ xneg

    one = DiamondElem.from_F(1, prec, work)
    for m in range(1, prec):
        E = B.map(lambda e: e.row(m))
        parts = [[e.split() for e in r] for r in E.rows]
        if all(p.known_zero() and u.is_zero() for r in parts for p, u in r):
            continue
        # coefficient matrices of t^m; _exp_t multiplies the t^m back in
        Pd = Mat([[DiamondElem.p_series(TruncatedSeries.const(p, prec - m, work)) for p, _ in r] for r in parts])
        Ud = Mat([[DiamondElem.u_poly(TruncatedSeries.const(u, prec - m, work)) for _, u in r] for r in parts])
        eP = _exp_t(Pd, m, prec, 1, one)
        eUm = _exp_t(Ud, m, prec, -1, one)
        eUp = _exp_t(Ud, m, prec, 1, one)
        ePm = _exp_t(Pd, m, prec, -1, one)
        M1 = eP @ M1
        M2 = eUm @ M2
        M2inv = M2inv @ eUp
        B = _values(eUm) @ B @ _values(ePm)

    prod = _values(M2inv) @ _values(M1)
    residual = prec
    xver: float | int = float("inf")
    for i in range(n):
        for j in range(n):
            d = prod[i, j] - A[i, j]
            mm = d.first_mismatch(TruncatedSeries.zero(prec, work))
            if mm is not None:
                residual = min(residual, mm)
            xver = min(xver, prod[i, j].x_precision(), A[i, j].x_precision())
    return Factorization(M1, M2, M2inv, lam, prec, residual, xver, cap, res.steps)


def _factorize_over_F1(A: Mat, prec: int) -> Factorization:
    """A already lies over F1: A1 = A, A2 = I."""
    n = A.n
    vals = _values(A)
    if det(vals.rows).truncate_t(prec).known_zero():
        raise SingularResidue("matrix is not invertible to the requested t-precision")
    e0 = A[0, 0]
    if e0.value.t_prec < prec:
        raise PrecisionExhausted(f"requested t-precision {prec} exceeds input precision {e0.value.t_prec}")
    window = e0.value.x_window
    one, zero = DiamondElem.from_F(1, prec, window), DiamondElem.from_F(0, prec, window)
    ident = Mat([[one if i == j else zero for j in range(n)] for i in range(n)])
    fz = Factorization(A, ident, ident, tuple([0] * n), prec, prec, float("inf"), 0)
    fz.notes.append("input already over F1; A2 = I")
    return fz


def factorize(A, prec: int, x_window=None, caps=DEFAULT_CAPS) -> Factorization:
    """A = A2^-1 A1 mod t^prec with A1 over F1 and A2 over F2.

    The working expansion cap is raised through `caps` until the reassembly is
    exhaustively checked on x_window (x-precision above its upper end).
    """
    A = _as_mat(A)
    if all(isinstance(e, DiamondElem) and e.tag <= FieldTag.F1 for _, _, e in A.entries()):
        return _factorize_over_F1(A, prec)
    A = _values(A)
    for _, _, e in A.entries():
        if e.t_prec < prec:
            raise PrecisionExhausted(f"requested t-precision {prec} exceeds input precision {e.t_prec}")
    if x_window is None:
        x_window = A[0, 0].x_window
    x_window = tuple(x_window)
    last_err = None
    best = None
    for c in caps:
        cap = max(c, 2 * x_window[1] + 1)
        try:
            f = _factorize_once(A, prec, x_window, cap)
        except WindowExhausted as ex:
            last_err = ex
            continue
        if best is None or f.x_verified > best.x_verified:
            best = f
        if f.x_verified > x_window[1] or f.residual < prec:
            break
    if best is None:
        raise last_err
    if best.x_verified <= x_window[1]:
        best.notes.append(f"reassembly exhaustive only below x^{best.x_verified}")
    return best


def reassembly_residual(fz: Factorization, A) -> int:
    """Independent recheck: first t-order where A2^-1 A1 != A, else prec."""
    A = _values(_as_mat(A))
    prod = _values(fz.A2_inv) @ _values(fz.A1)
    worst = fz.prec
    for i in range(A.n):
        for j in range(A.n):
            d = (prod[i, j] - A[i, j]).truncate_t(fz.prec)
            for k, r in d.items():
                if not r.known_zero():
                    worst = min(worst, k)
                    break
    return worst


def random_laurent_matrix(rng, n: int, t_prec: int, x_window=(-6, 6), density: float = 0.5,
                          coeff_range: int = 3) -> Mat:
    """Random element of GL_n(F0) with exact Laurent-polynomial t-rows.

    Rows t^0 is built as a product of an x^-1-side and an x-side unimodular
    factor around a random monomial diagonal, so the residue is invertible;
    higher t-rows are arbitrary.
    """
    lo, hi = x_window
    span = max(1, min(2, hi))

    def rand_poly(lo_e, hi_e):
        terms = {}
        for e in range(lo_e, hi_e + 1):
            if rng.random() < density:
                c = rng.randint(-coeff_range, coeff_range)
                if c:
                    terms[e] = c
        return XLaurent.from_terms(terms)

    def unitriangular(lo_e, hi_e, upper):
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                if i == j:
                    row.append(XLaurent.monomial(0, rng.choice([1, -1, 2])))
                elif (j > i) == upper:
                    row.append(rand_poly(lo_e, hi_e))
                else:
                    row.append(XLaurent.zero())
            rows.append(row)
        return Mat(rows)

    Um = unitriangular(-span, 0, True) @ unitriangular(-span, 0, False)
    Up = unitriangular(0, span, False) @ unitriangular(0, span, True)
    lam = [rng.randint(-1, 1) for _ in range(n)]
    mid = Mat([[XLaurent.monomial(lam[i]) if i == j else XLaurent.zero() for j in range(n)] for i in range(n)])
    R0 = Um @ mid @ Up
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            rows = {0: R0[i, j]}
            for k in range(1, t_prec):
                rows[k] = rand_poly(lo, hi) if rng.random() < density else XLaurent.zero()
            row.append(TruncatedSeries.from_rows(rows, t_prec, x_window))
        out.append(row)
    return Mat(out)
