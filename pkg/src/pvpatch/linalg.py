"""Exact linear algebra over Q (dense kernels via flint)."""

from __future__ import annotations

from typing import Sequence

import flint

fmpq = flint.fmpq


def rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[fmpq]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    if not rows or ncols == 0:
        return [], []
    m = flint.fmpq_mat(len(rows), ncols, [fmpq(c) if not isinstance(c, fmpq) else c for r in rows for c in r])
    r, rank = m.rref()
    out = []
    pivots = []
    for i in range(rank):
        row = [r[i, j] for j in range(ncols)]
        out.append(row)
        pivots.append(next(j for j, c in enumerate(row) if c != 0))
    return out, pivots


def _dense(rows: Sequence[dict], ncols: int) -> list[list[fmpq]]:
    zero = fmpq(0)
    out = []
    for r in rows:
        row = [zero] * ncols
        for j, c in r.items():
            row[j] = c
        out.append(row)
    return out


def nullspace_dense(rows: Sequence[Sequence], ncols: int) -> list[list[fmpq]]:
    """Canonical kernel basis: one vector per free column of the RREF, with a
    1 in that column."""
    if ncols == 0:
        return []
    red, pivots = rref(rows, ncols) if rows else ([], [])
    piv = set(pivots)
    basis = []
    for f in range(ncols):
        if f in piv:
            continue
        v = [fmpq(0)] * ncols
        v[f] = fmpq(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def nullspace_sparse(rows: Sequence[dict], ncols: int) -> list[list[fmpq]]:
    return nullspace_dense(_dense(rows, ncols), ncols)


def rank(rows: Sequence[Sequence], ncols: int) -> int:
    if not rows or ncols == 0:
        return 0
    m = flint.fmpq_mat(len(rows), ncols, [fmpq(c) if not isinstance(c, fmpq) else c for r in rows for c in r])
    return m.rank()


def span_contains(basis_rows: Sequence[Sequence], v: Sequence, ncols: int) -> bool:
    return rank(list(basis_rows) + [v], ncols) == rank(basis_rows, ncols)


def row_basis(rows: Sequence[Sequence], ncols: int) -> list[list[fmpq]]:
    red, _ = rref(rows, ncols)
    return red


def intersect_spans(a: Sequence[Sequence], b: Sequence[Sequence], ncols: int) -> list[list[fmpq]]:
    """Row basis of span(a) ∩ span(b)."""
    if not a or not b:
        return []
    # solve sum x_i a_i - sum y_j b_j = 0
    a = row_basis(a, ncols)
    b = row_basis(b, ncols)
    cols = len(a) + len(b)
    sys = [[a[i][k] for i in range(len(a))] + [-b[j][k] for j in range(len(b))] for k in range(ncols)]
    ker = nullspace_dense(sys, cols)
    vecs = []
    for z in ker:
        v = [sum((z[i] * a[i][k] for i in range(len(a))), fmpq(0)) for k in range(ncols)]
        vecs.append(v)
    return row_basis(vecs, ncols) if vecs else []
