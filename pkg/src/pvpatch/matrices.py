"""Small dense matrices over any commutative ring with +, -, *."""

from __future__ import annotations

from typing import Callable, Iterable, Sequence


class Mat:
    """Immutable n x m matrix; entries are ring elements."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        self.rows = tuple(tuple(r) for r in rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def m(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entries(self):
        for i, r in enumerate(self.rows):
            for j, v in enumerate(r):
                yield i, j, v

    def map(self, f: Callable) -> "Mat":
        return Mat([[f(v) for v in r] for r in self.rows])

    def __add__(self, other: "Mat") -> "Mat":
        return Mat([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other: "Mat") -> "Mat":
        return Mat([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self) -> "Mat":
        return self.map(lambda v: -v)

    def scale(self, c) -> "Mat":
        return self.map(lambda v: v * c)

    def __matmul__(self, other: "Mat") -> "Mat":
        out = []
        cols = list(zip(*other.rows))
        for r in self.rows:
            row = []
            for c in cols:
                acc = None
                for a, b in zip(r, c):
                    if _is_zero(a) or _is_zero(b):
                        continue
                    p = a * b
                    acc = p if acc is None else acc + p
                row.append(acc if acc is not None else _zero_like(r, c))
            out.append(row)
        return Mat(out)

    def transpose(self) -> "Mat":
        return Mat(zip(*self.rows))

    def det(self):
        return det(self.rows)

    def adjugate(self) -> "Mat":
        n = self.n
        if n == 1:
            return Mat([[_one_like(self.rows[0][0])]])
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [[self.rows[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
                d = det(minor)
                out[j][i] = d if (i + j) % 2 == 0 else -d
        return Mat(out)

    def trace(self):
        acc = self.rows[0][0]
        for i in range(1, self.n):
            acc = acc + self.rows[i][i]
        return acc

    def __repr__(self):
        return "Mat(" + repr([list(r) for r in self.rows]) + ")"


def _is_zero(v) -> bool:
    z = getattr(v, "is_zero", None)
    if z is not None:
        return z()
    return v == 0


def _zero_like(r, c):
    a = r[0]
    return a - a


def _one_like(a):
    one = getattr(a, "one_like", None)
    if one is not None:
        return one()
    return 1


def det(rows: Sequence[Sequence]):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    acc = None
    for j in range(n):
        a = rows[0][j]
        if _is_zero(a):
            continue
        minor = [[rows[r][c] for c in range(n) if c != j] for r in range(1, n)]
        term = a * det(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    if acc is None:
        a = rows[0][0]
        return a - a
    return acc


def identity(n: int, one, zero) -> Mat:
    return Mat([[one if i == j else zero for j in range(n)] for i in range(n)])


def diag(values: Sequence, zero) -> Mat:
    n = len(values)
    return Mat([[values[i] if i == j else zero for j in range(n)] for i in range(n)])
