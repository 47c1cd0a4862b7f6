"""Exact dense linear algebra over Q.

Elimination is fraction-free: rows are scaled to integers and reduced with a
Bareiss-style Gauss-Jordan sweep in which every division is exact, and the
result is normalised to Fractions once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

from .core import as_rational
from .errors import DimensionMismatch

__all__ = [
    "RationalMatrix",
    "Subspace",
    "rref",
    "rank",
    "nullspace",
    "project",
    "subspace_equal",
    "subspace_contains",
    "solve_affine",
]


class RationalMatrix:
    """Dense matrix of Fractions with optional row and column labels."""

    __slots__ = ("rows", "cols", "entries", "row_labels", "col_labels")

    def __init__(self, entries: Sequence[Sequence], cols: int | None = None,
                 row_labels: Sequence[Hashable] | None = None,
                 col_labels: Sequence[Hashable] | None = None):
        data = [[as_rational(x) for x in row] for row in entries]
        if cols is None:
            if not data:
                raise ValueError("column count required for a matrix with no rows")
            cols = len(data[0])
        if any(len(row) != cols for row in data):
            raise DimensionMismatch("ragged matrix rows")
        self.rows = len(data)
        self.cols = cols
        self.entries = data
        self.row_labels = _check_labels(row_labels, self.rows, "row")
        self.col_labels = _check_labels(col_labels, cols, "column")

    @classmethod
    def zeros(cls, rows: int, cols: int, **labels) -> "RationalMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols, **labels)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows, row_labels=self.col_labels, col_labels=self.row_labels,
        )

    def select_columns(self, indices: Sequence[int]) -> "RationalMatrix":
        labels = None if self.col_labels is None else [self.col_labels[c] for c in indices]
        return RationalMatrix(
            [[row[c] for c in indices] for row in self.entries],
            cols=len(indices), row_labels=self.row_labels, col_labels=labels,
        )

    def apply(self, v: Sequence) -> list[Fraction]:
        if len(v) != self.cols:
            raise DimensionMismatch(f"vector of length {len(v)} for {self.cols} columns")
        return [sum((a * b for a, b in zip(row, v) if a and b), Fraction(0)) for row in self.entries]

    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self.entries)
        return f"RationalMatrix({self.rows}x{self.cols}: [{body}])"


def _check_labels(labels, count, what):
    if labels is None:
        return None
    labels = list(labels)
    if len(labels) != count:
        raise DimensionMismatch(f"{len(labels)} {what} labels for {count} {what}s")
    if len(set(labels)) != len(labels):
        raise ValueError(f"{what} labels must be unique")
    return labels


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    out = []
    for row in rows:
        den = 1
        for x in row:
            if x.denominator != 1:
                den = math.lcm(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def _fraction_free_rref(rows: list[list[int]], ncols: int, stop: int | None = None):
    """In-place fraction-free Gauss-Jordan on integer rows.

    Returns ``(rows, pivots)`` with every pivot entry equal to the last pivot
    value and zeros elsewhere in pivot columns.  Pivot search only scans the
    first ``stop`` columns (all by default).
    """
    nrows = len(rows)
    stop = ncols if stop is None else stop
    prev = 1
    r = 0
    pivots: list[int] = []
    for c in range(stop):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        p = prow[c]
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            a = row[c]
            if a == 0:
                if p != prev:
                    rows[i] = [(p * x) // prev for x in row]
                continue
            rows[i] = [(p * x - a * y) // prev for x, y in zip(row, prow)]
        prev = p
        pivots.append(c)
        r += 1
    return rows, pivots


def _normalised(rows: list[list[int]], pivots: list[int]) -> list[list[Fraction]]:
    out = []
    for i, c in enumerate(pivots):
        p = rows[i][c]
        out.append([Fraction(x, p) for x in rows[i]])
    return out


def rref(M: RationalMatrix) -> tuple[RationalMatrix, list[int]]:
    """Reduced row echelon form and the strictly increasing pivot columns."""
    ints, pivots = _fraction_free_rref(_integer_rows(M.entries), M.cols)
    reduced = _normalised(ints, pivots)
    reduced.extend([Fraction(0)] * M.cols for _ in range(M.rows - len(pivots)))
    return RationalMatrix(reduced, cols=M.cols, col_labels=M.col_labels), pivots


def rank(M: RationalMatrix) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    return len(_fraction_free_rref(_integer_rows(M.entries), M.cols)[1])


@dataclass(frozen=True)
class Subspace:
    """Subspace of ``Q^ambient`` stored by its canonical reduced echelon basis.

    Equal subspaces have identical ``basis`` tuples regardless of the
    generating set they were built from.
    """

    ambient: int
    basis: tuple[tuple[Fraction, ...], ...]
    pivots: tuple[int, ...] = field(default=())

    @classmethod
    def span(cls, vectors: Sequence[Sequence], ambient: int) -> "Subspace":
        vecs = [[as_rational(x) for x in v] for v in vectors]
        if any(len(v) != ambient for v in vecs):
            raise DimensionMismatch(f"vectors must have length {ambient}")
        if not vecs or ambient == 0:
            return cls(ambient, (), ())
        ints, pivots = _fraction_free_rref(_integer_rows(vecs), ambient)
        basis = tuple(tuple(row) for row in _normalised(ints, pivots))
        return cls(ambient, basis, tuple(pivots))

    @classmethod
    def whole(cls, ambient: int) -> "Subspace":
        return cls.span(RationalMatrix.identity(ambient).entries, ambient) if ambient else cls(0, (), ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, v: Sequence) -> list[Fraction]:
        """Residue of ``v`` after eliminating the pivot coordinates of this basis."""
        w = [as_rational(x) for x in v]
        if len(w) != self.ambient:
            raise DimensionMismatch("vector length differs from ambient dimension")
        for row, c in zip(self.basis, self.pivots):
            t = w[c]
            if t:
                w = [x - t * y for x, y in zip(w, row)]
        return w

    def __contains__(self, v) -> bool:
        return not any(self.reduce(v))


def nullspace(M: RationalMatrix) -> Subspace:
    """Right kernel ``{v : M v = 0}``."""
    if M.rows == 0:
        return Subspace.whole(M.cols)
    R, pivots = rref(M)
    pivset = set(pivots)
    vecs = []
    for f in range(M.cols):
        if f in pivset:
            continue
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -R.entries[i][f]
        vecs.append(v)
    return Subspace.span(vecs, M.cols)


def project(S: Subspace, coords: Sequence[int]) -> Subspace:
    """Image of ``S`` under the coordinate projection onto ``coords`` (kept in the given order)."""
    coords = list(coords)
    if any(not 0 <= c < S.ambient for c in coords):
        raise DimensionMismatch("projection coordinate out of range")
    return Subspace.span([[v[c] for c in coords] for v in S.basis], len(coords))


def subspace_equal(S1: Subspace, S2: Subspace) -> bool:
    if S1.ambient != S2.ambient:
        raise DimensionMismatch(f"ambient dimensions {S1.ambient} and {S2.ambient}")
    return S1.basis == S2.basis


def subspace_contains(big: Subspace, small: Subspace) -> bool:
    """``small`` is a subspace of ``big``."""
    if big.ambient != small.ambient:
        raise DimensionMismatch(f"ambient dimensions {big.ambient} and {small.ambient}")
    return all(v in big for v in small.basis)


def solve_affine(M: RationalMatrix, rhs: Sequence) -> list[Fraction] | None:
    """Canonical solution of ``M w = rhs`` (free coordinates zero), or ``None`` if inconsistent."""
    b = [as_rational(x) for x in rhs]
    if len(b) != M.rows:
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {M.rows} rows")
    if M.rows == 0:
        return [Fraction(0)] * M.cols
    aug = [list(row) + [x] for row, x in zip(M.entries, b)]
    ints, pivots = _fraction_free_rref(_integer_rows(aug), M.cols + 1, stop=M.cols)
    r = len(pivots)
    if any(ints[i][M.cols] for i in range(r, M.rows)):
        return None
    w = [Fraction(0)] * M.cols
    for i, c in enumerate(pivots):
        w[c] = Fraction(ints[i][M.cols], ints[i][c])
    return w
