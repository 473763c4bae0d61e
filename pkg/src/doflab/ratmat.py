"""
Exact dense linear algebra over the rationals.

Entries are ``gmpy2.mpq`` (exported as ``Q``; always in lowest terms with a
positive denominator).  ``mpq`` compares and hashes like ``fractions.Q``
and both are accepted on input.  Ranks are computed by fraction-free (Bareiss) elimination on
row-wise integer rescalings of the matrix, so no intermediate rational
arithmetic is needed for the hot path.

Indices in this module are 0-based.  Zero-row and zero-column matrices are
legal everywhere and have rank 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from gmpy2 import mpq as Q

__all__ = [
    "DimensionError",
    "Q",
    "RationalMatrix",
    "RowBasis",
    "as_rational",
    "hconcat",
    "vconcat",
    "rank",
    "row_submatrix",
    "rowspan_contains",
    "left_nullspace_basis",
    "proj_dim",
    "integer_rows",
]


class DimensionError(ValueError):
    """Raised when matrix shapes are incompatible."""


_QTYPE = type(Q(0))


def as_rational(x) -> Q:
    if type(x) is _QTYPE:
        return x
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Q(x.numerator, x.denominator)
    return Q(x)


@dataclass(frozen=True)
class RationalMatrix:
    """Immutable dense matrix of rationals stored as a tuple of row tuples."""

    nrows: int
    ncols: int
    data: tuple[tuple[Q, ...], ...]

    def __post_init__(self):
        if self.nrows < 0 or self.ncols < 0:
            raise DimensionError("negative dimension")
        if len(self.data) != self.nrows:
            raise DimensionError(f"expected {self.nrows} rows, got {len(self.data)}")
        for row in self.data:
            if len(row) != self.ncols:
                raise DimensionError(f"row of length {len(row)} in a matrix with {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], ncols: int | None = None) -> "RationalMatrix":
        data = tuple(tuple(as_rational(x) for x in row) for row in rows)
        if ncols is None:
            if not data:
                raise DimensionError("ncols is required for a matrix with no rows")
            ncols = len(data[0])
        return cls(len(data), ncols, data)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        zero = Q(0)
        return cls(nrows, ncols, tuple((zero,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.from_rows(([1 if i == j else 0 for j in range(n)] for i in range(n)), ncols=n)

    @classmethod
    def diagonal(cls, values: Sequence) -> "RationalMatrix":
        n = len(values)
        zero = Q(0)
        return cls(n, n, tuple(
            tuple(as_rational(values[i]) if i == j else zero for j in range(n)) for i in range(n)
        ))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def entries(self) -> tuple[Q, ...]:
        """Row-major flat view of the entries."""
        return tuple(x for row in self.data for x in row)

    def row(self, i: int) -> tuple[Q, ...]:
        return self.data[i]

    def __getitem__(self, ij: tuple[int, int]) -> Q:
        i, j = ij
        return self.data[i][j]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.ncols, self.nrows, tuple(zip(*self.data)) if self.nrows else
                              tuple(() for _ in range(self.ncols)))

    def scale_rows(self, factors: Sequence[Q]) -> "RationalMatrix":
        """Left-multiply by ``diag(factors)`` without forming the diagonal matrix."""
        if len(factors) != self.nrows:
            raise DimensionError(f"{len(factors)} row factors for {self.nrows} rows")
        return RationalMatrix(self.nrows, self.ncols, tuple(
            tuple(f * x for x in row) for f, row in zip(factors, self.data)
        ))

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.data)) if other.nrows else [() for _ in range(other.ncols)]
        zero = Q(0)
        out = []
        for row in self.data:
            nz = [(k, a) for k, a in enumerate(row) if a]
            out.append(tuple(sum((a * col[k] for k, a in nz), zero) for col in cols))
        return RationalMatrix(self.nrows, other.ncols, tuple(out))

    def is_zero(self) -> bool:
        return not any(x for row in self.data for x in row)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self.data)
        return f"RationalMatrix({self.nrows}x{self.ncols}: [{body}])"


def hconcat(blocks: Sequence[RationalMatrix]) -> RationalMatrix:
    """Column-wise concatenation ``[B1 B2 ...]``; all blocks need the same row count."""
    if not blocks:
        raise DimensionError("hconcat of no blocks has undefined row count")
    nrows = blocks[0].nrows
    for b in blocks:
        if b.nrows != nrows:
            raise DimensionError(f"hconcat row mismatch: {b.nrows} != {nrows}")
    data = tuple(sum((b.data[i] for b in blocks), ()) for i in range(nrows))
    return RationalMatrix(nrows, sum(b.ncols for b in blocks), data)


def vconcat(blocks: Sequence[RationalMatrix]) -> RationalMatrix:
    if not blocks:
        raise DimensionError("vconcat of no blocks has undefined column count")
    ncols = blocks[0].ncols
    for b in blocks:
        if b.ncols != ncols:
            raise DimensionError(f"vconcat column mismatch: {b.ncols} != {ncols}")
    data = tuple(row for b in blocks for row in b.data)
    return RationalMatrix(len(data), ncols, data)


def row_submatrix(M: RationalMatrix, indices: Iterable[int]) -> RationalMatrix:
    """Rows of ``M`` at ``indices`` (0-based), taken in ascending order."""
    idx = sorted(set(indices))
    for i in idx:
        if not 0 <= i < M.nrows:
            raise IndexError(f"row index {i} out of range for {M.nrows} rows")
    return RationalMatrix(len(idx), M.ncols, tuple(M.data[i] for i in idx))


def _integer_row(row: Sequence[Q]) -> list[int]:
    den = 1
    for x in row:
        if x.denominator != 1:
            den = math.lcm(den, x.denominator)
    if den == 1:
        return [x.numerator for x in row]
    return [x.numerator * (den // x.denominator) for x in row]


def integer_rows(M: RationalMatrix) -> list[list[int]]:
    """Each row scaled by the lcm of its denominators (a rank-preserving map to Z)."""
    return [_integer_row(row) for row in M.data]


def _bareiss_rank(A: list[list[int]], ncols: int) -> int:
    # Fraction-free elimination; every division below is exact because each
    # entry is a minor of the input.  Mutates A.
    m = len(A)
    r = 0
    prev = 1
    for c in range(ncols):
        if r == m:
            break
        piv = None
        for i in range(r, m):
            if A[i][c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            A[r], A[piv] = A[piv], A[r]
        prow = A[r]
        p = prow[c]
        for i in range(r + 1, m):
            row = A[i]
            a = row[c]
            if a:
                for j in range(c + 1, ncols):
                    row[j] = (p * row[j] - a * prow[j]) // prev
            else:
                for j in range(c + 1, ncols):
                    row[j] = (p * row[j]) // prev
            row[c] = 0
        prev = p
        r += 1
    return r


def rank(M: RationalMatrix) -> int:
    """Exact rank over Q."""
    if M.nrows == 0 or M.ncols == 0:
        return 0
    # eliminate along the shorter side
    if M.ncols > M.nrows:
        M = M.transpose()
    return _bareiss_rank(integer_rows(M), M.ncols)


class RowBasis:
    """Incrementally grown row-echelon basis over Q, kept as primitive integer rows.

    Useful for prefix ranks (``add`` reports whether the rank grew) and for
    repeated row-span membership queries against a fixed set of rows.
    """

    __slots__ = ("ncols", "_rows")

    def __init__(self, ncols: int, rows: Iterable[Sequence] = ()):
        self.ncols = ncols
        self._rows: list[tuple[int, list[int]]] = []
        for row in rows:
            self.add(row)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def copy(self) -> "RowBasis":
        out = RowBasis(self.ncols)
        out._rows = list(self._rows)
        return out

    def _reduce(self, row: Sequence) -> list[int]:
        if len(row) != self.ncols:
            raise DimensionError(f"row of length {len(row)} against a basis of width {self.ncols}")
        v = _integer_row([as_rational(x) for x in row])
        for pc, b in self._rows:
            a = v[pc]
            if a:
                bp = b[pc]
                v = [bp * x - a * y for x, y in zip(v, b)]
                g = math.gcd(*v)
                if g > 1:
                    v = [x // g for x in v]
        return v

    def contains(self, row: Sequence) -> bool:
        return not any(self._reduce(row))

    def add(self, row: Sequence) -> bool:
        """Insert ``row``; return True iff it was not already in the span."""
        v = self._reduce(row)
        for pc, x in enumerate(v):
            if x:
                if x < 0:
                    v = [-y for y in v]
                self._rows.append((pc, v))
                return True
        return False


def rowspan_contains(M: RationalMatrix, v: Sequence) -> bool:
    """True iff ``v`` is a rational combination of the rows of ``M``.

    The zero vector lies in every row span, including that of a 0-row matrix.
    """
    if len(v) != M.ncols:
        raise DimensionError(f"vector of length {len(v)} against {M.ncols} columns")
    return RowBasis(M.ncols, M.data).contains(v)


def _nullspace_rows(M: RationalMatrix) -> list[list[Q]]:
    """Basis of {x : M x = 0} via reduced row echelon form over Q."""
    n = M.ncols
    R = [list(row) for row in M.data]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(R)) if R[i][c]), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == len(R):
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        x = [Q(0)] * n
        x[fc] = Q(1)
        for i, pc in enumerate(pivots):
            x[pc] = -R[i][fc]
        basis.append(x)
    return basis


def left_nullspace_basis(M: RationalMatrix) -> RationalMatrix:
    """Rows ``l`` with ``l M = 0``; row count is ``M.nrows - rank(M)``."""
    return RationalMatrix.from_rows(_nullspace_rows(M.transpose()), ncols=M.nrows)


def proj_dim(A: RationalMatrix, B: RationalMatrix) -> int:
    """Dimension of colspan(A) projected onto the orthogonal complement of colspan(B).

    Uses ``rank[A B] - rank[B]``; no orthogonalisation is performed.
    """
    if A.nrows != B.nrows:
        raise DimensionError(f"row mismatch: {A.nrows} != {B.nrows}")
    return rank(hconcat([A, B])) - rank(B)
