"""Exact rational scalars, vectors and matrices.

Scalars are ``gmpy2.mpq`` values (always in lowest terms, positive
denominator).  Vectors are plain tuples of scalars.  Matrices are immutable
:class:`Matrix` objects holding a tuple of row tuples.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt
from numbers import Integral, Rational
from typing import Iterable, Sequence

from gmpy2 import mpq

Rat = type(mpq(0))
Vector = tuple

ZERO = mpq(0)
ONE = mpq(1)


class DimensionError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


def rat(x) -> Rat:
    """Convert ``x`` to an exact rational.

    Accepts integers, rationals (``Fraction``/``mpq``) and strings of the
    form ``"p"`` or ``"p/q"``.  Floats are refused on purpose.
    """
    if isinstance(x, Rat):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Integral):
        return mpq(int(x))
    if isinstance(x, Rational):
        return mpq(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        s = x.strip()
        num, sep, den = s.partition("/")
        try:
            n = int(num)
            d = int(den) if sep else 1
        except ValueError:
            raise ValueError(f"not a rational literal: {x!r}") from None
        if d == 0:
            raise ZeroDivisionError(f"zero denominator in {x!r}")
        return mpq(n, d)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def fmt(x) -> str:
    """Text form ``p/q`` (``q`` omitted when it equals 1)."""
    x = rat(x)
    if x.denominator == 1:
        return str(int(x.numerator))
    return f"{int(x.numerator)}/{int(x.denominator)}"


def to_fraction(x) -> Fraction:
    x = rat(x)
    return Fraction(int(x.numerator), int(x.denominator))


def floor(x) -> int:
    x = rat(x)
    return int(x.numerator) // int(x.denominator)


def ceil(x) -> int:
    x = rat(x)
    return -(-int(x.numerator) // int(x.denominator))


def round_half_even(x) -> int:
    x = rat(x)
    f = floor(x)
    frac = x - f
    if frac > mpq(1, 2) or (frac == mpq(1, 2) and f % 2 == 1):
        return f + 1
    return f


def is_integral(x) -> bool:
    return rat(x).denominator == 1


def sqrt_upper(x, bits: int = 24) -> Rat:
    """Rational ``r`` with ``sqrt(x) <= r <= sqrt(x) * (1 + 2**-bits)``.

    Exact when ``x`` is the square of a rational.
    """
    x = rat(x)
    if x < 0:
        raise ValueError("square root of a negative number")
    if x == 0:
        return ZERO
    a, b = int(x.numerator), int(x.denominator)
    ab = a * b
    s = max(0, bits - ab.bit_length() // 2 + 1)
    n = ab << (2 * s)
    root = isqrt(n)
    if root * root < n:
        root += 1
    return mpq(root, b << s)


def ceil_sqrt_int(n: int) -> int:
    """Least integer ``r`` with ``r*r >= n`` (``n >= 0``)."""
    r = isqrt(n)
    return r if r * r == n else r + 1


# -- vectors -----------------------------------------------------------------

def vec(values: Iterable) -> Vector:
    return tuple(rat(v) for v in values)


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def unit(n: int, i: int) -> Vector:
    return tuple(ONE if j == i else ZERO for j in range(n))


def dot(u: Sequence, v: Sequence) -> Rat:
    if len(u) != len(v):
        raise DimensionError(f"dot of lengths {len(u)} and {len(v)}")
    s = mpq(0)
    for a, b in zip(u, v):
        if a and b:
            s += a * b
    return s


def vadd(u: Sequence, v: Sequence) -> Vector:
    if len(u) != len(v):
        raise DimensionError("vector lengths differ")
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> Vector:
    if len(u) != len(v):
        raise DimensionError("vector lengths differ")
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v: Sequence) -> Vector:
    c = rat(c)
    return tuple(c * a for a in v)


def norm_sq(v: Sequence) -> Rat:
    return dot(v, v)


# -- matrices ----------------------------------------------------------------

class Matrix:
    """Immutable dense rational matrix."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, data: Iterable[Iterable] = (), ncols: int | None = None):
        rows = tuple(tuple(rat(v) for v in row) for row in data)
        if ncols is None:
            if not rows:
                raise DimensionError("ncols is required for a matrix without rows")
            ncols = len(rows[0])
        for row in rows:
            if len(row) != ncols:
                raise DimensionError("ragged matrix")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @classmethod
    def _raw(cls, rows: tuple, ncols: int) -> "Matrix":
        m = object.__new__(cls)
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        return m

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._raw(tuple(unit(n, i) for i in range(n)), n)

    @classmethod
    def zero(cls, m: int, n: int) -> "Matrix":
        return cls._raw(tuple(zeros(n) for _ in range(m)), n)

    @classmethod
    def diag(cls, entries: Iterable) -> "Matrix":
        d = vec(entries)
        n = len(d)
        return cls._raw(tuple(tuple(d[i] if i == j else ZERO for j in range(n)) for i in range(n)), n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int | None = None) -> "Matrix":
        cols = [vec(c) for c in cols]
        if nrows is None:
            if not cols:
                raise DimensionError("nrows is required for a matrix without columns")
            nrows = len(cols[0])
        if any(len(c) != nrows for c in cols):
            raise DimensionError("ragged columns")
        return cls._raw(tuple(tuple(c[i] for c in cols) for i in range(nrows)), len(cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def T(self) -> "Matrix":
        return Matrix._raw(tuple(zip(*self.rows)) if self.nrows else tuple(() for _ in range(self.ncols)), self.nrows)

    def __getitem__(self, idx):
        if isinstance(idx, tuple):
            i, j = idx
            return self.rows[i][j]
        return self.rows[idx]

    def col(self, j: int) -> Vector:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[Vector]:
        return [self.col(j) for j in range(self.ncols)]

    def diagonal(self) -> Vector:
        return tuple(self.rows[i][i] for i in range(min(self.nrows, self.ncols)))

    def select_rows(self, idx: Iterable[int]) -> "Matrix":
        return Matrix._raw(tuple(self.rows[i] for i in idx), self.ncols)

    def select_cols(self, idx: Iterable[int]) -> "Matrix":
        idx = list(idx)
        return Matrix._raw(tuple(tuple(row[j] for j in idx) for row in self.rows), len(idx))

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise DimensionError("hstack with different row counts")
        return Matrix._raw(tuple(a + b for a, b in zip(self.rows, other.rows)), self.ncols + other.ncols)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise DimensionError("vstack with different column counts")
        return Matrix._raw(self.rows + other.rows, self.ncols)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_symmetric(self) -> bool:
        n = self.nrows
        return self.is_square() and all(self.rows[i][j] == self.rows[j][i] for i in range(n) for j in range(i))

    def is_diagonal(self) -> bool:
        return all(v == 0 for i, row in enumerate(self.rows) for j, v in enumerate(row) if i != j)

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.rows for v in row)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.ncols:
            raise DimensionError(f"matrix with {self.ncols} columns applied to vector of length {len(v)}")
        return tuple(dot(row, v) for row in self.rows)

    def quad(self, v: Sequence) -> Rat:
        """``v^T A v``."""
        return dot(v, self.apply(v))

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            return matmul(self, other)
        return self.apply(other)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch in addition")
        return Matrix._raw(tuple(vadd(a, b) for a, b in zip(self.rows, other.rows)), self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch in subtraction")
        return Matrix._raw(tuple(vsub(a, b) for a, b in zip(self.rows, other.rows)), self.ncols)

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def scale(self, c) -> "Matrix":
        c = rat(c)
        return Matrix._raw(tuple(tuple(c * v for v in row) for row in self.rows), self.ncols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.shape, self.rows))

    def tolist(self) -> list[list[str]]:
        return [[fmt(v) for v in row] for row in self.rows]

    def __repr__(self) -> str:
        return f"Matrix({self.tolist()!r}, ncols={self.ncols})"


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if A.ncols != B.nrows:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    bt = B.T.rows
    return Matrix._raw(tuple(tuple(dot(row, col) for col in bt) for row in A.rows), B.ncols)


def frobenius_sq(A: Matrix) -> Rat:
    return sum((v * v for row in A.rows for v in row), mpq(0))


def _echelon(rows: list[list], ncols: int) -> tuple[list[int], int]:
    """Fraction-free (Bareiss) forward elimination in place.

    Returns the pivot columns and the sign of the row permutation.  After
    the call, ``rows[i][pivots[i]]`` is the leading minor of order ``i+1``
    of the row-permuted input restricted to the pivot columns.
    """
    m = len(rows)
    pivots: list[int] = []
    sign = 1
    prev = mpq(1)
    r = 0
    for c in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
            sign = -sign
        pr = rows[r]
        pv = pr[c]
        for i in range(r + 1, m):
            ri = rows[i]
            f = ri[c]
            for j in range(c + 1, ncols):
                ri[j] = (pv * ri[j] - f * pr[j]) / prev
            ri[c] = ZERO
        # entries of pivot row left of c are already zero
        prev = pv
        pivots.append(c)
        r += 1
    return pivots, sign


def det(A: Matrix) -> Rat:
    if not A.is_square():
        raise DimensionError("determinant of a non-square matrix")
    n = A.nrows
    if n == 0:
        return mpq(1)
    rows = [list(r) for r in A.rows]
    pivots, sign = _echelon(rows, n)
    if len(pivots) < n:
        return mpq(0)
    return sign * rows[n - 1][n - 1]


def rank(A: Matrix) -> int:
    rows = [list(r) for r in A.rows]
    pivots, _ = _echelon(rows, A.ncols)
    return len(pivots)


def solve(A: Matrix, b: Sequence) -> Vector:
    """Unique solution of ``A x = b`` for square nonsingular ``A``."""
    if not A.is_square():
        raise DimensionError("solve needs a square matrix")
    n = A.nrows
    if len(b) != n:
        raise DimensionError("right-hand side has the wrong length")
    rows = [list(r) + [rat(bi)] for r, bi in zip(A.rows, b)]
    pivots, _ = _echelon(rows, n + 1)
    if len(pivots) < n or pivots[n - 1] != n - 1:
        raise SingularMatrixError("singular system")
    x = [ZERO] * n
    for i in range(n - 1, -1, -1):
        row = rows[i]
        s = row[n]
        for j in range(i + 1, n):
            if row[j]:
                s -= row[j] * x[j]
        x[i] = s / row[i]
    return tuple(x)


def rref(A: Matrix) -> tuple[list[list], list[int]]:
    """Reduced row echelon form (rows, pivot columns)."""
    rows = [list(r) for r in A.rows]
    m, n = A.nrows, A.ncols
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        if pv != 1:
            rows[r] = [v / pv for v in rows[r]]
        pr = rows[r]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [vi - f * vp for vi, vp in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def inverse(A: Matrix) -> Matrix:
    if not A.is_square():
        raise DimensionError("inverse of a non-square matrix")
    n = A.nrows
    aug = Matrix._raw(tuple(r + unit(n, i) for i, r in enumerate(A.rows)), 2 * n)
    rows, pivots = rref(aug)
    if len(pivots) < n or pivots[n - 1] != n - 1:
        raise SingularMatrixError("matrix is singular")
    return Matrix._raw(tuple(tuple(r[n:]) for r in rows), n)


def kernel_basis(A: Matrix) -> Matrix:
    """Columns form a basis of ``{x : A x = 0}`` (``n x (n - rank)``)."""
    n = A.ncols
    rows, pivots = rref(A)
    free = [j for j in range(n) if j not in set(pivots)]
    cols = []
    for f in free:
        x = [ZERO] * n
        x[f] = ONE
        for r, pc in zip(rows, pivots):
            x[pc] = -r[f]
        cols.append(x)
    return Matrix.from_columns(cols, nrows=n)


def orth_complement_basis(B: Matrix) -> Matrix:
    """Columns form a basis of ``{x : B^T x = 0}``."""
    return kernel_basis(B.T)


def independent_columns(A: Matrix) -> list[int]:
    """Indices of a greedy (left to right) maximal independent column set."""
    _, pivots = rref(A)
    return pivots


def left_inverse(B: Matrix) -> Matrix:
    """``(B^T B)^{-1} B^T`` for ``B`` of full column rank."""
    Bt = B.T
    G = matmul(Bt, B)
    try:
        Ginv = inverse(G)
    except SingularMatrixError:
        raise SingularMatrixError("left inverse of a rank-deficient matrix") from None
    return matmul(Ginv, Bt)


def projector(S: Matrix) -> Matrix:
    """Orthogonal projector onto the column space of ``S`` (full column rank)."""
    if S.ncols == 0:
        return Matrix.zero(S.nrows, S.nrows)
    return matmul(S, left_inverse(S))
