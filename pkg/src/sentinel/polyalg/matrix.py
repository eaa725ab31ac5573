"""Polynomial matrices and unimodular row reduction.

The central routine is a column-by-column Euclidean triangularization that
accumulates the unimodular transform it applies.  Everything else here is
derived from it: upper-triangular reduction, the left-unimodularity test
(all diagonal entries of the triangular form are nonzero constants), the
polynomial left inverse, and determinants.

Row operations used, with their effect on det(U):
    swap two rows                      -1
    add a polynomial multiple of a row  1
    scale a row by a nonzero constant   the constant
"""

from __future__ import annotations

from .poly import EXACT, TOLERANT, DEFAULT_EPS_ZERO, Polynomial
from ..errors import DegenerateInput, NoLeftInverse, ShapeError


class PolyMatrix:
    """Rectangular matrix of Polynomials sharing one coefficient mode."""

    __slots__ = ("entries", "rows", "cols", "mode", "eps_zero")

    def __init__(self, entries, mode=None, eps_zero=None):
        grid = []
        for row in entries:
            grid.append([_as_poly(e, mode, eps_zero) for e in row])
        if not grid or not grid[0]:
            raise ShapeError("matrix must have at least one row and column")
        width = len(grid[0])
        if any(len(row) != width for row in grid):
            raise ShapeError("ragged rows")
        modes = {e.mode for row in grid for e in row}
        if len(modes) > 1:
            raise DegenerateInput("matrix entries mix coefficient modes")
        object.__setattr__(self, "entries", tuple(tuple(row) for row in grid))
        object.__setattr__(self, "rows", len(grid))
        object.__setattr__(self, "cols", width)
        object.__setattr__(self, "mode", modes.pop())
        object.__setattr__(
            self,
            "eps_zero",
            max(e.eps_zero for row in grid for e in row),
        )

    def __setattr__(self, name, value):
        raise AttributeError("PolyMatrix is immutable")

    # -- constructors ----------------------------------------------------

    @classmethod
    def identity(cls, n, mode=EXACT, eps_zero=None):
        return cls(
            [
                [Polynomial.constant(1 if i == j else 0, mode, eps_zero) for j in range(n)]
                for i in range(n)
            ]
        )

    @classmethod
    def zeros(cls, rows, cols, mode=EXACT, eps_zero=None):
        return cls(
            [[Polynomial.zero(mode, eps_zero) for _ in range(cols)] for _ in range(rows)]
        )

    @classmethod
    def from_strings(cls, grid, mode=EXACT, eps_zero=None):
        """Build from a JSON-style nested list of polynomial strings."""
        return cls(
            [[Polynomial.parse(cell, mode, eps_zero=eps_zero) for cell in row] for row in grid]
        )

    def to_strings(self):
        return [[str(e) for e in row] for row in self.entries]

    # -- access ----------------------------------------------------------

    def __getitem__(self, key):
        i, j = key
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def column(self, j):
        return tuple(row[j] for row in self.entries)

    def take_columns(self, indices):
        return PolyMatrix([[row[j] for j in indices] for row in self.entries])

    def take_rows(self, indices):
        return PolyMatrix([list(self.entries[i]) for i in indices])

    def submatrix(self, rows, cols):
        return PolyMatrix([[self.entries[i][j] for j in cols] for i in rows])

    def hstack(self, other):
        if other.rows != self.rows:
            raise ShapeError("hstack needs equal row counts")
        return PolyMatrix(
            [list(a) + list(b) for a, b in zip(self.entries, other.entries)]
        )

    def vstack(self, other):
        if other.cols != self.cols:
            raise ShapeError("vstack needs equal column counts")
        return PolyMatrix([list(r) for r in self.entries + other.entries])

    def coeff_scale(self):
        """Largest coefficient magnitude over all entries."""
        mags = [
            abs(c) for row in self.entries for e in row for c in e.coeffs
        ]
        return max(mags, default=0)

    def max_degree(self):
        degs = [e.degree for row in self.entries for e in row if e.degree is not None]
        return max(degs, default=0)

    # -- arithmetic --------------------------------------------------------

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ShapeError(
                "cannot multiply %dx%d by %dx%d"
                % (self.rows, self.cols, other.rows, other.cols)
            )
        out = []
        for i in range(self.rows):
            out_row = []
            for j in range(other.cols):
                acc = Polynomial.zero(self.mode, self.eps_zero)
                for k in range(self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                out_row.append(acc)
            out.append(out_row)
        return PolyMatrix(out)

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("shape mismatch in addition")
        return PolyMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return PolyMatrix([[-e for e in row] for row in self.entries])

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(
            a == b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb)
        )

    def __repr__(self):
        return "PolyMatrix(%r)" % (self.to_strings(),)


def _as_poly(entry, mode, eps_zero):
    if isinstance(entry, Polynomial):
        return entry
    if isinstance(entry, str):
        return Polynomial.parse(entry, mode or EXACT, eps_zero=eps_zero)
    return Polynomial.constant(entry, mode or EXACT, eps_zero)


def poly_matrix_mul(a, b):
    """Matrix product; ShapeError if the shapes do not conform."""
    return a @ b


def poly_matrix_det(a):
    """Determinant via triangularization with a tracked transform scale."""
    if a.rows != a.cols:
        raise ShapeError("determinant requires a square matrix")
    tri, _, det_u = _triangularize(a)
    det = Polynomial.one(a.mode, a.eps_zero)
    for k in range(a.cols):
        det = det * tri[k, k]
    # T = U*A, so det(A) = det(T) / det(U); det(U) is a nonzero constant.
    return det.scaled(1 / det_u)


class _Reduction:
    """Mutable workspace for row operations with an accumulated transform."""

    def __init__(self, matrix):
        self.mode = matrix.mode
        self.eps = matrix.eps_zero
        self.m = [list(row) for row in matrix.entries]
        self.u = [
            [
                Polynomial.constant(1 if i == j else 0, matrix.mode, matrix.eps_zero)
                for j in range(matrix.rows)
            ]
            for i in range(matrix.rows)
        ]
        self.det_u = _as_scalar(1, matrix.mode)
        # Reference magnitude for zero tests: noise from exact cancellation
        # lives at the scale of the data it cancelled, not of the entries
        # that remain.
        s = float(matrix.coeff_scale())
        self.scale = s if s > 0.0 else 1.0

    def is_zero(self, p):
        if self.mode == EXACT:
            return p.is_zero()
        return p.is_zero(scale=self.scale)

    def swap(self, i, j):
        if i == j:
            return
        self.m[i], self.m[j] = self.m[j], self.m[i]
        self.u[i], self.u[j] = self.u[j], self.u[i]
        self.det_u = -self.det_u

    def scale_row(self, i, factor):
        self.m[i] = [e.scaled(factor) for e in self.m[i]]
        self.u[i] = [e.scaled(factor) for e in self.u[i]]
        self.det_u = self.det_u * _as_scalar(factor, self.mode)

    def add_multiple(self, target, source, q):
        """row[target] += q * row[source]"""
        if q.is_zero():
            return
        self.m[target] = self._combine(self.m[target], q, self.m[source])
        self.u[target] = self._combine(self.u[target], q, self.u[source])

    def _combine(self, row, q, other):
        out = []
        for a, b in zip(row, other):
            t = q * b
            e = a + t
            if self.mode == TOLERANT:
                local = max(float(a.inf_norm()), float(t.inf_norm()))
                if local > 0.0:
                    e = e.chop(local)
                self.scale = max(self.scale, float(e.inf_norm() or 0.0))
            out.append(e)
        return out

    def matrix(self):
        return PolyMatrix(self.m)

    def transform(self):
        return PolyMatrix(self.u)


def _as_scalar(value, mode):
    from fractions import Fraction

    return Fraction(value) if mode == EXACT else float(value)


def _reduce(matrix):
    """Triangularize by unimodular row operations; returns the workspace.

    Column k is processed with pivot row k; pivots are the nonzero entries
    of least degree, ties broken by lowest row index.  Diagonal entries end
    up monic.
    """
    work = _Reduction(matrix)
    n_rows, n_cols = matrix.rows, matrix.cols
    for col in range(min(n_rows, n_cols)):
        while True:
            live = [
                i
                for i in range(col, n_rows)
                if not work.is_zero(work.m[i][col])
            ]
            if not live:
                break
            pivot = min(live, key=lambda i: (work.m[i][col].degree, i))
            if len(live) == 1:
                work.swap(col, pivot)
                break
            for i in live:
                if i == pivot:
                    continue
                q, _ = divmod(work.m[i][col], work.m[pivot][col])
                work.add_multiple(i, pivot, -q)
                # Degree must drop; force the remainder representation in
                # tolerant mode where cancellation leaves noise.
                e = work.m[i][col]
                if (
                    work.mode == TOLERANT
                    and e.degree is not None
                    and e.degree >= work.m[pivot][col].degree
                ):
                    work.m[i][col] = e.chop(work.scale)
        # entries below the pivot all test as zero now; store them as such
        for i in range(col + 1, n_rows):
            work.m[i][col] = Polynomial.zero(work.mode, work.eps)
        d = work.m[col][col]
        if not work.is_zero(d) and d.lead != 1:
            work.scale_row(col, 1 / d.lead)
    return work


def _triangularize(matrix):
    """Reduce to upper-triangular T = U * matrix; returns (T, U, det(U))."""
    work = _reduce(matrix)
    return work.matrix(), work.transform(), work.det_u


def row_reduce_upper(matrix):
    """Unimodular upper-triangular reduction.

    Returns (T, U) with U * matrix = T, T upper triangular with monic
    diagonal and zero rows beyond the column count.  Requires at least as
    many rows as columns.
    """
    if matrix.rows < matrix.cols:
        raise ShapeError("reduction requires rows >= cols")
    tri, u, _ = _triangularize(matrix)
    return tri, u


def _diagonal_is_unit(work, k):
    """Whether the k-th diagonal of a reduced workspace is a nonzero constant."""
    d = work.m[k][k]
    if d.degree is None:
        return False
    if work.mode == EXACT:
        return d.degree == 0
    if work.is_zero(d):
        return False
    return d.chop(work.scale).degree == 0


def is_left_unimodular(matrix):
    """Whether the matrix has a polynomial left inverse.

    True iff triangularization leaves only nonzero constants on the
    diagonal.  Raises ShapeError when rows < cols.
    """
    if matrix.cols < 1 or matrix.rows < matrix.cols:
        raise ShapeError("left unimodularity requires rows >= cols >= 1")
    work = _reduce(matrix)
    return all(_diagonal_is_unit(work, k) for k in range(matrix.cols))


def _identity_reduce(matrix):
    """Return unimodular U with U * matrix = [I; 0].

    Requires the matrix to be left unimodular; diagonal entries of its
    triangular form are then monic constants, so clearing everything above
    them is a single quotient-free pass per column.
    """
    work = _reduce(matrix)
    for k in range(matrix.cols):
        if not _diagonal_is_unit(work, k):
            raise NoLeftInverse(
                "matrix of shape %dx%d is not left unimodular"
                % (matrix.rows, matrix.cols)
            )
    for col in range(matrix.cols):
        # diagonal is the constant 1 after monic normalization
        for i in range(col):
            e = work.m[i][col]
            if not work.is_zero(e):
                work.add_multiple(i, col, -e)
                work.m[i][col] = Polynomial.zero(work.mode, work.eps)
    return work.transform()


def left_inverse(matrix):
    """Polynomial left inverse X with X * matrix = I.

    Raises NoLeftInverse when the matrix is not left unimodular.
    """
    if matrix.cols < 1 or matrix.rows < matrix.cols:
        raise ShapeError("left inverse requires rows >= cols >= 1")
    u = _identity_reduce(matrix)
    return u.take_rows(range(matrix.cols))
