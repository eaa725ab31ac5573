"""Kronecker-Hermite canonical forms and latent-variable reconstruction.

A square kernel matrix whose size-L column subsets are all left unimodular
reduces, by unimodular row operations, to the block shape

    [ I_L  B ]
    [ 0    D ]

with D upper triangular, monic on the diagonal, and each diagonal degree
strictly dominant within its column.  The blocks expose a latent-variable
view of the same system: with m = N - L, the output set equals
{ y : y = M(s) l for some l with D(s) l = 0 } where M stacks -B over the
m-by-m identity.  ``kernel_from_md`` inverts that move, rebuilding a square
kernel matrix from any observable (M, D) pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .matrix import (
    PolyMatrix,
    _Reduction,
    _identity_reduce,
    _reduce,
    is_left_unimodular,
)
from .poly import EXACT, TOLERANT, Polynomial
from ..errors import (
    NoLeftInverse,
    NotMaximallySecure,
    NotObservable,
    NotReducible,
    ShapeError,
    SingularKernel,
)


@dataclass(frozen=True)
class CanonicalForm:
    """Canonical kernel matrix with the unimodular transform that made it.

    ``transform @ original == canonical`` and ``block_size`` counts the
    leading identity rows.
    """

    canonical: PolyMatrix
    transform: PolyMatrix
    block_size: int

    @property
    def sensors(self):
        return self.canonical.rows

    @property
    def latent_dim(self):
        """Number of free driver components (N - L)."""
        return self.canonical.rows - self.block_size

    @property
    def latent_kernel(self):
        """The D block; annihilates the latent driver, D(s) l = 0."""
        n = self.sensors
        return self.canonical.submatrix(range(self.block_size, n), range(self.block_size, n))

    @property
    def output_map(self):
        """The stack M with y = M(s) l; its lower block is the identity."""
        n, m = self.sensors, self.latent_dim
        mode, eps = self.canonical.mode, self.canonical.eps_zero
        rows = [
            [-self.canonical[i, j] for j in range(self.block_size, n)]
            for i in range(self.block_size)
        ]
        for i in range(m):
            rows.append(
                [Polynomial.constant(1 if i == j else 0, mode, eps) for j in range(m)]
            )
        return PolyMatrix(rows)

    @property
    def char_poly(self):
        """Scalar annihilator of the single driver; needs L = N - 1."""
        if self.latent_dim != 1:
            raise NotMaximallySecure(
                "a single scalar annihilator exists only for an identity "
                "block of size N-1"
            )
        n = self.sensors
        return self.canonical[n - 1, n - 1]

    @property
    def regen_polys(self):
        """Polynomials rebuilding outputs 1..N-1 from output N; needs L = N - 1."""
        if self.latent_dim != 1:
            raise NotMaximallySecure(
                "per-output regeneration exists only for an identity block "
                "of size N-1"
            )
        n = self.sensors
        return tuple(-self.canonical[i, n - 1] for i in range(n - 1))


def kronecker_hermite(matrix, block_size):
    """Reduce a square kernel matrix to the [[I, B], [0, D]] form.

    ``block_size`` is the size L of the identity block.  Every column
    subset of that size must be left unimodular; the first failing subset
    (1-based) is reported as the ``witness`` of NotReducible.  A singular
    input raises SingularKernel.
    """
    n = matrix.rows
    if matrix.cols != n:
        raise ShapeError("canonical reduction requires a square matrix")
    if not 0 <= block_size < n:
        raise ShapeError("identity block size must lie in [0, N-1]")
    if matrix.mode == TOLERANT:
        # Float row reduction compounds rounding into percent-level errors
        # on badly scaled kernels.  Every float is an exact rational, so
        # the reduction runs on those values instead; only the finished
        # blocks return to floats.
        form = kronecker_hermite(_lift_exact(matrix), block_size)
        return CanonicalForm(
            canonical=_unlift(form.canonical, matrix.eps_zero),
            transform=_unlift(form.transform, matrix.eps_zero),
            block_size=block_size,
        )
    probe = _reduce(matrix)
    if any(probe.is_zero(probe.m[k][k]) for k in range(n)):
        raise SingularKernel("kernel matrix has zero determinant")
    for subset in combinations(range(n), block_size):
        if subset and not is_left_unimodular(matrix.take_columns(subset)):
            named = tuple(i + 1 for i in subset)
            raise NotReducible(
                "columns %s admit no polynomial left inverse" % (named,),
                witness=named,
            )

    if block_size:
        w = _identity_reduce(matrix.take_columns(range(block_size)))
        staged = w @ matrix
    else:
        w = PolyMatrix.identity(n, matrix.mode, matrix.eps_zero)
        staged = matrix

    lower = staged.submatrix(range(block_size, n), range(block_size, n))
    sub = _reduce(lower)
    if any(sub.is_zero(sub.m[k][k]) for k in range(n - block_size)):
        raise SingularKernel("kernel matrix has zero determinant")
    embed = _embed_identity(sub.transform(), block_size, matrix.mode, matrix.eps_zero)
    transform = embed @ w
    staged = embed @ staged

    work = _Reduction(staged)
    work.u = [list(row) for row in transform.entries]
    for col in range(block_size, n):
        d = work.m[col][col]
        for i in range(col):
            e = work.m[i][col]
            if e.degree is None or e.degree < d.degree:
                continue
            q, _ = divmod(e, d)
            work.add_multiple(i, col, -q)
            e = work.m[i][col]
            if work.mode == TOLERANT and e.degree is not None and e.degree >= d.degree:
                work.m[i][col] = e.chop(work.scale)
    return CanonicalForm(
        canonical=work.matrix(), transform=work.transform(), block_size=block_size
    )


def _lift_exact(matrix):
    rows = [
        [Polynomial([Fraction(c) for c in entry.coeffs], EXACT) for entry in row]
        for row in matrix.entries
    ]
    return PolyMatrix(rows)


def _unlift(matrix, eps_zero):
    rows = [
        [
            Polynomial([float(c) for c in entry.coeffs], TOLERANT, eps_zero)
            for entry in row
        ]
        for row in matrix.entries
    ]
    return PolyMatrix(rows)


def _embed_identity(inner, offset, mode, eps_zero):
    """Place ``inner`` in the bottom-right corner of an identity matrix."""
    n = offset + inner.rows
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < offset or j < offset:
                row.append(Polynomial.constant(1 if i == j else 0, mode, eps_zero))
            else:
                row.append(inner[i - offset, j - offset])
        rows.append(row)
    return PolyMatrix(rows)


def kernel_from_md(output_map, latent_kernel):
    """Square kernel matrix of the system y = M(s) l, D(s) l = 0.

    Reduces the stack [-M; D] to [I; 0] by a unimodular transform U; the
    rows of U beyond the first m then annihilate exactly the outputs
    reachable from some latent driver.  Requires det D nonzero
    (SingularKernel) and the stack to be left unimodular (NotObservable).
    """
    n, m = output_map.rows, output_map.cols
    if latent_kernel.rows != latent_kernel.cols or latent_kernel.cols != m:
        raise ShapeError("latent annihilator must be square and match the map width")
    probe = _reduce(latent_kernel)
    if any(probe.is_zero(probe.m[k][k]) for k in range(m)):
        raise SingularKernel("latent annihilator has zero determinant")
    stack = (-output_map).vstack(latent_kernel)
    try:
        u = _identity_reduce(stack)
    except NoLeftInverse as exc:
        raise NotObservable(
            "stacked output map and annihilator has no left inverse"
        ) from exc
    return u.submatrix(range(m, m + n), range(n))
