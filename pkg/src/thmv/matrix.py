"""Dense and sparse matrix/vector storage over a semiring, plus the
product kernels the two oracle strategies need.

Conventions:

* The public API is 1-based (row/column indices, sparse coordinate
  triples); internal numpy storage is 0-based.
* All values are immutable after construction; operations allocate fresh
  outputs.
* Every kernel takes an optional ``sr`` argument. Pass a
  ``CountingSemiring`` to attribute the work to a counter; by default the
  operands' base semiring is used and nothing is counted. Counted
  multiplication totals match the schoolbook closed forms exactly (e.g.
  ``transpose_times_dense`` counts nnz(P)*n multiplications) even though
  the kernels execute vectorized.
* Row/index supports are upper bounds maintained structurally: a support
  row may hold only zeros if an input row was zero, and supports are
  never re-tightened. There is no subtraction, so entries can never
  cancel back to zero.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetError, DimensionError
from .semiring import Semiring, base_of


def nnz_budget(n: int, tau: float) -> int:
    """The sparsity budget ceil(n**tau).

    A tiny epsilon guards against float noise pushing an exact power
    (16**0.5 == 4) just above its integer value.
    """
    if n < 1:
        raise DimensionError(f"n must be positive, got {n}")
    return max(1, math.ceil(n**tau - 1e-9))


def _resolve_sr(sr: Semiring | None, *operands) -> Semiring:
    names = {op.semiring.name for op in operands}
    if len(names) > 1:
        raise DimensionError(f"mixed semirings: {sorted(names)}")
    if sr is None:
        return operands[0].semiring
    if base_of(sr).name not in names:
        raise DimensionError(
            f"semiring mismatch: context is {base_of(sr).name}, operands are {names.pop()}"
        )
    return sr


class DenseMatrix:
    """Row-major dense matrix over a semiring."""

    __slots__ = ("semiring", "rows", "cols", "data")

    def __init__(self, semiring: Semiring, data, *, validate: bool = True):
        semiring = base_of(semiring)
        arr = semiring.asarray(data, validate=validate)
        if arr.ndim != 2:
            raise DimensionError(f"dense matrix needs 2-D data, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"dense matrix needs positive shape, got {arr.shape}")
        self.semiring = semiring
        self.rows, self.cols = arr.shape
        self.data = arr

    @classmethod
    def zeros(cls, semiring: Semiring, rows: int, cols: int) -> "DenseMatrix":
        semiring = base_of(semiring)
        return cls(semiring, semiring.zeros((rows, cols)), validate=False)

    @classmethod
    def identity(cls, semiring: Semiring, n: int) -> "DenseMatrix":
        semiring = base_of(semiring)
        arr = semiring.zeros((n, n))
        for i in range(n):
            arr[i, i] = semiring.one
        return cls(semiring, arr, validate=False)

    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def tolist(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.data]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DenseMatrix)
            and self.semiring.name == other.semiring.name
            and self.shape() == other.shape()
            and bool(np.array_equal(self.data, other.data))
        )

    def __repr__(self) -> str:
        return f"DenseMatrix({self.semiring.name}, {self.rows}x{self.cols})"


class DenseVector:
    """Dense vector over a semiring."""

    __slots__ = ("semiring", "length", "data")

    def __init__(self, semiring: Semiring, data, *, validate: bool = True):
        semiring = base_of(semiring)
        arr = semiring.asarray(data, validate=validate)
        if arr.ndim != 1:
            raise DimensionError(f"dense vector needs 1-D data, got shape {arr.shape}")
        self.semiring = semiring
        self.length = arr.shape[0]
        self.data = arr

    @classmethod
    def zeros(cls, semiring: Semiring, length: int) -> "DenseVector":
        semiring = base_of(semiring)
        return cls(semiring, semiring.zeros((length,)), validate=False)

    def tolist(self) -> list[int]:
        return [int(x) for x in self.data]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DenseVector)
            and self.semiring.name == other.semiring.name
            and self.length == other.length
            and bool(np.array_equal(self.data, other.data))
        )

    def __repr__(self) -> str:
        return f"DenseVector({self.semiring.name}, n={self.length})"


class SparseMatrix:
    """Coordinate-format sparse matrix.

    Entries are (row, col, value) triples, 1-based at the API boundary,
    kept sorted by (col, row) internally so transpose applications stream
    column-major without a transpose pass. Duplicate coordinates and
    zero values are rejected. With ``budget`` set, construction fails
    when nnz exceeds it (strict mode); leave it None for permissive mode.
    """

    __slots__ = ("semiring", "rows", "cols", "rows0", "cols0", "vals")

    def __init__(
        self,
        semiring: Semiring,
        rows: int,
        cols: int,
        entries: Iterable[tuple[int, int, int]],
        *,
        budget: int | None = None,
    ):
        semiring = base_of(semiring)
        if rows < 1 or cols < 1:
            raise DimensionError(f"sparse matrix needs positive shape, got {rows}x{cols}")
        triples = []
        seen = set()
        for r, c, v in entries:
            if not (1 <= r <= rows and 1 <= c <= cols):
                raise DimensionError(f"entry ({r},{c}) outside {rows}x{cols}")
            if (r, c) in seen:
                raise ValueError(f"duplicate entry at ({r},{c})")
            seen.add((r, c))
            v = semiring.check(v)
            if v == semiring.zero:
                raise ValueError(f"stored zero at ({r},{c})")
            triples.append((c - 1, r - 1, v))
        if budget is not None and len(triples) > budget:
            raise BudgetError(f"nnz {len(triples)} exceeds budget {budget}")
        triples.sort(key=lambda t: (t[0], t[1]))
        self.semiring = semiring
        self.rows = rows
        self.cols = cols
        self.rows0 = np.array([t[1] for t in triples], dtype=np.int64)
        self.cols0 = np.array([t[0] for t in triples], dtype=np.int64)
        self.vals = semiring.asarray([t[2] for t in triples], validate=False)

    @property
    def nnz(self) -> int:
        return len(self.rows0)

    def entries(self) -> list[tuple[int, int, int]]:
        """All (row, col, value) triples, 1-based, sorted by (col, row)."""
        return [
            (int(r) + 1, int(c) + 1, int(v))
            for r, c, v in zip(self.rows0, self.cols0, self.vals)
        ]

    def col_support0(self) -> np.ndarray:
        """Sorted distinct 0-based column indices holding a nonzero."""
        return np.unique(self.cols0)

    def densify(self) -> DenseMatrix:
        arr = self.semiring.zeros((self.rows, self.cols))
        arr[self.rows0, self.cols0] = self.vals
        return DenseMatrix(self.semiring, arr, validate=False)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseMatrix)
            and self.semiring.name == other.semiring.name
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self.entries() == other.entries()
        )

    def __repr__(self) -> str:
        return f"SparseMatrix({self.semiring.name}, {self.rows}x{self.cols}, nnz={self.nnz})"


class RowSparseMatrix:
    """Matrix that is zero outside a tracked set of rows.

    ``support`` (1-based, sorted) is an upper bound: rows outside it are
    all-zero; rows inside it are stored densely and may still contain
    zeros.
    """

    __slots__ = ("semiring", "rows", "cols", "support0", "data")

    def __init__(
        self,
        semiring: Semiring,
        rows: int,
        cols: int,
        support0: np.ndarray,
        data: np.ndarray,
    ):
        semiring = base_of(semiring)
        support0 = np.asarray(support0, dtype=np.int64)
        if support0.size and (support0[0] < 0 or support0[-1] >= rows):
            raise DimensionError("support outside row range")
        if data.shape != (support0.size, cols):
            raise DimensionError(
                f"rowdata shape {data.shape} != ({support0.size}, {cols})"
            )
        self.semiring = semiring
        self.rows = rows
        self.cols = cols
        self.support0 = support0
        self.data = data

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(r) + 1 for r in self.support0)

    def densify(self) -> DenseMatrix:
        arr = self.semiring.zeros((self.rows, self.cols))
        if self.support0.size:
            arr[self.support0, :] = self.data
        return DenseMatrix(self.semiring, arr, validate=False)

    def __repr__(self) -> str:
        return (
            f"RowSparseMatrix({self.semiring.name}, {self.rows}x{self.cols}, "
            f"|support|={self.support0.size})"
        )


class SparseVector:
    """Sparse vector: sorted unique 1-based indices, no stored zeros."""

    __slots__ = ("semiring", "length", "idx0", "vals")

    def __init__(self, semiring: Semiring, length: int, items: Iterable[tuple[int, int]]):
        semiring = base_of(semiring)
        pairs = []
        seen = set()
        for i, v in items:
            if not (1 <= i <= length):
                raise DimensionError(f"index {i} outside [1,{length}]")
            if i in seen:
                raise ValueError(f"duplicate index {i}")
            seen.add(i)
            v = semiring.check(v)
            if v == semiring.zero:
                raise ValueError(f"stored zero at index {i}")
            pairs.append((i - 1, v))
        pairs.sort()
        self.semiring = semiring
        self.length = length
        self.idx0 = np.array([p[0] for p in pairs], dtype=np.int64)
        self.vals = semiring.asarray([p[1] for p in pairs], validate=False)

    @property
    def nnz(self) -> int:
        return len(self.idx0)

    def items(self) -> list[tuple[int, int]]:
        return [(int(i) + 1, int(v)) for i, v in zip(self.idx0, self.vals)]

    def densify(self) -> DenseVector:
        arr = self.semiring.zeros((self.length,))
        arr[self.idx0] = self.vals
        return DenseVector(self.semiring, arr, validate=False)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseVector)
            and self.semiring.name == other.semiring.name
            and self.length == other.length
            and self.items() == other.items()
        )

    def __repr__(self) -> str:
        return f"SparseVector({self.semiring.name}, n={self.length}, nnz={self.nnz})"


# ---------------------------------------------------------------------------
# kernels


def transpose_times_dense(
    P: SparseMatrix, V: DenseMatrix, sr: Semiring | None = None
) -> RowSparseMatrix:
    """P^T V, returned row-sparse on the columns of P that hold a nonzero.

    Counts exactly nnz(P) * V.cols multiplications.
    """
    if P.rows != V.rows:
        raise DimensionError(f"P is {P.rows}x{P.cols}, V is {V.rows}x{V.cols}")
    sr = _resolve_sr(sr, P, V)
    support0 = P.col_support0()
    acc = sr.zeros((support0.size, V.cols))
    pos = {int(c): k for k, c in enumerate(support0)}
    for r0, c0, v in zip(P.rows0, P.cols0, P.vals):
        k = pos[int(c0)]
        term = sr.vmul(v, V.data[r0, :])
        acc[k, :] = sr.vadd(acc[k, :], term)
    return RowSparseMatrix(P.semiring, P.cols, V.cols, support0, acc)


def transpose_times_vector(
    P: SparseMatrix, v: DenseVector, sr: Semiring | None = None
) -> SparseVector:
    """P^T v as a sparse vector indexed by nonzero columns of P.

    Counts exactly nnz(P) multiplications. Entries that come out equal to
    semiring zero are dropped, so the index set is a subset of P's
    nonzero columns.
    """
    if P.rows != v.length:
        raise DimensionError(f"P is {P.rows}x{P.cols}, v has length {v.length}")
    sr = _resolve_sr(sr, P, v)
    acc: dict[int, int] = {}
    for r0, c0, val in zip(P.rows0, P.cols0, P.vals):
        term = sr.mul(int(val), int(v.data[r0]))
        c = int(c0)
        if c in acc:
            acc[c] = sr.add(acc[c], term)
        else:
            acc[c] = term
    zero = base_of(sr).zero
    items = [(c + 1, val) for c, val in acc.items() if val != zero]
    return SparseVector(P.semiring, P.cols, items)


def hadamard_rowsparse(
    terms: Sequence[RowSparseMatrix], sr: Semiring | None = None
) -> RowSparseMatrix:
    """Entrywise product of row-sparse matrices; support intersects."""
    if not terms:
        raise DimensionError("hadamard of an empty term list")
    shape = (terms[0].rows, terms[0].cols)
    for t in terms[1:]:
        if (t.rows, t.cols) != shape:
            raise DimensionError(f"shape mismatch: {shape} vs {(t.rows, t.cols)}")
    if len(terms) == 1:
        return terms[0]
    sr = _resolve_sr(sr, *terms)
    support0 = terms[0].support0
    for t in terms[1:]:
        support0 = np.intersect1d(support0, t.support0, assume_unique=True)
    rows_acc = None
    for t in terms:
        sel = np.searchsorted(t.support0, support0)
        block = t.data[sel, :] if support0.size else t.data[:0, :]
        rows_acc = block if rows_acc is None else sr.vmul(rows_acc, block)
    return RowSparseMatrix(terms[0].semiring, shape[0], shape[1], support0, rows_acc)


def hadamard_sparsevec(
    terms: Sequence[SparseVector], sr: Semiring | None = None
) -> SparseVector:
    """Entrywise product of sparse vectors; index sets intersect."""
    if not terms:
        raise DimensionError("hadamard of an empty term list")
    length = terms[0].length
    for t in terms[1:]:
        if t.length != length:
            raise DimensionError(f"length mismatch: {length} vs {t.length}")
    if len(terms) == 1:
        return terms[0]
    sr = _resolve_sr(sr, *terms)
    idx0 = terms[0].idx0
    for t in terms[1:]:
        idx0 = np.intersect1d(idx0, t.idx0, assume_unique=True)
    zero = base_of(sr).zero
    items = []
    for i in idx0:
        val = None
        for t in terms:
            v = int(t.vals[np.searchsorted(t.idx0, i)])
            val = v if val is None else sr.mul(val, v)
        if val != zero:
            items.append((int(i) + 1, val))
    return SparseVector(terms[0].semiring, length, items)


def dense_times_rowsparse(
    M: DenseMatrix, H: RowSparseMatrix, sr: Semiring | None = None
) -> DenseMatrix:
    """M @ H touching only H's support rows.

    Counts exactly M.rows * |support(H)| * H.cols multiplications.
    """
    if M.cols != H.rows:
        raise DimensionError(f"M is {M.rows}x{M.cols}, H is {H.rows}x{H.cols}")
    sr = _resolve_sr(sr, M, H)
    acc = sr.zeros((M.rows, H.cols))
    for k, r0 in enumerate(H.support0):
        outer = sr.vmul(M.data[:, r0][:, None], H.data[k, :][None, :])
        acc = sr.vadd(acc, outer)
    return DenseMatrix(M.semiring, acc, validate=False)


def dense_times_sparsevec(
    M: DenseMatrix, u: SparseVector, sr: Semiring | None = None
) -> DenseVector:
    """M @ u touching only u's index set.

    Counts exactly M.rows * nnz(u) multiplications.
    """
    if M.cols != u.length:
        raise DimensionError(f"M is {M.rows}x{M.cols}, u has length {u.length}")
    sr = _resolve_sr(sr, M, u)
    acc = sr.zeros((M.rows,))
    for i0, v in zip(u.idx0, u.vals):
        term = sr.vmul(v, M.data[:, i0])
        acc = sr.vadd(acc, term)
    return DenseVector(M.semiring, acc, validate=False)


def column(V: DenseMatrix, i: int) -> DenseVector:
    """Copy of column i (1-based). No semiring work."""
    if not (1 <= i <= V.cols):
        raise IndexError(f"column {i} outside [1,{V.cols}]")
    return DenseVector(V.semiring, V.data[:, i - 1].copy(), validate=False)


def transpose(A: DenseMatrix) -> DenseMatrix:
    """A^T. Pure data movement, no semiring work."""
    return DenseMatrix(A.semiring, A.data.T.copy(), validate=False)


def matmul_dense(A: DenseMatrix, B: DenseMatrix, sr: Semiring | None = None) -> DenseMatrix:
    """Schoolbook A @ B.

    Counts exactly A.rows * A.cols * B.cols multiplications (and the same
    number of additions, fold-from-zero). Two execution orders are used
    depending on the aspect ratio; both perform the identical logical
    work.
    """
    if A.cols != B.rows:
        raise DimensionError(f"A is {A.rows}x{A.cols}, B is {B.rows}x{B.cols}")
    sr = _resolve_sr(sr, A, B)
    inner = A.cols
    if inner <= max(A.rows, B.cols):
        acc = sr.zeros((A.rows, B.cols))
        for t in range(inner):
            outer = sr.vmul(A.data[:, t][:, None], B.data[t, :][None, :])
            acc = sr.vadd(acc, outer)
        return DenseMatrix(A.semiring, acc, validate=False)
    out = base_of(sr).zeros((A.rows, B.cols))
    for i in range(A.rows):
        prod = sr.vmul(A.data[i, :][:, None], B.data)
        out[i, :] = sr.vsum(prod, axis=0)
    return DenseMatrix(A.semiring, out, validate=False)
