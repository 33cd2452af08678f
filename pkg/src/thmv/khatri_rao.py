"""Column-wise Kronecker (Khatri-Rao) products kept virtual.

A product of factors K_1 (n_1 x d), ..., K_k (n_k x d) has one row per
multi-index (i_1, ..., i_k); its entry in column j is the product of the
factors' (i_l, j) entries. The full matrix has prod(n_l) rows, so it is
represented by its factor list and only ever materialized behind a
desk-scale row cap (reference oracles). The Gram matrix of two such
products factorizes as the Hadamard product of the per-level Gram
matrices, which is the identity that keeps every fast path polynomial in
k; ``gram`` computes it without touching the exponential row dimension.

Flat row indices are 1-based mixed-radix values:

    flat = sum_{l<k} (i_l - 1) * prod_{l'>l} n_l' + i_k
"""

from __future__ import annotations

from typing import Sequence

from .errors import CapError, DimensionError
from .matrix import DenseMatrix, DenseVector, matmul_dense, transpose
from .semiring import Semiring

# Reference-oracle guard: materialized products stay at desk scale.
MATERIALIZE_CAP = 2**20


def flat_index(multi: Sequence[int], dims: Sequence[int]) -> int:
    """Map a 1-based multi-index to its 1-based flat row index."""
    if len(multi) != len(dims) or not dims:
        raise DimensionError(f"multi-index {multi} does not match dims {dims}")
    flat = 0
    for i, n in zip(multi, dims):
        if not (1 <= i <= n):
            raise IndexError(f"component {i} outside [1,{n}]")
        flat = flat * n + (i - 1)
    return flat + 1


def unflatten(flat: int, dims: Sequence[int]) -> tuple[int, ...]:
    """Inverse of flat_index."""
    total = 1
    for n in dims:
        if n < 1:
            raise DimensionError(f"dims must be positive, got {dims}")
        total *= n
    if not (1 <= flat <= total):
        raise IndexError(f"flat index {flat} outside [1,{total}]")
    rem = flat - 1
    out = []
    for n in reversed(dims):
        out.append(rem % n + 1)
        rem //= n
    return tuple(reversed(out))


class FactorList:
    """An unmaterialized Khatri-Rao product, held as its factors.

    All factors share a column count d and a semiring; the virtual shape
    is (prod of factor row counts) x d.
    """

    __slots__ = ("factors", "dims", "d", "total_rows", "semiring")

    def __init__(self, factors: Sequence[DenseMatrix]):
        if not factors:
            raise DimensionError("factor list must hold at least one factor")
        d = factors[0].cols
        name = factors[0].semiring.name
        for f in factors[1:]:
            if f.cols != d:
                raise DimensionError(f"factor column counts differ: {d} vs {f.cols}")
            if f.semiring.name != name:
                raise DimensionError("factors use different semirings")
        self.factors = tuple(factors)
        self.dims = tuple(f.rows for f in factors)
        self.d = d
        total = 1
        for n in self.dims:
            total *= n
        self.total_rows = total
        self.semiring = factors[0].semiring

    @property
    def k(self) -> int:
        return len(self.factors)

    def __repr__(self) -> str:
        return f"FactorList(k={self.k}, dims={self.dims}, d={self.d})"


def kr_row(f: FactorList, flat: int, sr: Semiring | None = None) -> DenseVector:
    """Row ``flat`` of the virtual product: the entrywise product of the
    corresponding factor rows."""
    sr = sr if sr is not None else f.semiring
    multi = unflatten(flat, f.dims)
    row = f.factors[0].data[multi[0] - 1, :]
    for factor, i in zip(f.factors[1:], multi[1:]):
        row = sr.vmul(row, factor.data[i - 1, :])
    if len(f.factors) == 1:
        row = row.copy()
    return DenseVector(f.semiring, row, validate=False)


def kr_materialize(
    f: FactorList, cap: int = MATERIALIZE_CAP, sr: Semiring | None = None
) -> DenseMatrix:
    """Materialize the full total_rows x d matrix.

    Refuses to allocate past ``cap`` rows; the virtual representation is
    the production path and this is for reference oracles and hint-time
    half-products only.
    """
    if f.total_rows > cap:
        raise CapError(
            f"materializing {f.total_rows} rows exceeds cap {cap}; "
            "reference oracle only at desk scale"
        )
    sr = sr if sr is not None else f.semiring
    cur = f.factors[0].data
    if len(f.factors) == 1:
        cur = cur.copy()
    for factor in f.factors[1:]:
        cur = sr.vmul(cur[:, None, :], factor.data[None, :, :]).reshape(-1, f.d)
    return DenseMatrix(f.semiring, cur, validate=False)


def gram(As: FactorList, Bs: FactorList, sr: Semiring | None = None) -> DenseMatrix:
    """(oA)^T (oB) for Khatri-Rao products oA, oB with matching dims,
    computed as the Hadamard product of per-level Gram matrices.

    Never allocates anything proportional to the product row dimension:
    the cost is k schoolbook d_a x n_l x d_b products plus (k-1) * d_a * d_b
    Hadamard multiplications.
    """
    if As.dims != Bs.dims:
        raise DimensionError(f"dims differ: {As.dims} vs {Bs.dims}")
    if As.semiring.name != Bs.semiring.name:
        raise DimensionError("factor lists use different semirings")
    sr = sr if sr is not None else As.semiring
    out = None
    for a, b in zip(As.factors, Bs.factors):
        level = matmul_dense(transpose(a), b, sr)
        out = level.data if out is None else sr.vmul(out, level.data)
    return DenseMatrix(As.semiring, out, validate=False)
