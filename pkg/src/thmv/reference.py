"""Brute-force ground-truth oracles.

These materialize every exponential object at desk scale and evaluate the
defining formulas literally. They never touch the strategy code in
type1/type2 (only dense products and Khatri-Rao materialization, plus a
plain loop nest for the tensor case) and they do no cost accounting, so
they cannot pollute exponent fits. Expect them to be orders of magnitude
slower than the oracles they check.
"""

from __future__ import annotations

from typing import Sequence

from .errors import CapError
from .khatri_rao import MATERIALIZE_CAP, FactorList, kr_materialize, unflatten
from .matrix import (
    DenseMatrix,
    DenseVector,
    SparseMatrix,
    column,
    matmul_dense,
    transpose,
)
from .type2 import DiagonalTensor, SliceQuery, TensorMatrixView, _split_dirs


def ref_type1(
    M: DenseMatrix,
    Vs: Sequence[DenseMatrix],
    Ps: Sequence[SparseMatrix],
    i: int,
    cap: int = MATERIALIZE_CAP,
) -> DenseVector:
    """Column i of M (oP)^T (oV), evaluated by materializing both
    Khatri-Rao products and running schoolbook multiplies."""
    kp = kr_materialize(FactorList([P.densify() for P in Ps]), cap=cap)
    kv = kr_materialize(FactorList(list(Vs)), cap=cap)
    v = column(kv, i)
    vcol = DenseMatrix(v.semiring, v.data[:, None], validate=False)
    w = matmul_dense(transpose(kp), vcol)
    ans = matmul_dense(M, w)
    return DenseVector(M.semiring, ans.data[:, 0].copy(), validate=False)


def ref_type2(
    Vs: Sequence[DenseMatrix],
    P: DiagonalTensor,
    q: SliceQuery,
    cap: int = MATERIALIZE_CAP,
) -> TensorMatrixView:
    """The queried slice, evaluated cell by cell from the definition:

        T[i_1..i_k] = sum_{j in diag} P_j * prod_l (V_l)_{i_l, j}

    with the fixed directions pinned to the query's indices.
    """
    sr = Vs[0].semiring
    n = Vs[0].rows
    k = len(Vs)
    fixed = dict(q.pairs)
    free = [m for m in range(1, k + 1) if m not in fixed]
    row_dirs, col_dirs = _split_dirs(free)
    rows, cols = n ** len(row_dirs), n ** len(col_dirs)
    if max(rows, cols) > cap:
        raise CapError(f"slice with {rows}x{cols} cells exceeds cap {cap}")
    diag = P.entries()
    out = sr.zeros((rows, cols))
    for r in range(rows):
        r_multi = unflatten(r + 1, (n,) * len(row_dirs)) if row_dirs else ()
        for c in range(cols):
            c_multi = unflatten(c + 1, (n,) * len(col_dirs)) if col_dirs else ()
            coords = dict(fixed)
            coords.update(zip(row_dirs, r_multi))
            coords.update(zip(col_dirs, c_multi))
            acc = sr.zero
            for j, val in diag:
                term = val
                for m in range(1, k + 1):
                    term = sr.mul(term, int(Vs[m - 1].data[coords[m] - 1, j - 1]))
                acc = sr.add(acc, term)
            out[r, c] = acc
    data = DenseMatrix(sr, out, validate=False)
    return TensorMatrixView(n, row_dirs, col_dirs, data)
