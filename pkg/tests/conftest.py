"""Shared helpers: seeded random builders and independent oracle loops.

The py_* functions are deliberately plain Python over nested lists so the
package's vectorized kernels are checked against arithmetic that shares
no code with them.
"""

from __future__ import annotations

import numpy as np

from thmv import DenseMatrix, DenseVector, SparseMatrix, get_semiring


def rand_dense(rng, sr, rows, cols, density=0.5, hi=3):
    if sr.name == "bool":
        data = (rng.random((rows, cols)) < density).astype(np.int8)
    else:
        mask = rng.random((rows, cols)) < density
        data = (mask * rng.integers(1, hi + 1, size=(rows, cols))).astype(object)
    return DenseMatrix(sr, data)


def rand_vector(rng, sr, length, density=0.5, hi=3):
    if sr.name == "bool":
        data = (rng.random(length) < density).astype(np.int8)
    else:
        mask = rng.random(length) < density
        data = (mask * rng.integers(1, hi + 1, size=length)).astype(object)
    return DenseVector(sr, data)


def rand_sparse(rng, sr, rows, cols, nnz):
    cells = rng.choice(rows * cols, size=nnz, replace=False)
    entries = []
    for cell in sorted(int(c) for c in cells):
        r, c = divmod(cell, cols)
        v = 1 if sr.name == "bool" else int(rng.integers(1, 4))
        entries.append((r + 1, c + 1, v))
    return SparseMatrix(sr, rows, cols, entries)


def py_matmul(sr, A, B):
    """Schoolbook product of nested lists via scalar semiring ops."""
    ra, inner, cb = len(A), len(A[0]), len(B[0])
    assert len(B) == inner
    out = [[sr.zero] * cb for _ in range(ra)]
    for i in range(ra):
        for j in range(cb):
            acc = sr.zero
            for t in range(inner):
                acc = sr.add(acc, sr.mul(A[i][t], B[t][j]))
            out[i][j] = acc
    return out


def py_transpose(A):
    return [list(row) for row in zip(*A)]


def py_hadamard(sr, A, B):
    return [[sr.mul(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def py_matvec(sr, A, v):
    return [
        _py_dot(sr, row, v)
        for row in A
    ]


def _py_dot(sr, xs, ys):
    acc = sr.zero
    for x, y in zip(xs, ys):
        acc = sr.add(acc, sr.mul(x, y))
    return acc


BOTH_SEMIRINGS = [get_semiring("bool"), get_semiring("nat")]
