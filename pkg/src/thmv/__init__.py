"""Three-phase hinted matrix-vector oracles over commutative semirings.

The hinted product problem: preprocess dense inputs, receive a sparse
hint, then answer queries about a product that combines all of them.
This package implements the square-matrix (type 1) and diagonal-tensor
(type 2) variants with an eager and a lazy strategy each, brute-force
reference oracles, and an instrumented cost model that counts semiring
operations per phase and fits their growth exponents.
"""

from .costmodel import ExponentFit, PhaseCost, fit_exponent
from .errors import (
    BudgetError,
    CapError,
    CarrierError,
    DimensionError,
    FitError,
    FormatError,
    PhaseError,
    SemiringOverflowError,
    ThmvError,
)
from .genrand import GenConfig, gen_type1, gen_type2
from .khatri_rao import (
    MATERIALIZE_CAP,
    FactorList,
    flat_index,
    gram,
    kr_materialize,
    kr_row,
    unflatten,
)
from .matrix import (
    DenseMatrix,
    DenseVector,
    RowSparseMatrix,
    SparseMatrix,
    SparseVector,
    column,
    dense_times_rowsparse,
    dense_times_sparsevec,
    hadamard_rowsparse,
    hadamard_sparsevec,
    matmul_dense,
    nnz_budget,
    transpose,
    transpose_times_dense,
    transpose_times_vector,
)
from .reference import ref_type1, ref_type2
from .semiring import (
    BOOLEAN,
    NATURAL,
    NATURAL_MAX,
    CountingSemiring,
    OpCounter,
    Semiring,
    get_semiring,
)
from .type1 import METHOD_EAGER, METHOD_LAZY, Type1Oracle
from .type2 import DiagonalTensor, SliceQuery, TensorMatrixView, Type2Oracle, select_factors

__version__ = "0.1.0"
