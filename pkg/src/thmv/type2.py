"""Three-phase oracle for the diagonal-tensor (type-2) hinted product.

Phase 1 takes k matrices V_1..V_k (each n x d); phase 2 takes an order-k
diagonal tensor P of side d with at most ceil(n^tau) nonzero diagonal
cells; phase 3 fixes any subset of the k directions at chosen indices and
returns the remaining slice of

    T[i_1,...,i_k] = sum_{j in diag} P_jj...j * (V_1)_{i_1,j} * ... * (V_k)_{i_k,j}.

Slices are returned as matrix views: the free directions, in ascending
order, are split so the first ceil(m/2) of m index rows and the rest
index columns, both through the mixed-radix flat map. Strategies:

* method 1 (eager): the hint phase materializes the full tensor's matrix
  view as W_1 W_2^T, where W_1 and W_2 are the Khatri-Rao halves of the
  P-selected (and P-rescaled) factor columns; queries read entries out.
* method 2 (lazy): the hint phase stores P; each query folds the fixed
  rows and the diagonal weights into the first free factor, then builds
  the two halves fresh for the free directions only.

Both strategies return identical views for identical queries. Fixing all
k directions yields a 1x1 scalar view; fixing none yields the full
tensor view (both limits are deliberate generalizations of the usual
1 <= s <= k-1 queries).
"""

from __future__ import annotations

import time
from typing import Iterable, Sequence

import numpy as np

from .costmodel import PhaseCost
from .errors import BudgetError, CapError, DimensionError, PhaseError
from .khatri_rao import MATERIALIZE_CAP, FactorList, flat_index, kr_materialize
from .matrix import DenseMatrix, matmul_dense, nnz_budget, transpose
from .semiring import CountingSemiring, OpCounter, Semiring, base_of
from .type1 import METHOD_EAGER, METHOD_LAZY, PHASE_HINTED, PHASE_PREPROCESSED

_PHASE_LABELS = ("P1", "P2", "P3")


class DiagonalTensor:
    """Order-k diagonal tensor of side d: cell (j,...,j) holds value_j.

    Entries are (j, value) with 1-based j, sorted, unique, nonzero. With
    ``budget`` set, construction fails when the diagonal support exceeds
    it.
    """

    __slots__ = ("semiring", "order", "dim", "idx0", "vals")

    def __init__(
        self,
        semiring: Semiring,
        order: int,
        dim: int,
        entries: Iterable[tuple[int, int]],
        *,
        budget: int | None = None,
    ):
        semiring = base_of(semiring)
        if order < 1:
            raise DimensionError(f"tensor order must be >= 1, got {order}")
        if dim < 1:
            raise DimensionError(f"tensor side must be >= 1, got {dim}")
        pairs = []
        seen = set()
        for j, v in entries:
            if not (1 <= j <= dim):
                raise DimensionError(f"diagonal index {j} outside [1,{dim}]")
            if j in seen:
                raise ValueError(f"duplicate diagonal index {j}")
            seen.add(j)
            v = semiring.check(v)
            if v == semiring.zero:
                raise ValueError(f"stored zero at diagonal index {j}")
            pairs.append((j - 1, v))
        if budget is not None and len(pairs) > budget:
            raise BudgetError(f"diagonal nnz {len(pairs)} exceeds budget {budget}")
        pairs.sort()
        self.semiring = semiring
        self.order = order
        self.dim = dim
        self.idx0 = np.array([p[0] for p in pairs], dtype=np.int64)
        self.vals = semiring.asarray([p[1] for p in pairs], validate=False)

    @property
    def nnz(self) -> int:
        return len(self.idx0)

    def entries(self) -> list[tuple[int, int]]:
        return [(int(j) + 1, int(v)) for j, v in zip(self.idx0, self.vals)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DiagonalTensor)
            and self.semiring.name == other.semiring.name
            and (self.order, self.dim) == (other.order, other.dim)
            and self.entries() == other.entries()
        )

    def __repr__(self) -> str:
        return f"DiagonalTensor(order={self.order}, dim={self.dim}, nnz={self.nnz})"


class SliceQuery:
    """A set of (direction, index) pairs fixing distinct directions.

    Directions are 1-based in [k]; indices are 1-based in [n] and may
    repeat across pairs. s = 0 (full tensor) and s = k (scalar) are both
    allowed.
    """

    __slots__ = ("pairs",)

    def __init__(self, pairs: Iterable[tuple[int, int]] = ()):
        pairs = tuple((int(l), int(i)) for l, i in pairs)
        dirs = [l for l, _ in pairs]
        if len(set(dirs)) != len(dirs):
            raise DimensionError(f"repeated direction in slice query: {dirs}")
        self.pairs = pairs

    @property
    def s(self) -> int:
        return len(self.pairs)

    def directions(self) -> tuple[int, ...]:
        return tuple(l for l, _ in self.pairs)

    def __eq__(self, other) -> bool:
        return isinstance(other, SliceQuery) and self.pairs == other.pairs

    def __repr__(self) -> str:
        return f"SliceQuery({list(self.pairs)})"


class TensorMatrixView:
    """A tensor slice flattened to a matrix.

    ``row_dirs`` and ``col_dirs`` list the free directions (ascending
    overall: row_dirs is the first ceil(m/2) of the m free directions)
    and ``data`` has shape n^len(row_dirs) x n^len(col_dirs), addressed
    by the mixed-radix flat map over each group.
    """

    __slots__ = ("n", "row_dirs", "col_dirs", "data")

    def __init__(
        self,
        n: int,
        row_dirs: Sequence[int],
        col_dirs: Sequence[int],
        data: DenseMatrix,
    ):
        row_dirs = tuple(row_dirs)
        col_dirs = tuple(col_dirs)
        if data.rows != n ** len(row_dirs) or data.cols != n ** len(col_dirs):
            raise DimensionError(
                f"view data {data.rows}x{data.cols} does not match "
                f"n={n}, row_dirs={row_dirs}, col_dirs={col_dirs}"
            )
        self.n = n
        self.row_dirs = row_dirs
        self.col_dirs = col_dirs
        self.data = data

    @property
    def semiring(self) -> Semiring:
        return self.data.semiring

    @property
    def free_dirs(self) -> tuple[int, ...]:
        return self.row_dirs + self.col_dirs

    def entry(self, coords: dict[int, int]) -> int:
        """Value at the given {direction: index} assignment (1-based)."""
        if set(coords) != set(self.free_dirs):
            raise DimensionError(
                f"coords {sorted(coords)} must assign exactly the free "
                f"directions {sorted(self.free_dirs)}"
            )
        r = flat_index([coords[d] for d in self.row_dirs], (self.n,) * len(self.row_dirs)) if self.row_dirs else 1
        c = flat_index([coords[d] for d in self.col_dirs], (self.n,) * len(self.col_dirs)) if self.col_dirs else 1
        return int(self.data.data[r - 1, c - 1])

    def scalar(self) -> int:
        if self.free_dirs:
            raise DimensionError("scalar() requires a fully fixed view")
        return int(self.data.data[0, 0])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TensorMatrixView)
            and self.n == other.n
            and self.row_dirs == other.row_dirs
            and self.col_dirs == other.col_dirs
            and self.data == other.data
        )

    def __repr__(self) -> str:
        return (
            f"TensorMatrixView(n={self.n}, rows={self.row_dirs}, "
            f"cols={self.col_dirs})"
        )


def _split_dirs(dirs: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Ascending free directions split first-ceil(m/2) / rest."""
    dirs = tuple(sorted(dirs))
    m = len(dirs)
    head = m - m // 2
    return dirs[:head], dirs[head:]


def _fixed_weights(
    Vs: Sequence[DenseMatrix], P: DiagonalTensor, pairs: Sequence[tuple[int, int]], sr
) -> np.ndarray:
    """q_j = value_j * prod over fixed pairs of (V_l)_{i,j}, for j in diag.

    Counts s multiplications per diagonal cell.
    """
    qs = P.vals
    for l, i in pairs:
        row_sel = Vs[l - 1].data[i - 1, P.idx0]
        qs = sr.vmul(qs, row_sel)
    if not pairs:
        qs = qs.copy()
    return qs


def select_factors(
    Vs: Sequence[DenseMatrix],
    P: DiagonalTensor,
    fixed: SliceQuery,
    sr: Semiring | None = None,
):
    """Column-select (and rescale) the free factors for a slice.

    For free directions m_1 < ... < m_{k-s}, the factor for m_1 takes the
    diagonal-selected columns of V_{m_1} scaled by q_j (the diagonal value
    times every fixed row's entry, folded here once); the other free
    factors are plain column selections. Returns the list of n x nnz(P)
    factors, or, when every direction is fixed (s = k), the scalar
    sum_j q_j wrapped as a 1x1 view.
    """
    k = len(Vs)
    sr = sr if sr is not None else Vs[0].semiring
    _validate_query(fixed, k, Vs[0].rows)
    fixed_dirs = set(fixed.directions())
    free = [m for m in range(1, k + 1) if m not in fixed_dirs]
    if P.nnz == 0 and free:
        raise DimensionError(
            "cannot select factors from an empty diagonal; the slice is zero"
        )
    qs = _fixed_weights(Vs, P, fixed.pairs, sr)
    if not free:
        if len(qs):
            total = qs[0]
            for v in qs[1:]:
                total = sr.add(total, v)
            total = int(total)
        else:
            total = base_of(sr).zero
        data = DenseMatrix(Vs[0].semiring, base_of(sr).asarray([[total]]), validate=False)
        return TensorMatrixView(Vs[0].rows, (), (), data)
    us = []
    for pos, m in enumerate(free):
        cols = Vs[m - 1].data[:, P.idx0]
        if pos == 0:
            cols = sr.vmul(cols, qs[None, :])
        else:
            cols = cols.copy()
        us.append(DenseMatrix(Vs[0].semiring, cols, validate=False))
    return us


def _validate_query(q: SliceQuery, k: int, n: int) -> None:
    for l, i in q.pairs:
        if not (1 <= l <= k):
            raise DimensionError(f"direction {l} outside [1,{k}]")
        if not (1 <= i <= n):
            raise IndexError(f"index {i} outside [1,{n}]")


def _half_product(
    us: Sequence[DenseMatrix], head_count: int, sr, cap: int
) -> tuple[DenseMatrix, DenseMatrix]:
    """Materialize the two Khatri-Rao halves of the factor list.

    An empty half is the empty product: a 1 x t all-ones row (no counted
    work), so the view correctly degenerates to a single row or column.
    """
    t = us[0].cols
    semiring = us[0].semiring

    def materialize(group: Sequence[DenseMatrix]) -> DenseMatrix:
        if not group:
            return DenseMatrix(semiring, semiring.ones((1, t)), validate=False)
        return kr_materialize(FactorList(group), cap=cap, sr=sr)

    return materialize(us[:head_count]), materialize(us[head_count:])


class Type2Oracle:
    """Phase-ordered state machine for the type-2 hinted product."""

    def __init__(
        self,
        Vs: Sequence[DenseMatrix],
        tau: float,
        method: int = METHOD_LAZY,
        *,
        strict: bool = True,
        counter: OpCounter | None = None,
        cap: int = MATERIALIZE_CAP,
    ):
        t0 = time.perf_counter_ns()
        if method not in (METHOD_EAGER, METHOD_LAZY):
            raise ValueError(f"method must be 1 or 2, got {method}")
        if not Vs:
            raise DimensionError("k must be a positive integer (no V matrices given)")
        if tau <= 0.0:
            raise ValueError(f"tau must be positive, got {tau}")
        n, d = Vs[0].rows, Vs[0].cols
        for j, V in enumerate(Vs, start=1):
            if V.shape() != (n, d):
                raise DimensionError(f"V_{j} is {V.rows}x{V.cols}, expected {n}x{d}")
            if V.semiring.name != Vs[0].semiring.name:
                raise DimensionError("V matrices use different semirings")
        self.n = n
        self.d = d
        self.k = len(Vs)
        self.tau = tau
        self.method = method
        self.strict = strict
        self.cap = cap
        self.budget = min(nnz_budget(n, tau), d)
        self.Vs = tuple(Vs)
        self.counter = counter if counter is not None else OpCounter()
        self._sr = CountingSemiring(Vs[0].semiring, self.counter)
        self._view: TensorMatrixView | None = None
        self._hint: DiagonalTensor | None = None
        self.phase = PHASE_PREPROCESSED
        self.costs = {"P1": (0, 0, time.perf_counter_ns() - t0)}

    def hint(self, P: DiagonalTensor) -> None:
        """Phase 2. Eager: materialize the full tensor's matrix view as
        W_1 W_2^T. Lazy: store P untouched."""
        if self.phase != PHASE_PREPROCESSED:
            raise PhaseError(f"hint is only legal once, in phase {PHASE_PREPROCESSED!r}")
        if P.order != self.k or P.dim != self.d:
            raise DimensionError(
                f"hint tensor is order {P.order} side {P.dim}, "
                f"expected order {self.k} side {self.d}"
            )
        if P.semiring.name != self.Vs[0].semiring.name:
            raise DimensionError("hint semiring differs from instance semiring")
        if self.strict and P.nnz > self.budget:
            raise BudgetError(f"diagonal nnz={P.nnz} > budget {self.budget} (strict mode)")
        t0 = time.perf_counter_ns()
        before = self.counter.snapshot()
        if self.method == METHOD_EAGER:
            self._view = self._assemble(P, SliceQuery())
        else:
            self._hint = P
        adds, muls = self.counter.snapshot()
        self.costs["P2"] = (adds - before[0], muls - before[1], time.perf_counter_ns() - t0)
        self.costs.setdefault("P3", (0, 0, 0))
        self.phase = PHASE_HINTED

    def query(self, q: SliceQuery) -> TensorMatrixView:
        """Phase 3: the slice with q's directions fixed. Repeatable."""
        if self.phase != PHASE_HINTED:
            raise PhaseError("query requires the oracle to be hinted")
        _validate_query(q, self.k, self.n)
        t0 = time.perf_counter_ns()
        before = self.counter.snapshot()
        if self.method == METHOD_EAGER:
            out = self._slice_view(q)
        else:
            out = self._assemble(self._hint, q)
        adds, muls = self.counter.snapshot()
        pa, pm, pt = self.costs["P3"]
        self.costs["P3"] = (
            pa + adds - before[0],
            pm + muls - before[1],
            pt + time.perf_counter_ns() - t0,
        )
        return out

    # -- strategy internals -------------------------------------------------

    def _assemble(self, P: DiagonalTensor, q: SliceQuery) -> TensorMatrixView:
        """Lazy-path slice assembly (also builds the eager full view)."""
        free = [m for m in range(1, self.k + 1) if m not in set(q.directions())]
        if P.nnz == 0 and free:
            # Empty diagonal: the whole tensor is zero; no factor work.
            row_dirs, col_dirs = _split_dirs(free)
            rows = self.n ** len(row_dirs)
            if rows > self.cap:
                raise CapError(f"zero view with {rows} rows exceeds cap {self.cap}")
            data = DenseMatrix.zeros(
                self.Vs[0].semiring, rows, self.n ** len(col_dirs)
            )
            return TensorMatrixView(self.n, row_dirs, col_dirs, data)
        us = select_factors(self.Vs, P, q, self._sr)
        if isinstance(us, TensorMatrixView):
            return us
        row_dirs, col_dirs = _split_dirs(free)
        w1, w2 = _half_product(us, len(row_dirs), self._sr, self.cap)
        data = matmul_dense(w1, transpose(w2), self._sr)
        return TensorMatrixView(self.n, row_dirs, col_dirs, data)

    def _slice_view(self, q: SliceQuery) -> TensorMatrixView:
        """Eager-path slice: read entries out of the stored full view.

        Pure indexing; costs zero semiring operations.
        """
        if q.s == 0:
            return self._view
        full = self._view.data.data.reshape((self.n,) * self.k)
        idx: list = [slice(None)] * self.k
        for l, i in q.pairs:
            idx[l - 1] = i - 1
        sub = np.asarray(full[tuple(idx)])
        free = [m for m in range(1, self.k + 1) if m not in set(q.directions())]
        row_dirs, col_dirs = _split_dirs(free)
        data = sub.reshape((self.n ** len(row_dirs), self.n ** len(col_dirs))).copy()
        return TensorMatrixView(
            self.n,
            row_dirs,
            col_dirs,
            DenseMatrix(self.Vs[0].semiring, data, validate=False),
        )

    def phase_costs(self) -> list[PhaseCost]:
        """Per-phase counter deltas recorded so far."""
        out = []
        for label in _PHASE_LABELS:
            if label in self.costs:
                adds, muls, wall = self.costs[label]
                out.append(
                    PhaseCost(
                        phase=label,
                        method=f"M{self.method}",
                        n=self.n,
                        k=self.k,
                        tau=self.tau,
                        adds=adds,
                        muls=muls,
                        wall_ns=wall,
                    )
                )
        return out
