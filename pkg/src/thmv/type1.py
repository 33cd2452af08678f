"""Three-phase oracle for the square-matrix (type-1) hinted product.

Phase 1 takes M and V_1..V_k (all n x n); phase 2 takes the sparse hints
P_1..P_k (each at most ceil(n^tau) nonzeros in strict mode); phase 3
answers column queries of

    M (oP)^T (oV)  with  oX = X_1 o ... o X_k  (Khatri-Rao).

Two strategies are provided and must agree exactly:

* method 1 (eager): the hint phase computes the whole n x n answer
  matrix as M applied to the Hadamard product of the P_j^T V_j factors,
  so each query is a column copy costing zero semiring operations.
* method 2 (lazy): the hint phase only stores the hints; each query
  assembles M (hadamard_j P_j^T v_j) from sparse pieces.

Phase 1 performs no semiring work for either strategy; the phase
boundary is still recorded so cost reports are uniform. Oracles are
single-context: hint once, then query as often as you like.
"""

from __future__ import annotations

import time
from typing import Sequence

from .costmodel import PhaseCost
from .errors import BudgetError, DimensionError, PhaseError
from .matrix import (
    DenseMatrix,
    DenseVector,
    SparseMatrix,
    column,
    dense_times_rowsparse,
    dense_times_sparsevec,
    hadamard_rowsparse,
    hadamard_sparsevec,
    nnz_budget,
    transpose_times_dense,
    transpose_times_vector,
)
from .semiring import CountingSemiring, OpCounter

METHOD_EAGER = 1
METHOD_LAZY = 2

PHASE_PREPROCESSED = "preprocessed"
PHASE_HINTED = "hinted"

_PHASE_LABELS = ("P1", "P2", "P3")


class Type1Oracle:
    """Phase-ordered state machine for the type-1 hinted product.

    Constructing the oracle is phase 1 (preprocessing). ``strict`` mode
    enforces the per-hint nonzero budget ceil(n^tau); permissive mode
    allows any nnz for sweeps.
    """

    def __init__(
        self,
        M: DenseMatrix,
        Vs: Sequence[DenseMatrix],
        tau: float,
        method: int = METHOD_LAZY,
        *,
        strict: bool = True,
        counter: OpCounter | None = None,
    ):
        t0 = time.perf_counter_ns()
        if method not in (METHOD_EAGER, METHOD_LAZY):
            raise ValueError(f"method must be 1 or 2, got {method}")
        if not Vs:
            raise DimensionError("k must be a positive integer (no V matrices given)")
        if not (0.0 < tau <= 1.0):
            raise ValueError(f"tau must lie in (0, 1], got {tau}")
        n = M.rows
        if M.cols != n:
            raise DimensionError(f"M must be square, got {M.rows}x{M.cols}")
        for j, V in enumerate(Vs, start=1):
            if V.shape() != (n, n):
                raise DimensionError(f"V_{j} is {V.rows}x{V.cols}, expected {n}x{n}")
            if V.semiring.name != M.semiring.name:
                raise DimensionError("M and V matrices use different semirings")
        self.n = n
        self.k = len(Vs)
        self.tau = tau
        self.method = method
        self.strict = strict
        self.budget = nnz_budget(n, tau)
        self.M = M
        self.Vs = tuple(Vs)
        self.counter = counter if counter is not None else OpCounter()
        self._sr = CountingSemiring(M.semiring, self.counter)
        self._answer: DenseMatrix | None = None
        self._hint: tuple[SparseMatrix, ...] | None = None
        self.phase = PHASE_PREPROCESSED
        # No preprocessing computation is performed; record the boundary.
        self.costs = {"P1": (0, 0, time.perf_counter_ns() - t0)}

    def hint(self, Ps: Sequence[SparseMatrix]) -> None:
        """Phase 2. Eager: compute and store the full answer matrix.
        Lazy: store the hints untouched."""
        if self.phase != PHASE_PREPROCESSED:
            raise PhaseError(f"hint is only legal once, in phase {PHASE_PREPROCESSED!r}")
        if len(Ps) != self.k:
            raise DimensionError(f"expected {self.k} hint matrices, got {len(Ps)}")
        for j, P in enumerate(Ps, start=1):
            if (P.rows, P.cols) != (self.n, self.n):
                raise DimensionError(f"P_{j} is {P.rows}x{P.cols}, expected square n={self.n}")
            if P.semiring.name != self.M.semiring.name:
                raise DimensionError("hint semiring differs from instance semiring")
            if self.strict and P.nnz > self.budget:
                raise BudgetError(
                    f"P_{j} has nnz={P.nnz} > budget {self.budget} (strict mode)"
                )
        t0 = time.perf_counter_ns()
        before = self.counter.snapshot()
        if self.method == METHOD_EAGER:
            hs = [transpose_times_dense(P, V, self._sr) for P, V in zip(Ps, self.Vs)]
            h = hadamard_rowsparse(hs, self._sr)
            self._answer = dense_times_rowsparse(self.M, h, self._sr)
        else:
            self._hint = tuple(Ps)
        adds, muls = self.counter.snapshot()
        self.costs["P2"] = (adds - before[0], muls - before[1], time.perf_counter_ns() - t0)
        self.costs.setdefault("P3", (0, 0, 0))
        self.phase = PHASE_HINTED

    def query(self, i: int) -> DenseVector:
        """Phase 3: column i (1-based) of the hinted product. Repeatable."""
        if self.phase != PHASE_HINTED:
            raise PhaseError("query requires the oracle to be hinted")
        if not (1 <= i <= self.n):
            raise IndexError(f"query index {i} outside [1,{self.n}]")
        t0 = time.perf_counter_ns()
        before = self.counter.snapshot()
        if self.method == METHOD_EAGER:
            out = column(self._answer, i)
        else:
            us = [
                transpose_times_vector(P, column(V, i), self._sr)
                for P, V in zip(self._hint, self.Vs)
            ]
            u = hadamard_sparsevec(us, self._sr)
            out = dense_times_sparsevec(self.M, u, self._sr)
        adds, muls = self.counter.snapshot()
        pa, pm, pt = self.costs["P3"]
        self.costs["P3"] = (
            pa + adds - before[0],
            pm + muls - before[1],
            pt + time.perf_counter_ns() - t0,
        )
        return out

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
