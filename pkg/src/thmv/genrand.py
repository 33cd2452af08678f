"""Deterministic, seeded random instance generation.

Randomness comes from numpy's PCG64 bit generator, fanned out through
``SeedSequence.spawn`` so every matrix draws from its own child stream in
a fixed order; the same config always reproduces byte-identical
instances. This generator choice is part of the artifact's contract and
is never changed silently.

Sparse hints saturate their budget exactly: nnz is ceil(n^tau) (clamped
to the available cells), with positions drawn uniformly without
replacement. By default the k type-1 hint matrices share one sampled
position set (``shared_hint_support=True``): with independently placed
hints the column supports of the P_j^T V_j factors barely intersect, the
Hadamard product collapses, and phase-3 work degenerates to O(n); the
shared support keeps the hinted product's n^(1+tau)-scale regime
measurable. Set it to False for fully independent hints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import DenseMatrix, SparseMatrix, nnz_budget
from .semiring import BOOLEAN, Semiring, get_semiring
from .type2 import DiagonalTensor


@dataclass(frozen=True)
class GenConfig:
    """Knobs for one generated instance."""

    n: int
    k: int
    tau: float
    semiring: str = "bool"
    seed: int = 0
    d: int | None = None  # type-2 only; defaults to n
    density: float = 0.5  # probability of a nonzero dense cell
    value_range: tuple[int, int] = (1, 3)  # natural-entry values
    shared_hint_support: bool = True

    def validate(self, type2: bool = False) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if type2:
            if self.tau <= 0:
                raise ValueError(f"tau must be positive, got {self.tau}")
            if self.d is not None and self.d < 1:
                raise ValueError(f"d must be >= 1, got {self.d}")
        else:
            if not (0 < self.tau <= 1):
                raise ValueError(f"tau must lie in (0, 1], got {self.tau}")
        if not (0.0 <= self.density <= 1.0):
            raise ValueError(f"density must lie in [0, 1], got {self.density}")
        lo, hi = self.value_range
        if not (1 <= lo <= hi):
            raise ValueError(f"value range must satisfy 1 <= lo <= hi, got {lo}..{hi}")
        get_semiring(self.semiring)


def _dense(rng: np.random.Generator, sr: Semiring, rows: int, cols: int, cfg: GenConfig) -> DenseMatrix:
    mask = rng.random((rows, cols)) < cfg.density
    if sr.name == BOOLEAN.name:
        data = mask.astype(np.int8)
    else:
        lo, hi = cfg.value_range
        vals = rng.integers(lo, hi + 1, size=(rows, cols))
        data = (mask * vals).astype(object)
    return DenseMatrix(sr, data, validate=False)


def _sample_without_replacement(rng: np.random.Generator, upper: int, count: int) -> list[int]:
    """``count`` distinct draws from range(upper), order-insensitive."""
    if count > upper:
        raise ValueError(f"cannot draw {count} distinct values from {upper}")
    chosen: set[int] = set()
    while len(chosen) < count:
        x = int(rng.integers(0, upper))
        chosen.add(x)
    return sorted(chosen)


def _values(rng: np.random.Generator, sr: Semiring, count: int, cfg: GenConfig) -> list[int]:
    if sr.name == BOOLEAN.name:
        return [1] * count
    lo, hi = cfg.value_range
    return [int(v) for v in rng.integers(lo, hi + 1, size=count)]


def gen_type1(cfg: GenConfig) -> tuple[DenseMatrix, list[DenseMatrix], list[SparseMatrix]]:
    """Generate (M, Vs, Ps) for a type-1 instance.

    Every P_j carries exactly min(ceil(n^tau), n*n) nonzeros; see the
    module docstring for the shared-support default.
    """
    cfg.validate(type2=False)
    sr = get_semiring(cfg.semiring)
    n, k = cfg.n, cfg.k
    budget = min(nnz_budget(n, cfg.tau), n * n)
    # Fixed stream layout: M, V_1..V_k, positions_1..k, values_1..k.
    children = np.random.SeedSequence(cfg.seed).spawn(1 + 3 * k)
    rngs = [np.random.Generator(np.random.PCG64(c)) for c in children]
    M = _dense(rngs[0], sr, n, n, cfg)
    Vs = [_dense(rngs[1 + j], sr, n, n, cfg) for j in range(k)]
    shared_cells = (
        _sample_without_replacement(rngs[1 + k], n * n, budget)
        if cfg.shared_hint_support
        else None
    )
    Ps = []
    for j in range(k):
        if shared_cells is not None:
            cells = shared_cells
        else:
            cells = _sample_without_replacement(rngs[1 + k + j], n * n, budget)
        vals = _values(rngs[1 + 2 * k + j], sr, budget, cfg)
        entries = [(cell // n + 1, cell % n + 1, v) for cell, v in zip(cells, vals)]
        Ps.append(SparseMatrix(sr, n, n, entries))
    return M, Vs, Ps


def gen_type2(cfg: GenConfig) -> tuple[list[DenseMatrix], DiagonalTensor]:
    """Generate (Vs, P) for a type-2 instance.

    The diagonal carries exactly min(ceil(n^tau), d) nonzeros.
    """
    cfg.validate(type2=True)
    sr = get_semiring(cfg.semiring)
    n, k = cfg.n, cfg.k
    d = cfg.d if cfg.d is not None else n
    budget = min(nnz_budget(n, cfg.tau), d)
    children = np.random.SeedSequence(cfg.seed).spawn(k + 1)
    rngs = [np.random.Generator(np.random.PCG64(c)) for c in children]
    Vs = [_dense(rngs[j], sr, n, d, cfg) for j in range(k)]
    rng_p = rngs[k]
    positions = _sample_without_replacement(rng_p, d, budget)
    vals = _values(rng_p, sr, budget, cfg)
    P = DiagonalTensor(sr, k, d, [(p + 1, v) for p, v in zip(positions, vals)])
    return Vs, P
