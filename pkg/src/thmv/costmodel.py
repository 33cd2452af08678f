"""Per-phase operation accounting and empirical exponent estimation.

Counted semiring multiplications stand in for running time (additions are
reported but not fitted; wall-clock nanoseconds are informational only).
With schoolbook products throughout, the eager strategy's hint phase
costs Theta(n^(2+tau)) counted multiplications where a fast rectangular
multiply kernel would do better; benchmark reports flag that substitution
instead of fitting a claim the artifact cannot measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import FitError


@dataclass(frozen=True)
class PhaseCost:
    """Counter deltas for one phase of one oracle run."""

    phase: str  # "P1" | "P2" | "P3"
    method: str  # "M1" | "M2"
    n: int
    k: int
    tau: float
    adds: int
    muls: int
    wall_ns: int


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares fit of log2(count) against log2(n)."""

    samples: tuple[tuple[int, int], ...]
    slope: float
    intercept: float
    r2: float


def fit_exponent(
    samples: Sequence[tuple[int, int]], *, drop_smallest: bool = False
) -> ExponentFit:
    """Fit count ~ 2^intercept * n^slope over (n, count) samples.

    Requires at least three distinct positive n values and positive
    counts. ``drop_smallest`` discards every sample at the smallest n
    (boundary effects); the default keeps all samples.
    """
    samples = [(int(n), int(c)) for n, c in samples]
    if drop_smallest and samples:
        n_min = min(n for n, _ in samples)
        samples = [(n, c) for n, c in samples if n != n_min]
    for n, c in samples:
        if n <= 0:
            raise FitError(f"non-positive n in samples: {n}")
        if c <= 0:
            raise FitError(f"non-positive count in samples: {c}")
    distinct = {n for n, _ in samples}
    if len(distinct) < 3:
        raise FitError(f"need >=3 distinct n values, got {len(distinct)}")
    xs = [math.log2(n) for n, _ in samples]
    ys = [math.log2(c) for _, c in samples]
    m = len(xs)
    x_mean = sum(xs) / m
    y_mean = sum(ys) / m
    sxx = sum((x - x_mean) ** 2 for x in xs)
    sxy = sum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - y_mean) ** 2 for y in ys)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return ExponentFit(samples=tuple(samples), slope=slope, intercept=intercept, r2=r2)
