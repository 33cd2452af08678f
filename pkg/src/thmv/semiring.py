"""Commutative semirings with scalar and vectorized kernels.

Everything downstream (matrices, oracles, benchmarks) is generic over a
semiring. Two carriers are provided:

* boolean: {0, 1} with OR as addition and AND as multiplication,
* natural: nonnegative integers with + and *, checked against a 64-bit
  bound (no silent wraparound).

Scalars are plain Python ints. The vector layer operates on numpy arrays
(int8 for booleans, object for naturals) so kernels can run at C speed;
a vectorized call stands for one scalar operation per element, and
``CountingSemiring`` tallies exactly that, so counted totals are identical
to what an element-at-a-time execution would report.
"""

from __future__ import annotations

import numpy as np

from .errors import CarrierError, SemiringOverflowError

# Checked-overflow bound for the natural carrier (64-bit counter width).
NATURAL_MAX = 2**64 - 1


class OpCounter:
    """Tallies semiring additions and multiplications for one context.

    A counter belongs to exactly one oracle or benchmark context; it is
    never shared across concurrently executing contexts.
    """

    __slots__ = ("adds", "muls")

    def __init__(self) -> None:
        self.adds = 0
        self.muls = 0

    def reset(self) -> None:
        self.adds = 0
        self.muls = 0

    def snapshot(self) -> tuple[int, int]:
        """Return ``(adds, muls)`` without side effects."""
        return (self.adds, self.muls)

    def __repr__(self) -> str:
        return f"OpCounter(adds={self.adds}, muls={self.muls})"


class Semiring:
    """Shared surface for concrete semirings.

    Concrete subclasses define the scalar ops, the storage dtype, and the
    vector kernels. Instances are immutable and safe to share.
    """

    name: str
    zero: int
    one: int
    add_idempotent: bool
    dtype: np.dtype

    # -- scalar layer -----------------------------------------------------

    def add(self, a: int, b: int) -> int:
        raise NotImplementedError

    def mul(self, a: int, b: int) -> int:
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def check(self, x) -> int:
        if not self.contains(x):
            raise CarrierError(f"{x!r} is not in the {self.name} carrier")
        return int(x)

    # -- vector layer ------------------------------------------------------

    def vadd(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def vmul(self, x, y) -> np.ndarray:
        raise NotImplementedError

    def vsum(self, x: np.ndarray, axis: int) -> np.ndarray:
        raise NotImplementedError

    # -- storage helpers (no semiring arithmetic, never counted) -----------

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=self.dtype)

    def ones(self, shape) -> np.ndarray:
        return np.ones(shape, dtype=self.dtype)

    def asarray(self, values, validate: bool = True) -> np.ndarray:
        """Convert nested sequences (or an ndarray) to carrier storage."""
        arr = np.asarray(values, dtype=self.dtype)
        if validate:
            self.validate_array(arr)
        return arr

    def validate_array(self, arr: np.ndarray) -> None:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<semiring {self.name}>"


class BooleanSemiring(Semiring):
    """Carrier {0, 1}; addition is OR, multiplication is AND."""

    name = "bool"
    zero = 0
    one = 1
    add_idempotent = True
    dtype = np.dtype(np.int8)

    def add(self, a: int, b: int) -> int:
        return a | b

    def mul(self, a: int, b: int) -> int:
        return a & b

    def contains(self, x) -> bool:
        return isinstance(x, (int, np.integer)) and x in (0, 1)

    def vadd(self, x, y) -> np.ndarray:
        return np.bitwise_or(x, y)

    def vmul(self, x, y) -> np.ndarray:
        return np.bitwise_and(x, y)

    def vsum(self, x: np.ndarray, axis: int) -> np.ndarray:
        return np.bitwise_or.reduce(x, axis=axis)

    def validate_array(self, arr: np.ndarray) -> None:
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            raise CarrierError("boolean entries must be 0 or 1")


class NaturalSemiring(Semiring):
    """Nonnegative integers with checked 64-bit overflow.

    Stored as object arrays of Python ints so intermediate products are
    exact; any result above NATURAL_MAX raises instead of wrapping.
    """

    name = "nat"
    zero = 0
    one = 1
    add_idempotent = False
    dtype = np.dtype(object)

    def add(self, a: int, b: int) -> int:
        r = a + b
        if r > NATURAL_MAX:
            raise SemiringOverflowError(f"natural add overflow: {a} + {b}")
        return r

    def mul(self, a: int, b: int) -> int:
        r = a * b
        if r > NATURAL_MAX:
            raise SemiringOverflowError(f"natural mul overflow: {a} * {b}")
        return r

    def contains(self, x) -> bool:
        return isinstance(x, (int, np.integer)) and 0 <= x <= NATURAL_MAX

    def _checked(self, r: np.ndarray, what: str) -> np.ndarray:
        if r.size and r.max() > NATURAL_MAX:
            raise SemiringOverflowError(f"natural {what} overflow")
        return r

    def vadd(self, x, y) -> np.ndarray:
        return self._checked(np.add(x, y), "add")

    def vmul(self, x, y) -> np.ndarray:
        return self._checked(np.multiply(x, y), "mul")

    def vsum(self, x: np.ndarray, axis: int) -> np.ndarray:
        return self._checked(np.add.reduce(x, axis=axis), "sum")

    def zeros(self, shape) -> np.ndarray:
        return np.full(shape, 0, dtype=object)

    def ones(self, shape) -> np.ndarray:
        return np.full(shape, 1, dtype=object)

    def asarray(self, values, validate: bool = True) -> np.ndarray:
        arr = np.asarray(values)
        if arr.dtype != object:
            arr = arr.astype(object)
        else:
            arr = arr.copy()
        if validate:
            self.validate_array(arr)
        return arr

    def validate_array(self, arr: np.ndarray) -> None:
        for x in arr.flat:
            if not self.contains(x):
                raise CarrierError(f"{x!r} is not a natural in [0, 2^64)")


BOOLEAN = BooleanSemiring()
NATURAL = NaturalSemiring()

_REGISTRY = {BOOLEAN.name: BOOLEAN, NATURAL.name: NATURAL}


def get_semiring(name: str) -> Semiring:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise CarrierError(f"unknown semiring {name!r}; known: {sorted(_REGISTRY)}") from None


class CountingSemiring(Semiring):
    """Transparent wrapper that tallies operations into an OpCounter.

    Scalar add/mul count 1 each; vector calls count one op per element
    they logically perform. Results are exactly the base semiring's.
    """

    def __init__(self, base: Semiring, counter: OpCounter | None = None):
        if isinstance(base, CountingSemiring):
            base = base.base
        self.base = base
        self.counter = counter if counter is not None else OpCounter()
        self.name = base.name
        self.zero = base.zero
        self.one = base.one
        self.add_idempotent = base.add_idempotent
        self.dtype = base.dtype

    def add(self, a: int, b: int) -> int:
        self.counter.adds += 1
        return self.base.add(a, b)

    def mul(self, a: int, b: int) -> int:
        self.counter.muls += 1
        return self.base.mul(a, b)

    def contains(self, x) -> bool:
        return self.base.contains(x)

    def vadd(self, x, y) -> np.ndarray:
        r = self.base.vadd(x, y)
        self.counter.adds += r.size
        return r

    def vmul(self, x, y) -> np.ndarray:
        r = self.base.vmul(x, y)
        self.counter.muls += r.size
        return r

    def vsum(self, x: np.ndarray, axis: int) -> np.ndarray:
        # Fold-from-zero convention: one add per reduced element.
        self.counter.adds += x.size
        return self.base.vsum(x, axis)

    def zeros(self, shape) -> np.ndarray:
        return self.base.zeros(shape)

    def ones(self, shape) -> np.ndarray:
        return self.base.ones(shape)

    def asarray(self, values, validate: bool = True) -> np.ndarray:
        return self.base.asarray(values, validate)

    def validate_array(self, arr: np.ndarray) -> None:
        self.base.validate_array(arr)

    def __repr__(self) -> str:
        return f"<counting semiring {self.name} {self.counter!r}>"


def base_of(sr: Semiring) -> Semiring:
    """The underlying uncounted semiring of ``sr``."""
    return sr.base if isinstance(sr, CountingSemiring) else sr
