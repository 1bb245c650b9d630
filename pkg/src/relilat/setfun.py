"""Dense set functions on the subset lattice of [n].

A subset A of [n] = {1, ..., n} is a bitmask: bit i-1 is set iff i is in A.
Set functions are numpy arrays of length 2**n indexed by mask, in ascending
mask order. Boolean set functions keep int8 tables and their Moebius
coefficients are exact int64; real-valued ones use float64 with +inf allowed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, NonBooleanInput, RangeError

MAX_N = 24


def check_n(n: int) -> int:
    n = int(n)
    if not 1 <= n <= MAX_N:
        raise RangeError(f"component count must be in [1, {MAX_N}], got {n}")
    return n


def subset_mask(indices: Iterable[int], n: Optional[int] = None) -> int:
    """Bitmask of a collection of 1-based component indices."""
    mask = 0
    for i in indices:
        i = int(i)
        if i < 1 or (n is not None and i > n):
            raise RangeError(f"component index {i} outside [1, {n}]")
        mask |= 1 << (i - 1)
    return mask


def mask_indices(mask: int) -> Tuple[int, ...]:
    """1-based component indices of a bitmask, ascending."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def format_subset(mask: int) -> str:
    idx = mask_indices(mask)
    return " ".join(map(str, idx)) if idx else "{}"


def set_repr(mask: int) -> str:
    """Brace notation used in diagnostics, e.g. ``{1,2}``."""
    return "{" + ",".join(map(str, mask_indices(mask))) + "}"


def cardinalities(n: int) -> np.ndarray:
    """|A| for every mask A of [n], as an int64 array."""
    card = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        card = np.concatenate([card, card + 1])
    return card


def submasks(mask: int) -> np.ndarray:
    """All submasks of ``mask`` in ascending order."""
    out = np.zeros(1, dtype=np.int64)
    for i in mask_indices(mask):
        out = np.concatenate([out, out | (1 << (i - 1))])
    return out


def _n_of(length: int) -> int:
    n = int(length).bit_length() - 1
    if length != 1 << n:
        raise DimensionMismatch(f"set function length {length} is not a power of two")
    return n


def mobius_array(values: np.ndarray) -> np.ndarray:
    """Moebius transform along axis 0: m(A) = sum_{B<=A} (-1)^{|A|-|B|} v(B).

    Extra trailing axes are transformed independently. Integer input stays
    integer, so boolean tables round-trip exactly.
    """
    a = np.array(values, copy=True)
    if a.dtype.kind in "biu":
        a = a.astype(np.int64)
    n = _n_of(a.shape[0])
    rest = a.shape[1:]
    for i in range(n):
        view = a.reshape((-1, 2, 1 << i) + rest)
        view[:, 1] -= view[:, 0]
    return a


def zeta_array(values: np.ndarray) -> np.ndarray:
    """Zeta transform along axis 0: v(A) = sum_{B<=A} m(B)."""
    a = np.array(values, copy=True)
    if a.dtype.kind in "biu":
        a = a.astype(np.int64)
    n = _n_of(a.shape[0])
    rest = a.shape[1:]
    for i in range(n):
        view = a.reshape((-1, 2, 1 << i) + rest)
        view[:, 1] += view[:, 0]
    return a


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SetFunction:
    """Dense map 2^[n] -> values, indexed by bitmask."""

    n: int
    values: np.ndarray
    boolean: bool = False

    def __post_init__(self):
        check_n(self.n)
        vals = np.asarray(self.values)
        if vals.shape != (1 << self.n,):
            raise DimensionMismatch(
                f"expected {1 << self.n} values for n={self.n}, got shape {vals.shape}"
            )
        if self.boolean:
            if not np.all((vals == 0) | (vals == 1)):
                raise NonBooleanInput("boolean set function has entries outside {0,1}")
            vals = vals.astype(np.int8)
        else:
            vals = vals.astype(np.float64)
            if np.isnan(vals).any():
                raise RangeError("set function values must not be NaN")
        object.__setattr__(self, "values", _frozen(vals))

    @classmethod
    def from_table(cls, values: Sequence, boolean: Optional[bool] = None) -> "SetFunction":
        vals = np.asarray(values)
        n = _n_of(len(vals))
        if boolean is None:
            boolean = vals.dtype.kind in "biu" and bool(np.all((vals == 0) | (vals == 1)))
        return cls(n, vals, boolean)

    @classmethod
    def from_predicate(cls, n: int, pred) -> "SetFunction":
        """Boolean set function v(A) = pred(mask)."""
        n = check_n(n)
        return cls(n, np.array([1 if pred(a) else 0 for a in range(1 << n)]), True)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def __getitem__(self, mask: int):
        v = self.values[mask]
        return int(v) if self.boolean else float(v)

    def __len__(self):
        return 1 << self.n

    def __eq__(self, other):
        if not isinstance(other, SetFunction):
            return NotImplemented
        return (
            self.n == other.n
            and self.boolean == other.boolean
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.n, self.boolean, self.values.tobytes()))

    def __repr__(self):
        kind = "boolean" if self.boolean else "real"
        return f"SetFunction(n={self.n}, {kind}, values={self.values.tolist()})"


@dataclass(frozen=True, eq=False)
class MobiusTransform:
    n: int
    coefficients: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _frozen(self.coefficients))

    @property
    def exact(self) -> bool:
        return self.coefficients.dtype.kind == "i"

    def __getitem__(self, mask: int):
        c = self.coefficients[mask]
        return int(c) if self.exact else float(c)

    def nonzero(self):
        """(mask, coefficient) pairs with nonzero coefficient, ascending mask."""
        idx = np.flatnonzero(self.coefficients)
        return [(int(a), self[int(a)]) for a in idx]

    def __eq__(self, other):
        if not isinstance(other, MobiusTransform):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.coefficients, other.coefficients)

    def __hash__(self):
        return hash((self.n, self.coefficients.tobytes()))


def mobius_transform(v: SetFunction) -> MobiusTransform:
    return MobiusTransform(v.n, mobius_array(v.values))


def zeta_transform(m: MobiusTransform) -> SetFunction:
    vals = zeta_array(m.coefficients)
    if m.exact and np.all((vals == 0) | (vals == 1)):
        return SetFunction(m.n, vals, boolean=True)
    return SetFunction(m.n, vals.astype(np.float64))


def dual_table(values: np.ndarray) -> np.ndarray:
    """v*(A) = 1 - v([n] \\ A); the complement of mask A is index full - A."""
    return (1 - np.asarray(values)[::-1]).astype(np.int8)


def dual(v: SetFunction) -> SetFunction:
    if not v.boolean:
        raise NonBooleanInput(
            "dual is defined for boolean set functions only; "
            "threshold a weighted polynomial first"
        )
    return SetFunction(v.n, dual_table(v.values), boolean=True)


def first_monotonicity_violation(values: np.ndarray) -> Optional[Tuple[int, int]]:
    """Smallest covering pair (B, A), B = A minus one element, with v(B) > v(A)."""
    vals = np.asarray(values)
    n = _n_of(len(vals))
    masks = np.arange(1 << n)
    best = None
    for i in range(n):
        bit = 1 << i
        upper = masks[(masks & bit) != 0]
        bad = upper[vals[upper ^ bit] > vals[upper]]
        if bad.size:
            cand = (int(bad[0]), i)
            if best is None or cand < best:
                best = cand
    if best is None:
        return None
    a, i = best
    return a ^ (1 << i), a


@dataclass(frozen=True)
class ValidationReport:
    monotone: bool
    nonconstant: bool
    violation: Optional[Tuple[int, int]] = None

    @property
    def valid(self) -> bool:
        return self.monotone and self.nonconstant

    def describe(self) -> str:
        if self.valid:
            return "valid semicoherent structure"
        if not self.monotone:
            b, a = self.violation
            return f"not monotone: v({set_repr(b)}) > v({set_repr(a)})"
        return "constant structure: requires v(empty) = 0 and v([n]) = 1"


def validate_semicoherent(v: SetFunction) -> ValidationReport:
    if not v.boolean:
        raise NonBooleanInput("semicoherence is checked on boolean set functions")
    violation = first_monotonicity_violation(v.values)
    monotone = violation is None
    nonconstant = bool(v.values[0] == 0 and v.values[-1] == 1)
    return ValidationReport(monotone, nonconstant, violation)
