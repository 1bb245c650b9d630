"""Semicoherent structure functions and their multilinear extensions."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, DomainError, EmptyCover, NotSemicoherent, RangeError
from .setfun import (
    MobiusTransform,
    SetFunction,
    cardinalities,
    check_n,
    dual,
    dual_table,
    mask_indices,
    mobius_transform,
    subset_mask,
    validate_semicoherent,
    zeta_array,
)


class FormTag(enum.Enum):
    PRIMAL = "primal"
    DUAL = "dual"
    PRIMAL_MOBIUS = "primal-mobius"
    DUAL_MOBIUS = "dual-mobius"
    DISJUNCTIVE_NORMAL = "dnf"
    CONJUNCTIVE_NORMAL = "cnf"
    PIVOTAL = "pivotal"


TABLE_FORMS = (
    FormTag.PRIMAL,
    FormTag.DUAL,
    FormTag.PRIMAL_MOBIUS,
    FormTag.DUAL_MOBIUS,
    FormTag.DISJUNCTIVE_NORMAL,
    FormTag.CONJUNCTIVE_NORMAL,
)


@dataclass(frozen=True)
class PathCutReport:
    minimal_paths: List[int]
    minimal_cuts: List[int]


def minimal_sets(table: np.ndarray) -> List[int]:
    """Minimal masks A with table[A] = 1, sorted by |A| then index tuple.

    Assumes ``table`` is monotone, so minimality only needs the covering
    subsets A minus one element to be zero.
    """
    table = np.asarray(table)
    n = len(table).bit_length() - 1
    masks = np.arange(1 << n)
    minimal = table.astype(bool).copy()
    for i in range(n):
        bit = 1 << i
        has = (masks & bit) != 0
        minimal[has] &= table[masks[has] ^ bit] == 0
    found = [int(a) for a in np.flatnonzero(minimal)]
    return sorted(found, key=lambda a: (bin(a).count("1"), mask_indices(a)))


def union_expansion(sets: Sequence[int], n: int) -> np.ndarray:
    """Integer coefficients of the coproduct of monomials x^S, multilinearly reduced.

    Builds 1 - prod_j (1 - x^{S_j}) one factor at a time in the algebra where
    x^A * x^B = x^(A|B) (inclusion-exclusion over the given sets).
    """
    masks = np.arange(1 << n)
    coef = np.zeros(1 << n, dtype=np.int64)
    for s in sets:
        shifted = np.zeros_like(coef)
        np.add.at(shifted, masks | s, coef)
        coef -= shifted
        coef[s] += 1
    return coef


def _points(x, n: int) -> np.ndarray:
    pts = np.asarray(x, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != n:
        raise DimensionMismatch(f"expected points of length {n}, got shape {np.shape(x)}")
    if np.isnan(pts).any() or (pts < 0).any() or (pts > 1).any():
        raise DomainError("multilinear extension arguments must lie in [0, 1]")
    return pts


def product_weights(pts: np.ndarray) -> np.ndarray:
    """(P, 2^n) array of prod_{i in A} x_i prod_{i not in A} (1 - x_i)."""
    w = np.ones((pts.shape[0], 1))
    for i in range(pts.shape[1]):
        xi = pts[:, i : i + 1]
        w = np.concatenate([w * (1.0 - xi), w * xi], axis=1)
    return w


def monomials(pts: np.ndarray) -> np.ndarray:
    """(P, 2^n) array of prod_{i in A} x_i."""
    w = np.ones((pts.shape[0], 1))
    for i in range(pts.shape[1]):
        w = np.concatenate([w, w * pts[:, i : i + 1]], axis=1)
    return w


def _compensated_rows(terms: np.ndarray) -> np.ndarray:
    return np.array([math.fsum(row) for row in terms])


def pivotal_eval(table: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """phi(x) = x_i phi(1_i, x) + (1 - x_i) phi(0_i, x), pivoting on the lowest index.

    The recursion tree is evaluated bottom-up: the deepest pivot (highest
    index) is contracted first, the lowest index last.
    """
    n = pts.shape[1]
    vals = np.repeat(np.asarray(table, dtype=np.float64)[:, None], pts.shape[0], axis=1)
    for i in range(n - 1, -1, -1):
        halves = vals.reshape(2, 1 << i, -1)
        xi = pts[:, i]
        vals = xi * halves[1] + (1.0 - xi) * halves[0]
    return vals[0]


class SystemStructure:
    """A structure function phi_v given by its boolean set function v.

    Derived data (Moebius transform, dual, minimal paths and cuts) is built
    once at construction. ``degeneracy`` is ``None`` for a semicoherent v and
    ``"constant_one"``/``"constant_zero"`` for the constant families produced
    by thresholding weighted polynomials.
    """

    def __init__(self, v: SetFunction, *, allow_constant: bool = False):
        if not v.boolean:
            raise NotSemicoherent("structure functions need a boolean set function")
        report = validate_semicoherent(v)
        if not report.monotone:
            raise NotSemicoherent(report.describe())
        self.degeneracy: Optional[str] = None
        if not report.nonconstant:
            if not allow_constant:
                raise NotSemicoherent(report.describe())
            self.degeneracy = "constant_one" if v.values[0] == 1 else "constant_zero"
        self.v = v
        self.n = v.n
        self.m_v = mobius_transform(v)
        self.v_star = dual(v)
        self.m_v_star = mobius_transform(self.v_star)
        self.minimal_paths = minimal_sets(v.values)
        self.minimal_cuts = minimal_sets(self.v_star.values)

    @classmethod
    def from_table(cls, values: Sequence[int], **kw) -> "SystemStructure":
        return cls(SetFunction.from_table(np.asarray(values, dtype=np.int64), boolean=True), **kw)

    def __eq__(self, other):
        if not isinstance(other, SystemStructure):
            return NotImplemented
        return self.v == other.v

    def __hash__(self):
        return hash(self.v)

    def __repr__(self):
        return f"SystemStructure(n={self.n}, paths={self.minimal_paths})"

    @property
    def table(self) -> np.ndarray:
        return self.v.values

    @cached_property
    def irrelevant_components(self) -> List[int]:
        """1-based indices i with phi(1_i, x) = phi(0_i, x) for every x."""
        masks = np.arange(1 << self.n)
        out = []
        for i in range(self.n):
            low = masks[(masks >> i) & 1 == 0]
            if np.array_equal(self.table[low], self.table[low | (1 << i)]):
                out.append(i + 1)
        return out

    @cached_property
    def _dnf_coefficients(self) -> np.ndarray:
        return union_expansion(self.minimal_paths, self.n)

    @cached_property
    def _cnf_coefficients(self) -> np.ndarray:
        return union_expansion(self.minimal_cuts, self.n)

    def path_cut_report(self) -> PathCutReport:
        return PathCutReport(list(self.minimal_paths), list(self.minimal_cuts))

    def eval(self, x: Sequence[int]) -> int:
        """phi_v(x) for a binary state vector (table lookup)."""
        if len(x) != self.n:
            raise DimensionMismatch(f"state vector has length {len(x)}, expected {self.n}")
        mask = 0
        for i, xi in enumerate(x):
            if xi not in (0, 1):
                raise DomainError(f"state x_{i + 1}={xi!r} is not binary")
            if xi:
                mask |= 1 << i
        return int(self.table[mask])

    def eval_mle(self, x, form: FormTag = FormTag.PRIMAL_MOBIUS):
        """Multilinear extension at x in [0,1]^n, in the requested algebraic form.

        ``x`` may be one point (returns a float) or a (P, n) batch.
        """
        single = np.ndim(x) == 1
        pts = _points(x, self.n)
        out = self._mle(pts, FormTag(form))
        return float(out[0]) if single else out

    def _mle(self, pts: np.ndarray, form: FormTag) -> np.ndarray:
        y = 1.0 - pts
        if form is FormTag.PRIMAL:
            return _compensated_rows(product_weights(pts) * self.table)
        if form is FormTag.DUAL:
            return 1.0 - _compensated_rows(product_weights(y) * self.v_star.values)
        if form is FormTag.PRIMAL_MOBIUS:
            return monomials(pts) @ self.m_v.coefficients.astype(np.float64)
        if form is FormTag.DUAL_MOBIUS:
            # 1 - phi*(1 - x); equals sum m* (1 - prod(1 - x_i)) when v*([n]) = 1,
            # and stays right for the constant-one family where v* vanishes.
            return 1.0 - monomials(y) @ self.m_v_star.coefficients.astype(np.float64)
        if form is FormTag.DISJUNCTIVE_NORMAL:
            return monomials(pts) @ self._dnf_coefficients.astype(np.float64)
        if form is FormTag.CONJUNCTIVE_NORMAL:
            return 1.0 - monomials(y) @ self._cnf_coefficients.astype(np.float64)
        if form is FormTag.PIVOTAL:
            return pivotal_eval(self.table, pts)
        raise ValueError(f"unknown form {form!r}")


def eval_structure(s: SystemStructure, x: Sequence[int]) -> int:
    return s.eval(x)


def eval_mle(s: SystemStructure, x, form: FormTag = FormTag.PRIMAL_MOBIUS):
    return s.eval_mle(x, form)


def minimal_path_sets(s: SystemStructure) -> PathCutReport:
    return s.path_cut_report()


def _upward_closure(n: int, generators: Iterable[int]) -> np.ndarray:
    seed = np.zeros(1 << n, dtype=np.int64)
    for g in generators:
        seed[g] = 1
    return (zeta_array(seed) > 0).astype(np.int8)


def _masks(n: int, sets) -> List[int]:
    out = []
    for s in sets:
        mask = s if isinstance(s, (int, np.integer)) else subset_mask(s, n)
        if mask == 0:
            raise DomainError("path and cut sets must be nonempty")
        if mask >= 1 << n:
            raise RangeError(f"subset mask {mask} outside [n] for n={n}")
        out.append(int(mask))
    return out


def from_path_sets(n: int, paths) -> SystemStructure:
    """v(A) = 1 iff A contains one of the given path sets (1-based index lists or masks)."""
    n = check_n(n)
    paths = _masks(n, paths)
    if not paths:
        raise EmptyCover("at least one path set is required")
    return SystemStructure(SetFunction(n, _upward_closure(n, paths), boolean=True))


def from_cut_sets(n: int, cuts) -> SystemStructure:
    """v([n] \\ K) = 0 for each listed cut K; built as the dual of a path description."""
    n = check_n(n)
    cuts = _masks(n, cuts)
    if not cuts:
        raise EmptyCover("at least one cut set is required")
    v_star = _upward_closure(n, cuts)
    return SystemStructure(SetFunction(n, dual_table(v_star), boolean=True))


def from_truth_table(bits: Sequence[int]) -> SystemStructure:
    return SystemStructure.from_table(bits)


def make_kofn(n: int, k: int) -> SystemStructure:
    n = check_n(n)
    if not 1 <= k <= n:
        raise RangeError(f"k must lie in [1, {n}], got {k}")
    return SystemStructure(SetFunction(n, (cardinalities(n) >= k).astype(np.int8), boolean=True))


def series(n: int) -> SystemStructure:
    return make_kofn(n, n)


def parallel(n: int) -> SystemStructure:
    return make_kofn(n, 1)


def bridge() -> SystemStructure:
    """Five-component bridge: components 1,2 in front, 4,5 behind, 3 in the middle."""
    return from_path_sets(5, [[1, 4], [2, 5], [1, 3, 5], [2, 3, 4]])


def kofn_mobius(n: int, k: int) -> MobiusTransform:
    """Closed-form Moebius coefficients of the k-out-of-n structure."""
    n = check_n(n)
    if not 1 <= k <= n:
        raise RangeError(f"k must lie in [1, {n}], got {k}")
    card = cardinalities(n)
    coef = np.zeros(1 << n, dtype=np.int64)
    for size in range(k, n + 1):
        coef[card == size] = (-1) ** (size - k) * math.comb(size - 1, k - 1)
    return MobiusTransform(n, coef)
