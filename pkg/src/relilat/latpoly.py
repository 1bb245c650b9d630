"""Weighted lattice polynomial functions on L = [0, inf].

A w.l.p. p_w is stored through its unique nondecreasing disjunctive
coefficient function w, so that

    p_w(t) = max_A ( w(A) ^ min_{i in A} t_i ),   with min over the empty set = inf.

Unweighted lattice polynomials are the case w(A) in {0, inf}.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, DomainError, MonotonicityError
from .setfun import (
    SetFunction,
    cardinalities,
    check_n,
    first_monotonicity_violation,
    set_repr,
    subset_mask,
)
from .structure import SystemStructure

INF = float("inf")


class WlpForm(enum.Enum):
    DISJUNCTIVE = "disjunctive"
    CONJUNCTIVE = "conjunctive"
    MEDIAN = "median"


def _times(t, n: int) -> np.ndarray:
    pts = np.asarray(t, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != n:
        raise DimensionMismatch(f"expected lifetime vectors of length {n}, got shape {np.shape(t)}")
    if np.isnan(pts).any() or (pts < 0).any():
        raise DomainError("lifetimes must lie in [0, inf]")
    return pts


def _subset_minima(pts: np.ndarray) -> np.ndarray:
    """(P, 2^n) array of min_{i in A} t_i, inf for the empty set."""
    out = np.full((pts.shape[0], 1), INF)
    for i in range(pts.shape[1]):
        out = np.concatenate([out, np.minimum(out, pts[:, i : i + 1])], axis=1)
    return out


def _subset_maxima(pts: np.ndarray) -> np.ndarray:
    out = np.zeros((pts.shape[0], 1))
    for i in range(pts.shape[1]):
        out = np.concatenate([out, np.maximum(out, pts[:, i : i + 1])], axis=1)
    return out


def _max_closure(values: np.ndarray) -> np.ndarray:
    """A -> max_{B <= A} values[B]."""
    a = np.array(values, dtype=np.float64)
    n = len(a).bit_length() - 1
    for i in range(n):
        view = a.reshape(-1, 2, 1 << i)
        np.maximum(view[:, 1], view[:, 0], out=view[:, 1])
    return a


def _median(a, b, c):
    return np.maximum(np.maximum(np.minimum(a, b), np.minimum(b, c)), np.minimum(c, a))


@dataclass(frozen=True)
class MinimalWlpRepresentation:
    u_d: SetFunction
    u_c: SetFunction

    def disjunctive_terms(self) -> List[Tuple[int, float]]:
        """(mask, weight) for every nonzero disjunctive coefficient."""
        vals = self.u_d.values
        return [(int(a), float(vals[a])) for a in np.flatnonzero(vals > 0)]


@dataclass(frozen=True)
class SymmetricProfile:
    """Cardinality profile w~(k), k = 0..n, of a symmetric w.l.p."""

    w_tilde: Tuple[float, ...]

    def __post_init__(self):
        wt = tuple(float(x) for x in self.w_tilde)
        if len(wt) < 2:
            raise DimensionMismatch("a symmetric profile needs n + 1 >= 2 entries")
        if any(np.isnan(x) or x < 0 for x in wt):
            raise DomainError("profile values must lie in [0, inf]")
        for k in range(len(wt) - 1):
            if wt[k] > wt[k + 1]:
                raise MonotonicityError(
                    f"profile decreases between k={k} ({wt[k]}) and k={k + 1} ({wt[k + 1]})"
                )
        object.__setattr__(self, "w_tilde", wt)

    @property
    def n(self) -> int:
        return len(self.w_tilde) - 1

    def k_at(self, t: float) -> int:
        """Smallest k with w~(k) > t, or n + 1 when there is none."""
        for k, wk in enumerate(self.w_tilde):
            if wk > t:
                return k
        return self.n + 1


class WeightedLatticePolynomial:
    def __init__(self, w):
        if not isinstance(w, SetFunction):
            w = SetFunction.from_table(np.asarray(w, dtype=np.float64), boolean=False)
        vals = np.asarray(w.values, dtype=np.float64)
        if (vals < 0).any():
            raise DomainError("weights must lie in [0, inf]")
        bad = first_monotonicity_violation(vals)
        if bad is not None:
            b, a = bad
            raise MonotonicityError(
                f"weights must be nondecreasing: w({set_repr(b)})={vals[b]!r} > "
                f"w({set_repr(a)})={vals[a]!r}",
            )
        self.w = w if not w.boolean else SetFunction(w.n, vals)
        self.n = w.n

    @property
    def weights(self) -> np.ndarray:
        return self.w.values

    def __eq__(self, other):
        if not isinstance(other, WeightedLatticePolynomial):
            return NotImplemented
        return self.w == other.w

    def __hash__(self):
        return hash(self.w)

    def __repr__(self):
        return f"WeightedLatticePolynomial(n={self.n}, w={self.weights.tolist()})"

    @property
    def is_unweighted(self) -> bool:
        vals = self.weights
        return bool(np.all((vals == 0) | (vals == INF)) and vals[0] == 0 and vals[-1] == INF)

    def breakpoints(self) -> np.ndarray:
        """Sorted distinct finite weights: the times where v_t can change."""
        vals = self.weights
        return np.unique(vals[np.isfinite(vals)])

    def conjunctive_coefficients(self) -> np.ndarray:
        """w^c(A) = p(e_{[n] \\ A}) with 0 off and inf on the complement of A."""
        at_char = _max_closure(self.weights)
        return at_char[::-1].copy()

    def eval(self, t, form: WlpForm = WlpForm.DISJUNCTIVE):
        single = np.ndim(t) == 1
        pts = _times(t, self.n)
        form = WlpForm(form)
        if form is WlpForm.DISJUNCTIVE:
            out = np.max(np.minimum(self.weights, _subset_minima(pts)), axis=1)
        elif form is WlpForm.CONJUNCTIVE:
            wc = self.conjunctive_coefficients()
            out = np.min(np.maximum(wc, _subset_maxima(pts)), axis=1)
        else:
            out = self._median_eval(pts)
        return float(out[0]) if single else out

    def _median_eval(self, pts: np.ndarray) -> np.ndarray:
        # p(t) = median(p(0_i, t), t_i, p(inf_i, t)) with the lowest index as
        # the outermost pivot; leaves are p at characteristic vectors = w(A).
        vals = np.repeat(self.weights[:, None], pts.shape[0], axis=1)
        for i in range(self.n - 1, -1, -1):
            halves = vals.reshape(2, 1 << i, -1)
            vals = _median(halves[0], pts[:, i], halves[1])
        return vals[0]

    def eval_minimal(self, pts: np.ndarray) -> np.ndarray:
        """Disjunctive evaluation over the minimal terms only; pts is (P, n)."""
        out = np.zeros(pts.shape[0])
        for mask, weight in self.minimal_terms:
            idx = [i for i in range(self.n) if mask >> i & 1]
            term = np.full(pts.shape[0], weight)
            if idx:
                term = np.minimum(term, pts[:, idx].min(axis=1))
            np.maximum(out, term, out=out)
        return out

    @property
    def minimal_terms(self) -> List[Tuple[int, float]]:
        cached = self.__dict__.get("_minimal_terms")
        if cached is None:
            cached = self.minimal_representation().disjunctive_terms()
            self.__dict__["_minimal_terms"] = cached
        return cached

    def minimal_representation(self) -> MinimalWlpRepresentation:
        vals = self.weights
        n = self.n
        masks = np.arange(1 << n)
        strict_below = np.ones(1 << n, dtype=bool)
        strict_above = np.ones(1 << n, dtype=bool)
        for i in range(n):
            bit = 1 << i
            has = (masks & bit) != 0
            lower = masks[has] ^ bit
            strict_below[masks[has]] &= vals[lower] < vals[masks[has]]
            strict_above[lower] &= vals[lower] < vals[masks[has]]
        u_d = np.where(strict_below, vals, 0.0)
        u_c = np.where(strict_above, vals, INF)
        return MinimalWlpRepresentation(SetFunction(n, u_d), SetFunction(n, u_c))

    def threshold(self, t: float) -> SystemStructure:
        """phi_{v_t} with v_t(A) = Ind(w(A) > t); constant families are flagged, not rejected."""
        if np.isnan(t) or t < 0:
            raise DomainError(f"threshold time must be >= 0, got {t}")
        vt = (self.weights > t).astype(np.int8)
        return SystemStructure(SetFunction(self.n, vt, boolean=True), allow_constant=True)


def eval_wlp(p: WeightedLatticePolynomial, t, form: WlpForm = WlpForm.DISJUNCTIVE):
    return p.eval(t, form)


def threshold_structure(p: WeightedLatticePolynomial, t: float) -> SystemStructure:
    return p.threshold(t)


def minimal_representation(p: WeightedLatticePolynomial) -> MinimalWlpRepresentation:
    return p.minimal_representation()


def lp_from_structure(s: SystemStructure) -> WeightedLatticePolynomial:
    return WeightedLatticePolynomial(SetFunction(s.n, np.where(s.table == 1, INF, 0.0)))


def from_terms(n: int, terms: Sequence[Tuple[Sequence[int], float]]) -> WeightedLatticePolynomial:
    """p(t) = max over terms (c ^ min_{i in S} t_i); subsets given as 1-based indices."""
    n = check_n(n)
    seed = np.zeros(1 << n)
    for subset, c in terms:
        mask = subset if isinstance(subset, (int, np.integer)) else subset_mask(subset, n)
        seed[mask] = max(seed[mask], float(c))
    return WeightedLatticePolynomial(SetFunction(n, _max_closure(seed)))


def weighted_bridge(lower: float, upper: float) -> WeightedLatticePolynomial:
    """Bridge structure whose middle component's lifetime is clamped into [lower, upper]."""
    return from_terms(
        5,
        [
            ([1, 4], INF),
            ([2, 5], INF),
            ([1, 5], lower),
            ([1, 3, 5], upper),
            ([2, 4], lower),
            ([2, 3, 4], upper),
        ],
    )


def _bounds(bounds) -> np.ndarray:
    b = np.asarray(bounds, dtype=np.float64).ravel()
    if b.size == 0:
        raise DimensionMismatch("bounds must be nonempty")
    if np.isnan(b).any() or (b < 0).any():
        raise DomainError("bounds must lie in [0, inf]")
    return b


def make_weighted_min(bounds) -> WeightedLatticePolynomial:
    """p(t) = min_i (bounds_i v t_i): a series system with per-component lower bounds."""
    b = _bounds(bounds)
    n = check_n(b.size)
    minima = _subset_minima(b[None, :])[0]
    # w(B) = min of the bounds outside B; the complement of B is index full - B.
    return WeightedLatticePolynomial(SetFunction(n, minima[::-1].copy()))


def make_weighted_max(bounds) -> WeightedLatticePolynomial:
    """p(t) = max_i (bounds_i ^ t_i): a parallel system with per-component upper bounds."""
    b = _bounds(bounds)
    n = check_n(b.size)
    return WeightedLatticePolynomial(SetFunction(n, _subset_maxima(b[None, :])[0]))


def make_symmetric(profile) -> WeightedLatticePolynomial:
    if not isinstance(profile, SymmetricProfile):
        profile = SymmetricProfile(tuple(profile))
    n = check_n(profile.n)
    wt = np.asarray(profile.w_tilde)
    return WeightedLatticePolynomial(SetFunction(n, wt[cardinalities(n)]))


def order_statistic(t, j: int) -> np.ndarray:
    """j-th smallest coordinate of each row; j = n + 1 yields inf."""
    pts = np.atleast_2d(np.asarray(t, dtype=np.float64))
    n = pts.shape[1]
    if j == n + 1:
        return np.full(pts.shape[0], INF)
    return np.sort(pts, axis=1)[:, j - 1]


def symmetric_closed_form(profile: SymmetricProfile, t) -> np.ndarray:
    """max_k ( w~(k) ^ f_{n-k+1}(t) ) for each row of t."""
    pts = np.atleast_2d(np.asarray(t, dtype=np.float64))
    n = profile.n
    out = np.zeros(pts.shape[0])
    for k, wk in enumerate(profile.w_tilde):
        out = np.maximum(out, np.minimum(wk, order_statistic(pts, n - k + 1)))
    return out
