"""Component lifetime models and the distribution of the state vector X(t).

Component i is functioning at time t iff T_i > t (strictly), so atoms of a
discrete joint law sitting exactly at t count as failed.

Subset-indexed outputs follow the set-function convention of ``setfun``:
row A of a (2^n, T) array refers to the components in mask A.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, DomainError, NumericalError, RangeError
from .setfun import check_n, mobius_array

log = logging.getLogger(__name__)

CLAMP_THRESHOLD = 1e-9


def _as_times(t) -> np.ndarray:
    ts = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.isnan(ts).any() or (ts < 0).any():
        raise DomainError("times must lie in [0, inf]")
    return ts


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator; an existing Generator is passed through untouched."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


class MarginalLifetime:
    """Survival law of one component. Subclasses define survival and its inverse."""

    kind = "marginal"

    def survival(self, t) -> np.ndarray:
        raise NotImplementedError

    def cdf(self, t) -> np.ndarray:
        return 1.0 - self.survival(t)

    def inverse_survival(self, v) -> np.ndarray:
        """inf{t : S(t) <= v} for v in (0, 1]."""
        raise NotImplementedError

    def breakpoints(self) -> np.ndarray:
        return np.empty(0)

    def median(self) -> float:
        return float(self.inverse_survival(np.array([0.5]))[0])


@dataclass(frozen=True)
class Exponential(MarginalLifetime):
    rate: float
    kind = "exponential"

    def __post_init__(self):
        if not (np.isfinite(self.rate) and self.rate > 0):
            raise RangeError(f"exponential rate must be positive and finite, got {self.rate}")

    def survival(self, t):
        return np.exp(-self.rate * np.asarray(t, dtype=np.float64))

    def cdf(self, t):
        return -np.expm1(-self.rate * np.asarray(t, dtype=np.float64))

    def inverse_survival(self, v):
        return -np.log(np.asarray(v, dtype=np.float64)) / self.rate


@dataclass(frozen=True)
class Weibull(MarginalLifetime):
    shape: float
    scale: float
    kind = "weibull"

    def __post_init__(self):
        for name in ("shape", "scale"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise RangeError(f"weibull {name} must be positive and finite, got {val}")

    def survival(self, t):
        return np.exp(-((np.asarray(t, dtype=np.float64) / self.scale) ** self.shape))

    def cdf(self, t):
        return -np.expm1(-((np.asarray(t, dtype=np.float64) / self.scale) ** self.shape))

    def inverse_survival(self, v):
        return self.scale * (-np.log(np.asarray(v, dtype=np.float64))) ** (1.0 / self.shape)


@dataclass(frozen=True)
class PiecewiseEmpirical(MarginalLifetime):
    """Piecewise-linear survival through (time, survival) knots, ending at survival 0."""

    knots: Tuple[Tuple[float, float], ...]
    kind = "empirical"

    def __post_init__(self):
        pts = [(float(a), float(b)) for a, b in self.knots]
        if not pts:
            raise DomainError("empirical survival needs at least one knot")
        if pts[0][0] > 0:
            pts.insert(0, (0.0, 1.0))
        times = np.array([p[0] for p in pts])
        surv = np.array([p[1] for p in pts])
        if times[0] != 0 or surv[0] != 1:
            raise DomainError("empirical survival must start at (0, 1)")
        if not np.all(np.isfinite(times)) or np.any(np.diff(times) <= 0):
            raise DomainError("knot times must be finite and strictly increasing")
        if np.any(np.diff(surv) > 0) or surv.min() < 0 or surv.max() > 1:
            raise DomainError("knot survival values must be nonincreasing within [0, 1]")
        if surv[-1] != 0:
            raise DomainError("empirical survival must end at 0 (defective lifetimes are rejected)")
        object.__setattr__(self, "knots", tuple(pts))

    @property
    def _times(self):
        return np.array([p[0] for p in self.knots])

    @property
    def _surv(self):
        return np.array([p[1] for p in self.knots])

    def survival(self, t):
        t = np.asarray(t, dtype=np.float64)
        out = np.interp(np.minimum(t, self._times[-1]), self._times, self._surv)
        return np.where(t >= self._times[-1], 0.0, out)

    def inverse_survival(self, v):
        v = np.asarray(v, dtype=np.float64)
        times, surv = self._times, self._surv
        k = np.searchsorted(-surv, -v, side="left")
        k = np.clip(k, 1, len(surv) - 1)
        s0, s1 = surv[k - 1], surv[k]
        t0, t1 = times[k - 1], times[k]
        out = t0 + (s0 - v) / (s0 - s1) * (t1 - t0)
        return np.where(v >= 1.0, 0.0, out)

    def breakpoints(self):
        return self._times[1:].copy()


def _subset_products(cols: np.ndarray) -> np.ndarray:
    """(2^n, T) array of prod_{i in A} cols[i]; cols is (n, T)."""
    out = np.ones((1, cols.shape[1]))
    for row in cols:
        out = np.concatenate([out, out * row], axis=0)
    return out


def _subset_minima(cols: np.ndarray) -> np.ndarray:
    """(2^n, T) array of min_{i in A} cols[i], 1 for the empty set."""
    out = np.ones((1, cols.shape[1]))
    for row in cols:
        out = np.concatenate([out, np.minimum(out, row)], axis=0)
    return out


def _clamp(probs: np.ndarray) -> np.ndarray:
    low = probs.min()
    if low < -CLAMP_THRESHOLD:
        raise NumericalError(
            f"state-vector probability {low:.3e} is negative; the joint model is inconsistent"
        )
    if low < 0:
        log.debug("clamping state-vector cancellation noise down to 0 (min %.3e)", low)
        probs = np.maximum(probs, 0.0)
        probs = probs / probs.sum(axis=0, keepdims=True)
    return probs


class JointLifetimeModel:
    """Joint law of (T_1, ..., T_n)."""

    n: int
    kind = "joint"
    is_independent = False

    def joint_survival(self, t) -> float:
        raise NotImplementedError

    def joint_cdf(self, t) -> float:
        raise NotImplementedError

    def marginal_survival(self, ts) -> np.ndarray:
        """(n, T) array of R_i(t)."""
        raise NotImplementedError

    def survival_on_subsets(self, ts) -> np.ndarray:
        """(2^n, T) array of Pr(T_i > t for all i in A)."""
        raise NotImplementedError

    def cdf_on_subsets(self, ts) -> np.ndarray:
        """(2^n, T) array of Pr(T_i <= t for all i in A)."""
        raise NotImplementedError

    def state_probs(self, ts) -> np.ndarray:
        """(2^n, T) array of Pr(X(t) = e_A).

        Default route: G(e_B, t) = Pr(T_i <= t for i outside B) for every B,
        followed by one Moebius transform.
        """
        g = self.cdf_on_subsets(ts)[::-1]
        return _clamp(mobius_array(g))

    def sample(self, rng, count: int) -> np.ndarray:
        raise NotImplementedError

    def breakpoints(self) -> np.ndarray:
        return np.empty(0)

    def time_scale(self) -> float:
        return 1.0

    def _check_vector(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        if t.shape != (self.n,):
            raise DimensionMismatch(f"expected a time vector of length {self.n}, got {t.shape}")
        if np.isnan(t).any() or (t < 0).any():
            raise DomainError("times must lie in [0, inf]")
        return t


class _MarginalBased(JointLifetimeModel):
    def __init__(self, marginals: Sequence[MarginalLifetime]):
        marginals = tuple(marginals)
        self.n = check_n(len(marginals))
        for m in marginals:
            if not isinstance(m, MarginalLifetime):
                raise TypeError(f"expected MarginalLifetime, got {type(m).__name__}")
        self.marginals = marginals

    def __eq__(self, other):
        return type(self) is type(other) and self.marginals == other.marginals

    def __hash__(self):
        return hash((type(self).__name__, self.marginals))

    def __repr__(self):
        return f"{type(self).__name__}({list(self.marginals)!r})"

    def marginal_survival(self, ts):
        ts = _as_times(ts)
        return np.array([m.survival(ts) for m in self.marginals])

    def marginal_cdf(self, ts):
        ts = _as_times(ts)
        return np.array([m.cdf(ts) for m in self.marginals])

    def breakpoints(self):
        pts = [m.breakpoints() for m in self.marginals]
        return np.unique(np.concatenate(pts)) if pts else np.empty(0)

    def time_scale(self):
        return max(1.0, max(m.median() for m in self.marginals))

    @property
    def all_exponential(self) -> bool:
        return all(isinstance(m, Exponential) for m in self.marginals)


class Independent(_MarginalBased):
    kind = "independent"
    is_independent = True

    def joint_survival(self, t):
        t = self._check_vector(t)
        return float(np.prod([m.survival(ti) for m, ti in zip(self.marginals, t)]))

    def joint_cdf(self, t):
        t = self._check_vector(t)
        return float(np.prod([m.cdf(ti) for m, ti in zip(self.marginals, t)]))

    def survival_on_subsets(self, ts):
        return _subset_products(self.marginal_survival(ts))

    def cdf_on_subsets(self, ts):
        return _subset_products(self.marginal_cdf(ts))

    def state_probs(self, ts):
        rel = self.marginal_survival(ts)
        out = np.ones((1, rel.shape[1]))
        for r in rel:
            out = np.concatenate([out * (1.0 - r), out * r], axis=0)
        return out

    def sample(self, rng, count):
        u = make_rng(rng).random((count, self.n))
        v = 1.0 - u
        return np.column_stack([m.inverse_survival(v[:, i]) for i, m in enumerate(self.marginals)])


class Comonotone(_MarginalBased):
    """T_i = S_i^{-1}(V) for one shared uniform V."""

    kind = "comonotone"

    def joint_survival(self, t):
        t = self._check_vector(t)
        return float(min(m.survival(ti) for m, ti in zip(self.marginals, t)))

    def joint_cdf(self, t):
        t = self._check_vector(t)
        return float(min(m.cdf(ti) for m, ti in zip(self.marginals, t)))

    def survival_on_subsets(self, ts):
        return _subset_minima(self.marginal_survival(ts))

    def cdf_on_subsets(self, ts):
        return _subset_minima(self.marginal_cdf(ts))

    def sample(self, rng, count):
        v = 1.0 - make_rng(rng).random(count)
        return np.column_stack([m.inverse_survival(v) for m in self.marginals])


class DiscreteJoint(JointLifetimeModel):
    """Finitely supported joint law: lifetime vectors with probabilities."""

    kind = "discrete_joint"

    def __init__(self, atoms, probs):
        atoms = np.atleast_2d(np.asarray(atoms, dtype=np.float64))
        probs = np.asarray(probs, dtype=np.float64).ravel()
        if atoms.shape[0] != probs.shape[0] or atoms.shape[0] == 0:
            raise DimensionMismatch("need one probability per atom and at least one atom")
        self.n = check_n(atoms.shape[1])
        if np.isnan(atoms).any() or (atoms < 0).any():
            raise DomainError("atom lifetimes must lie in [0, inf]")
        if (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-12:
            raise DomainError("atom probabilities must be nonnegative and sum to 1")
        # Kept as given (not renormalized) so a serialized model reloads bit-identically.
        self.atoms = atoms
        self.probs = probs
        self.atoms.setflags(write=False)
        self.probs.setflags(write=False)

    def __eq__(self, other):
        return (
            isinstance(other, DiscreteJoint)
            and np.array_equal(self.atoms, other.atoms)
            and np.array_equal(self.probs, other.probs)
        )

    def __hash__(self):
        return hash((self.atoms.tobytes(), self.probs.tobytes()))

    def __repr__(self):
        return f"DiscreteJoint(atoms={self.atoms.tolist()}, probs={self.probs.tolist()})"

    def joint_survival(self, t):
        t = self._check_vector(t)
        return float(self.probs[np.all(self.atoms > t, axis=1)].sum())

    def joint_cdf(self, t):
        t = self._check_vector(t)
        return float(self.probs[np.all(self.atoms <= t, axis=1)].sum())

    def marginal_survival(self, ts):
        ts = _as_times(ts)
        alive = self.atoms[:, :, None] > ts[None, None, :]
        return np.einsum("k,kit->it", self.probs, alive.astype(np.float64))

    def _alive_masks(self, ts) -> np.ndarray:
        ts = _as_times(ts)
        bits = (1 << np.arange(self.n))[None, :, None]
        return ((self.atoms[:, :, None] > ts[None, None, :]) * bits).sum(axis=1)

    def _subset_sums(self, hit: np.ndarray) -> np.ndarray:
        # hit is (2^n, K, T) boolean: atom k counts for subset A at time t.
        return np.einsum("k,akt->at", self.probs, hit.astype(np.float64))

    def survival_on_subsets(self, ts):
        alive = self._alive_masks(ts)
        subsets = np.arange(1 << self.n)[:, None, None]
        return self._subset_sums((alive[None] & subsets) == subsets)

    def cdf_on_subsets(self, ts):
        alive = self._alive_masks(ts)
        subsets = np.arange(1 << self.n)[:, None, None]
        return self._subset_sums((alive[None] & subsets) == 0)

    def direct_state_probs(self, ts) -> np.ndarray:
        """Pr(X(t) = e_A) by classifying each atom; the oracle for ``state_probs``."""
        alive = self._alive_masks(ts)
        out = np.zeros((1 << self.n, alive.shape[1]))
        for col in range(alive.shape[1]):
            np.add.at(out[:, col], alive[:, col], self.probs)
        return out

    def sample(self, rng, count):
        u = make_rng(rng).random(count)
        idx = np.searchsorted(np.cumsum(self.probs), u, side="right")
        idx = np.minimum(idx, len(self.probs) - 1)
        return self.atoms[idx].copy()

    def breakpoints(self):
        return np.unique(self.atoms)

    def time_scale(self):
        finite = self.atoms[np.isfinite(self.atoms)]
        return max(1.0, float(finite.max())) if finite.size else 1.0


@dataclass(frozen=True)
class StateVectorDistribution:
    t: float
    probs: np.ndarray

    def __getitem__(self, mask: int) -> float:
        return float(self.probs[mask])

    def count_distribution(self) -> np.ndarray:
        """Pr(|X(t)| = j) for j = 0..n."""
        n = len(self.probs).bit_length() - 1
        card = np.array([bin(a).count("1") for a in range(1 << n)])
        return np.bincount(card, weights=self.probs, minlength=n + 1)


def joint_survival(j: JointLifetimeModel, t) -> float:
    return j.joint_survival(t)


def joint_cdf(j: JointLifetimeModel, t) -> float:
    return j.joint_cdf(t)


def state_vector_dist(j: JointLifetimeModel, t: float) -> StateVectorDistribution:
    ts = _as_times(t)
    if ts.size != 1:
        raise DimensionMismatch("state_vector_dist takes a single time")
    probs = j.state_probs(ts)[:, 0]
    probs.setflags(write=False)
    return StateVectorDistribution(float(ts[0]), probs)


def pgf_eval(j: JointLifetimeModel, z, t: float):
    """G(z, t) = E[prod z_i^{X_i(t)}] = sum_A Pr(X(t) = e_A) prod_{i in A} z_i."""
    z = np.asarray(z)
    if z.shape != (j.n,):
        raise DimensionMismatch(f"expected z of length {j.n}")
    if (np.abs(z) > 1).any():
        raise DomainError("pgf arguments must satisfy |z_i| <= 1")
    probs = state_vector_dist(j, t).probs
    mono = np.ones(1, dtype=z.dtype if np.iscomplexobj(z) else np.float64)
    for zi in z:
        mono = np.concatenate([mono, mono * zi])
    val = probs @ mono
    return complex(val) if np.iscomplexobj(val) else float(val)


def sample_lifetimes(j: JointLifetimeModel, seed, count: int) -> np.ndarray:
    """(count, n) lifetime draws from one PCG64 stream in a fixed draw order."""
    if count < 1:
        raise RangeError("count must be at least 1")
    return j.sample(make_rng(seed), count)
