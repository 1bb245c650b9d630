"""Monte Carlo oracle: sample lifetimes, evaluate the system lifetime directly.

Every draw is also pushed through phi_{v_t}(X(t)) and compared with
Ind(p_w(T) > t); any disagreement is an implementation bug and raises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .errors import DimensionMismatch, DomainError, IdentityViolation, InfiniteSample, RangeError
from .latpoly import WeightedLatticePolynomial, lp_from_structure
from .lifetimes import JointLifetimeModel
from .structure import SystemStructure

DEFAULT_SAMPLES = 100_000
BLOCK_SIZE = 1 << 14
MIN_SAMPLES = 100


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int

    def covers(self, exact: float, k: float = 3.0, slack: float = 1e-12) -> bool:
        """|exact - mean| <= k * stderr + slack.

        The slack absorbs rounding in the exact value when every sample agrees
        and the stderr is zero.
        """
        return abs(exact - self.mean) <= k * self.stderr + slack


def _as_wlp(p) -> WeightedLatticePolynomial:
    if isinstance(p, SystemStructure):
        return lp_from_structure(p)
    if isinstance(p, WeightedLatticePolynomial):
        return p
    raise TypeError(f"unsupported system type {type(p).__name__}")


def _check(p: WeightedLatticePolynomial, j: JointLifetimeModel, n_samples: int, seed: int):
    if p.n != j.n:
        raise DimensionMismatch(f"system has {p.n} components, lifetimes describe {j.n}")
    if n_samples < MIN_SAMPLES:
        raise RangeError(f"n_samples must be at least {MIN_SAMPLES}, got {n_samples}")
    if int(seed) != seed or seed < 0:
        raise DomainError(f"seed must be a nonnegative integer, got {seed!r}")


def sample_blocks(j: JointLifetimeModel, n_samples: int, seed: int) -> Iterator[np.ndarray]:
    """Lifetime draws in fixed-size blocks; block b uses the stream SeedSequence([seed, b])."""
    done = 0
    block = 0
    while done < n_samples:
        size = min(BLOCK_SIZE, n_samples - done)
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), block])))
        yield j.sample(rng, size)
        done += size
        block += 1


def check_identity(p: WeightedLatticePolynomial, s: SystemStructure, lifetimes: np.ndarray,
                   t: float) -> np.ndarray:
    """Ind(p_w(T) > t) per row, after asserting it equals phi_{v_t}(X(t))."""
    direct = p.eval_minimal(lifetimes) > t
    weights = 1 << np.arange(p.n, dtype=np.int64)
    masks = (lifetimes > t).astype(np.int64) @ weights
    via_structure = s.table[masks] == 1
    bad = np.flatnonzero(direct != via_structure)
    if bad.size:
        row = lifetimes[bad[0]]
        raise IdentityViolation(
            f"T={row.tolist()} t={t}: Ind(p(T) > t)={int(direct[bad[0]])} "
            f"but phi_v_t(X(t))={int(via_structure[bad[0]])}"
        )
    return direct


def _bernoulli(count: int, n_samples: int, seed: int) -> McEstimate:
    mean = count / n_samples
    var = mean * (1.0 - mean) * n_samples / (n_samples - 1)
    return McEstimate(mean, math.sqrt(var / n_samples), n_samples, int(seed))


def estimate_reliability(p: Union[WeightedLatticePolynomial, SystemStructure],
                         j: JointLifetimeModel, t: float, n_samples: int = DEFAULT_SAMPLES,
                         seed: int = 0) -> McEstimate:
    """Mean of Ind(p_w(T) > t) over sampled lifetime vectors."""
    p = _as_wlp(p)
    _check(p, j, n_samples, seed)
    if np.isnan(t) or t < 0:
        raise DomainError("t must be >= 0")
    s = p.threshold(t)
    count = 0
    for block in sample_blocks(j, n_samples, seed):
        count += int(check_identity(p, s, block, t).sum())
    return _bernoulli(count, n_samples, seed)


def estimate_distribution(p, j: JointLifetimeModel, t: float, n_samples: int = DEFAULT_SAMPLES,
                          seed: int = 0) -> McEstimate:
    """Mean of Ind(p_w(T) <= t), the complement of ``estimate_reliability`` on the same draws."""
    r = estimate_reliability(p, j, t, n_samples, seed)
    return McEstimate(1.0 - r.mean, r.stderr, r.n_samples, r.seed)


def estimate_mttf(p: Union[WeightedLatticePolynomial, SystemStructure], j: JointLifetimeModel,
                  n_samples: int = DEFAULT_SAMPLES, seed: int = 0) -> McEstimate:
    """Sample mean of p_w(T)."""
    p = _as_wlp(p)
    _check(p, j, n_samples, seed)
    values = np.concatenate([p.eval_minimal(block) for block in sample_blocks(j, n_samples, seed)])
    if not np.isfinite(values).all():
        raise InfiniteSample("a sampled system lifetime is infinite; the MTTF is not finite")
    mean = math.fsum(values) / n_samples
    var = math.fsum((values - mean) ** 2) / (n_samples - 1)
    return McEstimate(mean, math.sqrt(var / n_samples), n_samples, int(seed))
