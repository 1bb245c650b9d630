"""Random systems and lifetime models shared by the test modules."""

import itertools

import numpy as np

from relilat.latpoly import INF, WeightedLatticePolynomial
from relilat.lifetimes import Comonotone, DiscreteJoint, Exponential, Independent, Weibull
from relilat.setfun import SetFunction
from relilat.structure import from_path_sets


def random_structure(rng, n):
    """Semicoherent structure generated by 1..4 random nonempty path sets."""
    k = int(rng.integers(1, 5))
    paths = [int(rng.integers(1, 1 << n)) for _ in range(k)]
    return from_path_sets(n, paths)


def random_weights(rng, n, finite=False):
    """Nondecreasing w on subsets of [n], generated as a max-closure of random terms."""
    seed = np.zeros(1 << n)
    for _ in range(int(rng.integers(1, 6))):
        mask = int(rng.integers(0 if rng.random() < 0.2 else 1, 1 << n))
        val = float(np.round(rng.uniform(0.0, 3.0), 2))
        if not finite and rng.random() < 0.3:
            val = INF
        seed[mask] = max(seed[mask], val)
    masks = np.arange(1 << n)
    for i in range(n):
        has = (masks >> i) & 1 == 1
        seed[has] = np.maximum(seed[has], seed[masks[has] ^ (1 << i)])
    if seed[-1] == 0:
        seed[-1] = INF if not finite else 1.0
    return WeightedLatticePolynomial(SetFunction(n, seed))


def random_marginals(rng, n):
    out = []
    for _ in range(n):
        if rng.random() < 0.6:
            out.append(Exponential(float(rng.uniform(0.2, 3.0))))
        else:
            out.append(Weibull(float(rng.uniform(0.5, 3.0)), float(rng.uniform(0.5, 2.0))))
    return out


def random_discrete(rng, n, atoms=6):
    pts = np.round(rng.uniform(0.0, 3.0, size=(atoms, n)), 1)
    probs = rng.dirichlet(np.ones(atoms))
    probs[-1] = 1.0 - probs[:-1].sum()
    return DiscreteJoint(pts, np.abs(probs))


def random_model(rng, n, kind):
    if kind == "independent":
        return Independent(random_marginals(rng, n))
    if kind == "comonotone":
        return Comonotone(random_marginals(rng, n))
    return random_discrete(rng, n)


def binary_vectors(n):
    return [list(x) for x in itertools.product((0, 1), repeat=n)]


def brute_mle(table, x):
    """Sum over all binary states of v(A) prod x_i^{a_i} (1 - x_i)^{1 - a_i}."""
    n = len(x)
    total = 0.0
    for mask in range(1 << n):
        if table[mask]:
            w = 1.0
            for i in range(n):
                w *= x[i] if mask >> i & 1 else 1.0 - x[i]
            total += w
    return total
