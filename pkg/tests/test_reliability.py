import math

import numpy as np
import pytest

from gen import random_model, random_structure, random_weights
from relilat.errors import DimensionMismatch, DomainError, ModelMismatch, NonconvergenceError
from relilat.latpoly import (
    INF,
    SymmetricProfile,
    WeightedLatticePolynomial,
    lp_from_structure,
    make_symmetric,
    make_weighted_max,
    make_weighted_min,
    weighted_bridge,
)
from relilat.lifetimes import (
    Comonotone,
    DiscreteJoint,
    Exponential,
    Independent,
    PiecewiseEmpirical,
    Weibull,
)
from relilat.reliability import (
    CLOSED_FORM_EXPONENTIAL,
    PIECEWISE_QUADRATURE,
    Formula,
    ReliabilityQuery,
    all_routes,
    distribution_routes,
    mttf,
    mttf_exponential_unweighted,
    mttf_exponential_weighted,
    reliability_at,
    reliability_curve,
    state_probs_via_pgf,
    symmetric_reliability_at,
    weighted_max_reliability,
    weighted_min_reliability,
    wlp_distribution_at,
)
from relilat.setfun import SetFunction
from relilat.structure import bridge, make_kofn, parallel, series

KINDS = ("independent", "comonotone", "discrete")


def exp_model(*rates):
    return Independent([Exponential(r) for r in rates])


def test_series_exponential():
    rates = (0.5, 1.0, 2.5)
    q = ReliabilityQuery(series(3), exp_model(*rates))
    for t in (0.0, 0.3, 1.7):
        assert reliability_at(q, t) == pytest.approx(math.exp(-sum(rates) * t), rel=1e-13)


def test_two_out_of_three_iid():
    p = 0.7
    j = exp_model(*[-math.log(p)] * 3)
    for f in Formula:
        q = ReliabilityQuery(make_kofn(3, 2), j, f)
        assert reliability_at(q, 1.0) == pytest.approx(3 * p**2 - 2 * p**3, abs=1e-14)


def test_comonotone_parallel_pair():
    j = Comonotone([Exponential(1.0), Exponential(1.0)])
    for f in (Formula.STATE_VECTOR, Formula.STATE_VECTOR_DUAL, Formula.MOBIUS_SURVIVAL,
              Formula.MOBIUS_CDF, Formula.AUTO):
        q = ReliabilityQuery(parallel(2), j, f)
        for t in (0.0, 0.5, 2.0):
            assert reliability_at(q, t) == pytest.approx(math.exp(-t), abs=1e-15)


def test_kofn_equals_binomial_tail():
    p = 0.45
    n = 6
    j = exp_model(*[-math.log(p)] * n)
    for k in range(1, n + 1):
        tail = sum(math.comb(n, i) * p**i * (1 - p) ** (n - i) for i in range(k, n + 1))
        assert reliability_at(ReliabilityQuery(make_kofn(n, k), j), 1.0) == pytest.approx(tail, abs=1e-13)


@pytest.mark.parametrize("kind", KINDS)
def test_routes_agree_on_random_systems(kind):
    rng = np.random.default_rng({"independent": 1, "comonotone": 2, "discrete": 3}[kind])
    for _ in range(15):
        n = int(rng.integers(1, 7))
        system = random_weights(rng, n) if rng.random() < 0.5 else random_structure(rng, n)
        j = random_model(rng, n, kind)
        for t in rng.uniform(0, 3, size=4):
            vals = list(all_routes(system, j, float(t)).values())
            assert max(vals) - min(vals) < 1e-10
            dist = distribution_routes(system, j, float(t))
            assert max(dist.values()) - min(dist.values()) < 1e-10
            assert dist["statevec"] + vals[0] == pytest.approx(1.0, abs=1e-12)


def test_mle_route_needs_independence():
    with pytest.raises(ModelMismatch):
        ReliabilityQuery(bridge(), Comonotone([Exponential(1.0)] * 5), Formula.MLE_DNF)
    with pytest.raises(DimensionMismatch):
        ReliabilityQuery(bridge(), exp_model(1.0, 1.0))
    with pytest.raises(DomainError):
        reliability_at(ReliabilityQuery(bridge(), exp_model(*[1.0] * 5)), -1.0)


def test_auto_resolution():
    assert ReliabilityQuery(series(2), exp_model(1, 1)).resolved_formula is Formula.MLE_PRIMAL_MOBIUS
    dj = DiscreteJoint([[1, 2]], [1.0])
    assert ReliabilityQuery(series(2), dj).resolved_formula is Formula.MOBIUS_SURVIVAL


def test_curve_with_lower_bound():
    w = np.full(4, 2.0)
    w[3] = INF
    p = WeightedLatticePolynomial(SetFunction(2, w))
    q = ReliabilityQuery(p, exp_model(1.0, 3.0))
    rep = reliability_curve(q, np.linspace(0, 1.99, 50))
    assert np.all(rep.values == 1.0)
    assert rep.formula_used[0] is Formula.MLE_PRIMAL_MOBIUS


def test_curve_matches_points_and_is_nonincreasing():
    rng = np.random.default_rng(17)
    grid = np.linspace(0, 4, 100)
    for i in range(50):
        n = int(rng.integers(1, 6))
        system = random_weights(rng, n) if i % 2 else random_structure(rng, n)
        j = random_model(rng, n, KINDS[i % 3])
        q = ReliabilityQuery(system, j)
        rep = reliability_curve(q, grid)
        assert np.all(np.diff(rep.values) <= 1e-13)
        if i < 5:
            assert rep.values.tolist() == [reliability_at(q, t) for t in grid]


def test_breakpoint_uses_right_side():
    p = make_weighted_max([2.0])
    q = ReliabilityQuery(p, exp_model(1.0))
    assert reliability_at(q, 2.0) == 0.0
    assert reliability_at(q, 1.999999) > 0.1


def test_mttf_examples():
    l1, l2 = 0.7, 1.9
    r = mttf(ReliabilityQuery(series(3), exp_model(1.0, 2.0, 3.0)))
    assert r.method == CLOSED_FORM_EXPONENTIAL
    assert r.value == pytest.approx(1 / 6, rel=1e-15)
    par = ReliabilityQuery(parallel(2), exp_model(l1, l2))
    expect = 1 / l1 + 1 / l2 - 1 / (l1 + l2)
    assert mttf(par).value == pytest.approx(expect, rel=1e-14)
    assert mttf(par, PIECEWISE_QUADRATURE).value == pytest.approx(expect, abs=1e-9)
    lam = 1.3
    kofn = ReliabilityQuery(make_kofn(3, 2), exp_model(lam, lam, lam))
    assert mttf(kofn).value == pytest.approx(5 / (6 * lam), rel=1e-12)
    u = 1.5
    cap = ReliabilityQuery(make_weighted_max([u]), exp_model(lam))
    assert mttf(cap).value == pytest.approx(-math.expm1(-lam * u) / lam, rel=1e-14)
    assert mttf(cap, PIECEWISE_QUADRATURE).value == pytest.approx(-math.expm1(-lam * u) / lam, abs=1e-9)


def test_weighted_formula_reduces_to_unweighted_exactly():
    rng = np.random.default_rng(6)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        s = random_structure(rng, n)
        rates = rng.uniform(0.1, 10, size=n)
        assert mttf_exponential_weighted(lp_from_structure(s), rates) == mttf_exponential_unweighted(s, rates)


def test_large_weights_approach_unweighted():
    rng = np.random.default_rng(8)
    for _ in range(10):
        n = int(rng.integers(1, 6))
        s = random_structure(rng, n)
        w = np.where(s.table == 1, 1e6, 0.0)
        big = mttf_exponential_weighted(WeightedLatticePolynomial(SetFunction(n, w)), [1.0] * n)
        assert big == pytest.approx(mttf_exponential_unweighted(s, [1.0] * n), rel=1e-4)


def test_closed_form_matches_quadrature():
    rng = np.random.default_rng(10)
    for i in range(20):
        n = int(rng.integers(1, 6))
        system = random_weights(rng, n) if i % 2 else random_structure(rng, n)
        q = ReliabilityQuery(system, exp_model(*rng.uniform(0.1, 10, size=n)))
        exact = mttf(q)
        if math.isinf(exact.value):
            continue
        assert mttf(q, PIECEWISE_QUADRATURE).value == pytest.approx(exact.value, rel=1e-6)


def test_infinite_mttf_when_always_alive():
    w = np.full(2, INF)
    p = WeightedLatticePolynomial(SetFunction(1, w))
    assert mttf(ReliabilityQuery(p, exp_model(1.0))).value == math.inf
    assert mttf(ReliabilityQuery(p, Independent([Weibull(2, 1)]))).value == math.inf


def test_quadrature_for_dependent_and_empirical_models():
    dj = DiscreteJoint([[1.0, 2.0], [3.0, 0.5]], [0.25, 0.75])
    q = ReliabilityQuery(parallel(2), dj)
    res = mttf(q)
    assert res.method == PIECEWISE_QUADRATURE
    assert res.value == pytest.approx(0.25 * 2.0 + 0.75 * 3.0, abs=1e-9)
    emp = Independent([PiecewiseEmpirical(((2.0, 0.0),))])
    assert mttf(ReliabilityQuery(series(1), emp)).value == pytest.approx(1.0, abs=1e-9)
    co = Comonotone([Exponential(1.0), Exponential(2.0)])
    assert mttf(ReliabilityQuery(parallel(2), co)).value == pytest.approx(1.0, abs=1e-9)


def test_divergent_tail_detected():
    dj = DiscreteJoint([[math.inf, 1.0], [2.0, 3.0]], [0.5, 0.5])
    with pytest.raises(NonconvergenceError):
        mttf(ReliabilityQuery(parallel(2), dj))


def test_closed_form_method_requires_exponentials():
    with pytest.raises(ModelMismatch):
        mttf(ReliabilityQuery(series(1), Independent([Weibull(2, 1)])), CLOSED_FORM_EXPONENTIAL)


def test_distribution_examples():
    lam = 0.8
    j = exp_model(lam)
    for t in (0.0, 0.5, 3.0):
        assert wlp_distribution_at(lp_from_structure(series(1)), j, t) == pytest.approx(
            -math.expm1(-lam * t), abs=1e-15
        )
    j2 = exp_model(0.5, 1.5)
    assert wlp_distribution_at(lp_from_structure(series(2)), j2, 1.2) == pytest.approx(
        -math.expm1(-2.0 * 1.2), abs=1e-15
    )


def test_symmetric_reliability():
    prof = SymmetricProfile((0.0, 1.0, 2.0, INF))
    j = exp_model(0.4, 0.9, 1.3)
    for t in (0.0, 0.5, 1.5, 2.5, 10.0):
        generic = reliability_at(ReliabilityQuery(make_symmetric(prof), j), t)
        assert symmetric_reliability_at(prof, j, t) == pytest.approx(generic, abs=1e-12)
        dist = wlp_distribution_at(make_symmetric(prof), j, t)
        assert dist == pytest.approx(1 - symmetric_reliability_at(prof, j, t), abs=1e-12)
    bounded = SymmetricProfile((0.0, 1.0, 2.0))
    assert symmetric_reliability_at(bounded, exp_model(1.0, 1.0), 2.0) == 0.0
    p = 0.35
    iid = exp_model(*[-math.log(p)] * 5)
    kofn = SymmetricProfile((0, 0, 0, INF, INF, INF))
    tail = sum(math.comb(5, i) * p**i * (1 - p) ** (5 - i) for i in range(3, 6))
    assert symmetric_reliability_at(kofn, iid, 1.0) == pytest.approx(tail, abs=1e-14)


def test_weighted_min_max_closed_forms():
    rng = np.random.default_rng(14)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        bounds = rng.uniform(0, 3, size=n)
        bounds[rng.random(n) < 0.2] = INF
        j = Independent([Exponential(r) for r in rng.uniform(0.2, 3, size=n)])
        pmin, pmax = make_weighted_min(bounds), make_weighted_max(bounds)
        for t in rng.uniform(0, 4, size=5):
            t = float(t)
            rmin = reliability_at(ReliabilityQuery(pmin, j), t)
            rmax = reliability_at(ReliabilityQuery(pmax, j), t)
            assert weighted_min_reliability(pmin, j, t) == pytest.approx(rmin, abs=1e-12)
            assert weighted_max_reliability(pmax, j, t) == pytest.approx(rmax, abs=1e-12)
            assert weighted_min_reliability(pmin, j, t, False) == pytest.approx(rmin, abs=1e-12)
            assert weighted_max_reliability(pmax, j, t, False) == pytest.approx(rmax, abs=1e-12)


def test_weighted_min_max_dependent_general_form():
    dj = DiscreteJoint([[0.5, 2.0, 1.0], [3.0, 0.2, 2.5]], [0.4, 0.6])
    bounds = [1.0, 0.0, 2.0]
    for t in (0.1, 0.7, 1.5, 2.2):
        assert weighted_min_reliability(make_weighted_min(bounds), dj, t, False) == pytest.approx(
            reliability_at(ReliabilityQuery(make_weighted_min(bounds), dj), t), abs=1e-12
        )
        assert weighted_max_reliability(make_weighted_max(bounds), dj, t, False) == pytest.approx(
            reliability_at(ReliabilityQuery(make_weighted_max(bounds), dj), t), abs=1e-12
        )


def test_state_probs_via_pgf():
    dj = DiscreteJoint([[1.0, 3.0, 0.5], [2.0, 0.5, 2.5]], [0.3, 0.7])
    for t in (0.4, 1.0, 2.0):
        direct = dj.direct_state_probs(np.array([t]))[:, 0]
        assert np.allclose(state_probs_via_pgf(dj, t), direct, atol=1e-12)


def test_weighted_bridge_beyond_upper_bound():
    j = exp_model(*[1.0] * 5)
    wb = weighted_bridge(1.0, 2.0)
    assert reliability_at(ReliabilityQuery(wb, j), 0.5) >= reliability_at(ReliabilityQuery(bridge(), j), 0.5)
    # past u only the two unbounded paths {1,4} and {2,5} remain
    r = math.exp(-2.5)
    assert reliability_at(ReliabilityQuery(wb, j), 2.5) == pytest.approx(1 - (1 - r * r) ** 2, abs=1e-15)
