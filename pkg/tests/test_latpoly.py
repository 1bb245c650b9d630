import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import binary_vectors, random_structure, random_weights
from relilat.errors import DomainError, MonotonicityError
from relilat.latpoly import (
    INF,
    SymmetricProfile,
    WeightedLatticePolynomial,
    WlpForm,
    from_terms,
    lp_from_structure,
    make_symmetric,
    make_weighted_max,
    make_weighted_min,
    order_statistic,
    symmetric_closed_form,
    weighted_bridge,
)
from relilat.setfun import SetFunction, subset_mask
from relilat.structure import bridge, make_kofn, parallel, series

L, U = 1.0, 2.0


def weighted_bridge_by_hand(t):
    t1, t2, t3, t4, t5 = t
    return max(
        min(t1, t4),
        min(t2, t5),
        min(L, t1, t5),
        min(U, t1, t3, t5),
        min(L, t2, t4),
        min(U, t2, t3, t4),
    )


@pytest.mark.parametrize("form", list(WlpForm))
def test_weighted_bridge_example(form):
    p = weighted_bridge(L, U)
    assert p.eval([3, 0, 3, 0, 3], form) == 2.0


def test_weighted_bridge_matches_six_term_expansion():
    p = weighted_bridge(L, U)
    pts = np.random.default_rng(2).uniform(0, 4, size=(500, 5))
    for row, val in zip(pts, p.eval(pts)):
        assert val == weighted_bridge_by_hand(row)
    assert sorted(m for m, _ in p.minimal_terms) == sorted(
        subset_mask(s, 5) for s in ([1, 4], [2, 5], [1, 5], [1, 3, 5], [2, 4], [2, 3, 4])
    )


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_forms_agree_exactly(n, seed):
    rng = np.random.default_rng(seed)
    p = random_weights(rng, n)
    pts = rng.uniform(0, 4, size=(20, n))
    pts[rng.random(pts.shape) < 0.1] = INF
    d = p.eval(pts, WlpForm.DISJUNCTIVE)
    assert np.array_equal(d, p.eval(pts, WlpForm.CONJUNCTIVE))
    assert np.array_equal(d, p.eval(pts, WlpForm.MEDIAN))
    assert np.array_equal(d, p.eval_minimal(pts))


def test_idempotent_and_internal():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        p = lp_from_structure(random_structure(rng, n))
        t = float(rng.uniform(0, 10))
        assert p.eval([t] * n) == t
        pts = rng.uniform(0, 5, size=(50, n))
        vals = p.eval(pts)
        assert np.all(pts.min(axis=1) <= vals) and np.all(vals <= pts.max(axis=1))


def test_constant_polynomial():
    p = WeightedLatticePolynomial(SetFunction(3, np.full(8, 1.5)))
    assert np.all(p.eval(np.random.default_rng(0).uniform(0, 9, size=(10, 3))) == 1.5)


def test_series_parallel_and_order_statistics():
    t = np.random.default_rng(7).uniform(0, 5, size=(100, 4))
    assert np.array_equal(lp_from_structure(series(4)).eval(t), t.min(axis=1))
    assert np.array_equal(lp_from_structure(parallel(4)).eval(t), t.max(axis=1))
    for k in range(1, 5):
        p = lp_from_structure(make_kofn(4, k))
        assert np.array_equal(p.eval(t), order_statistic(t, 4 - k + 1))


@pytest.mark.parametrize("n", range(1, 11))
def test_similarity_with_structure(n):
    rng = np.random.default_rng(n)
    s = random_structure(rng, n)
    p = lp_from_structure(s)
    xs = np.array(binary_vectors(n)) if n <= 8 else rng.integers(0, 2, size=(300, n))
    gamma = np.where(xs == 1, INF, 0.0)
    expect = np.where(s.table[xs @ (1 << np.arange(n))] == 1, INF, 0.0)
    assert np.array_equal(p.eval(gamma), expect)


def test_threshold_of_unweighted_is_constant():
    p = lp_from_structure(bridge())
    for t in (0.0, 0.3, 7.0, 1e9):
        assert p.threshold(t) == bridge()


def test_threshold_weighted_bridge():
    s = weighted_bridge(L, U).threshold(1.5)
    assert subset_mask([1, 3, 5], 5) in s.minimal_paths
    assert subset_mask([1, 5], 5) not in s.minimal_paths
    assert s.minimal_paths == bridge().minimal_paths


def test_threshold_strict_and_degenerate():
    p = make_weighted_max([2.0])
    assert p.threshold(1.999).degeneracy is None
    assert p.threshold(2.0).degeneracy == "constant_zero"
    q = WeightedLatticePolynomial(SetFunction(1, np.array([2.0, INF])))
    assert q.threshold(1.0).degeneracy == "constant_one"
    assert q.threshold(2.0).degeneracy is None
    with pytest.raises(DomainError):
        p.threshold(-1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_threshold_antitone(n, seed):
    rng = np.random.default_rng(seed)
    p = random_weights(rng, n)
    ts = np.sort(rng.uniform(0, 4, size=6))
    tables = [p.threshold(t).table for t in ts]
    for a, b in zip(tables, tables[1:]):
        assert np.all(b <= a)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_lifetime_identity_exhaustive(n):
    rng = np.random.default_rng(100 + n)
    grid = np.arange(0, 3.01, 0.5)
    lifetimes = np.array(list(itertools.product(grid, repeat=n)))
    masks_w = 1 << np.arange(n)
    for _ in range(5):
        p = random_weights(rng, n)
        life = p.eval(lifetimes)
        bps = p.breakpoints()
        for t in np.unique(np.concatenate([bps, bps + 0.25, np.maximum(bps - 0.25, 0), grid])):
            s = p.threshold(t)
            phi = s.table[(lifetimes > t).astype(int) @ masks_w]
            assert np.array_equal(life > t, phi == 1)


def test_monotone_in_each_coordinate():
    rng = np.random.default_rng(9)
    for _ in range(30):
        n = int(rng.integers(1, 7))
        p = random_weights(rng, n)
        t = rng.uniform(0, 4, size=(40, n))
        bumped = t.copy()
        i = int(rng.integers(0, n))
        bumped[:, i] += rng.uniform(0, 2, size=40)
        assert np.all(p.eval(bumped) >= p.eval(t))


def test_minimal_representation_unweighted():
    s = bridge()
    rep = lp_from_structure(s).minimal_representation()
    assert sorted(int(a) for a in np.flatnonzero(rep.u_d.values == INF)) == sorted(s.minimal_paths)
    assert np.count_nonzero(rep.u_d.values) == 4
    ser = lp_from_structure(series(2)).minimal_representation()
    assert np.flatnonzero(ser.u_d.values).tolist() == [3]


def test_minimal_representation_coefficients():
    rng = np.random.default_rng(12)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        p = random_weights(rng, n)
        rep = p.minimal_representation()
        w = p.weights
        for a in range(1 << n):
            lower = [b for b in range(1 << n) if b & a == b and b != a]
            upper = [b for b in range(1 << n) if b & a == a and b != a]
            expect_d = w[a] if all(w[b] < w[a] for b in lower) else 0.0
            expect_c = w[a] if all(w[a] < w[b] for b in upper) else INF
            assert rep.u_d.values[a] == expect_d
            assert rep.u_c.values[a] == expect_c


def test_weighted_min_examples():
    p = make_weighted_min([1.0, 0.0])
    assert p.eval([0.5, 3.0]) == 1.0
    assert make_weighted_min([0.0, 0.0, 0.0]) == lp_from_structure(series(3))
    rng = np.random.default_rng(1)
    b = rng.uniform(0, 2, size=4)
    q = make_weighted_min(b)
    t = rng.uniform(0, 3, size=(1000, 4))
    assert np.array_equal(q.eval(t), np.maximum(b, t).min(axis=1))
    t2 = rng.uniform(0, 3, size=(1000, 4))
    assert np.array_equal(q.eval(np.minimum(t, t2)), np.minimum(q.eval(t), q.eval(t2)))


def test_weighted_max_examples():
    p = make_weighted_max([1.0, INF])
    assert p.eval([5.0, 0.2]) == 1.0
    assert make_weighted_max([INF] * 3) == lp_from_structure(parallel(3))
    rng = np.random.default_rng(2)
    b = rng.uniform(0, 2, size=4)
    q = make_weighted_max(b)
    t = rng.uniform(0, 3, size=(1000, 4))
    assert np.array_equal(q.eval(t), np.minimum(b, t).max(axis=1))
    t2 = rng.uniform(0, 3, size=(1000, 4))
    assert np.array_equal(q.eval(np.maximum(t, t2)), np.maximum(q.eval(t), q.eval(t2)))


def test_symmetric_examples():
    assert make_symmetric((0, 0, 0, INF)) == lp_from_structure(series(3))
    med = make_symmetric((0, 0, INF, INF))
    t = np.random.default_rng(3).uniform(0, 5, size=(100, 3))
    assert np.array_equal(med.eval(t), np.median(t, axis=1))
    prof = SymmetricProfile((0, 1, 2, INF))
    assert make_symmetric(prof).eval([0.5, 3, 3]) == 2.0
    assert symmetric_closed_form(prof, [0.5, 3, 3])[0] == 2.0
    assert prof.k_at(1.5) == 2
    assert make_symmetric(prof).threshold(1.5).table.tolist() == [
        int(bin(a).count("1") >= 2) for a in range(8)
    ]


def test_symmetric_closed_form_random():
    rng = np.random.default_rng(5)
    for _ in range(10):
        n = int(rng.integers(1, 7))
        prof = SymmetricProfile(tuple(np.sort(rng.uniform(0, 3, size=n + 1))))
        t = rng.uniform(0, 4, size=(100, n))
        assert np.array_equal(make_symmetric(prof).eval(t), symmetric_closed_form(prof, t))


def test_rejections():
    with pytest.raises(MonotonicityError, match=r"\{1\}"):
        WeightedLatticePolynomial([0.0, 2.0, 0.0, 1.0])
    with pytest.raises(MonotonicityError):
        SymmetricProfile((0.0, 2.0, 1.0))
    with pytest.raises(DomainError):
        weighted_bridge(L, U).eval([1, 1, 1, -1, 1])
    with pytest.raises(DomainError):
        WeightedLatticePolynomial([-1.0, 1.0])


def test_from_terms_closure():
    p = from_terms(2, [([1], 1.0), ([1, 2], 3.0)])
    assert p.weights.tolist() == [0.0, 1.0, 0.0, 3.0]
