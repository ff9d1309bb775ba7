import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vecmp.nn import NNIndex


def brute_force(points, q):
    """Scalar linear scan in float64."""
    dists = [float(np.linalg.norm(np.asarray(p, float) - np.asarray(q, float)))
             for p in points]
    order = sorted(range(len(points)), key=lambda i: (dists[i], i))
    return order, dists


class TestInsert:
    def test_empty_then_one(self):
        idx = NNIndex(dim=3)
        assert len(idx) == 0
        idx.insert(np.zeros(3, np.float32), "a")
        assert len(idx) == 1

    def test_hundred_inserts(self):
        idx = NNIndex(dim=2)
        rng = np.random.default_rng(1)
        for i in range(100):
            idx.insert(rng.normal(size=2).astype(np.float32), i)
        assert len(idx) == 100

    def test_inserted_point_is_own_nearest(self):
        idx = NNIndex(dim=4)
        rng = np.random.default_rng(2)
        pts = [rng.normal(size=4).astype(np.float32) for _ in range(20)]
        for i, p in enumerate(pts):
            idx.insert(p, i)
        for i, p in enumerate(pts):
            payload, dist = idx.nearest(p)
            assert payload == i and dist == 0.0

    def test_duplicate_payload_rejected(self):
        idx = NNIndex(dim=1)
        idx.insert(np.zeros(1, np.float32), "x")
        with pytest.raises(ValueError, match="duplicate"):
            idx.insert(np.ones(1, np.float32), "x")

    def test_dim_mismatch_rejected(self):
        idx = NNIndex(dim=2)
        with pytest.raises(ValueError):
            idx.insert(np.zeros(3, np.float32), 0)


class TestNearest:
    def test_single_point(self):
        idx = NNIndex(dim=1)
        idx.insert(np.array([2.0], np.float32), "only")
        assert idx.nearest(np.array([9.0], np.float32))[0] == "only"

    def test_points_on_a_line(self):
        idx = NNIndex(dim=1)
        for i, x in enumerate([0.0, 1.0, 3.0]):
            idx.insert(np.array([x], np.float32), i)
        payload, dist = idx.nearest(np.array([1.9], np.float32))
        assert payload == 1
        assert dist == pytest.approx(0.9, abs=1e-6)

    def test_empty_index_rejected(self):
        with pytest.raises(ValueError):
            NNIndex(dim=1).nearest(np.zeros(1, np.float32))

    def test_tie_breaks_by_insertion_order(self):
        idx = NNIndex(dim=1)
        idx.insert(np.array([1.0], np.float32), "first")
        idx.insert(np.array([-1.0], np.float32), "second")
        assert idx.nearest(np.zeros(1, np.float32))[0] == "first"

    def test_thousand_queries_match_brute_force(self):
        rng = np.random.default_rng(5)
        pts = [rng.normal(size=3).astype(np.float32) for _ in range(1000)]
        idx = NNIndex(dim=3)
        for i, p in enumerate(pts):
            idx.insert(p, i)
        for _ in range(1000):
            q = rng.normal(size=3).astype(np.float32)
            order, dists = brute_force(pts, q)
            payload, dist = idx.nearest(q)
            assert payload == order[0]
            assert dist == pytest.approx(dists[order[0]], rel=1e-5)


class TestKNearest:
    def test_k_at_least_size_returns_all_sorted(self):
        rng = np.random.default_rng(7)
        pts = [rng.normal(size=2).astype(np.float32) for _ in range(6)]
        idx = NNIndex(dim=2)
        for i, p in enumerate(pts):
            idx.insert(p, i)
        q = rng.normal(size=2).astype(np.float32)
        got = idx.k_nearest(q, 50)
        assert len(got) == 6
        assert [p for p, _ in got] == brute_force(pts, q)[0]

    def test_k_one_agrees_with_nearest(self):
        rng = np.random.default_rng(9)
        idx = NNIndex(dim=3)
        pts = [rng.normal(size=3).astype(np.float32) for _ in range(64)]
        for i, p in enumerate(pts):
            idx.insert(p, i)
        for _ in range(32):
            q = rng.normal(size=3).astype(np.float32)
            assert idx.k_nearest(q, 1)[0] == idx.nearest(q)

    def test_zero_k_rejected(self):
        idx = NNIndex(dim=1)
        idx.insert(np.zeros(1, np.float32), 0)
        with pytest.raises(ValueError):
            idx.k_nearest(np.zeros(1, np.float32), 0)

    def test_random_instances_match_partial_sort_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(2, 80))
            d = int(rng.integers(1, 6))
            pts = [rng.normal(size=d).astype(np.float32) for _ in range(n)]
            idx = NNIndex(dim=d)
            for i, p in enumerate(pts):
                idx.insert(p, i)
            q = rng.normal(size=d).astype(np.float32)
            k = int(rng.integers(1, 12))
            got = idx.k_nearest(q, k)
            expect = brute_force(pts, q)[0][:k]
            assert [p for p, _ in got] == expect
            assert [d_ for _, d_ in got] == sorted(d_ for _, d_ in got)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_insert_never_increases_nearest_distance(seed):
    rng = np.random.default_rng(seed)
    idx = NNIndex(dim=2)
    q = rng.normal(size=2).astype(np.float32)
    idx.insert(rng.normal(size=2).astype(np.float32), 0)
    last = idx.nearest(q)[1]
    for i in range(1, 12):
        idx.insert(rng.normal(size=2).astype(np.float32), i)
        now = idx.nearest(q)[1]
        assert now <= last + 1e-7
        last = now
