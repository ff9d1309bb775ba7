import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vecmp.lanes import (aos_from_soa, as_config, interpolate_lanes, l2_distance,
                         sincos_lanes, soa_from_aos)


def cfg(*values):
    return np.asarray(values, dtype=np.float32)


class TestLayout:
    def test_two_configs_width_four(self):
        block = soa_from_aos([cfg(1, 2), cfg(3, 4)], width=4)
        assert block.valid_count == 2
        assert block.data.tolist() == [[1, 3, 1, 1], [2, 4, 2, 2]]

    def test_single_config_pads_every_lane(self):
        block = soa_from_aos([cfg(5, 6, 7)], width=4)
        assert block.valid_count == 1
        for k in range(4):
            assert block.data[:, k].tolist() == [5, 6, 7]

    def test_unpack_two_lanes(self):
        block = soa_from_aos([cfg(1, 2), cfg(3, 4)], width=2)
        a, b = aos_from_soa(block)
        assert a.tolist() == [1, 2] and b.tolist() == [3, 4]

    def test_unpack_respects_valid_count(self):
        block = soa_from_aos([cfg(9, 9)], width=8)
        assert len(aos_from_soa(block)) == 1

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            soa_from_aos([])

    def test_dim_mismatch_rejected(self):
        with pytest.raises(ValueError):
            soa_from_aos([cfg(1, 2), cfg(1, 2, 3)])

    def test_too_many_configs_rejected(self):
        with pytest.raises(ValueError):
            soa_from_aos([cfg(0.0)] * 3, width=2)

    def test_round_trip_100_random(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            n = int(rng.integers(1, 9))
            d = int(rng.integers(1, 15))
            configs = [rng.normal(size=d).astype(np.float32) for _ in range(n)]
            back = aos_from_soa(soa_from_aos(configs, width=8))
            assert len(back) == n
            for q, r in zip(configs, back):
                assert np.array_equal(q, r)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 8), st.integers(1, 10), st.integers(0, 2**31 - 1))
    def test_round_trip_property(self, n, d, seed):
        rng = np.random.default_rng(seed)
        configs = [rng.normal(size=d).astype(np.float32) for _ in range(n)]
        back = aos_from_soa(soa_from_aos(configs, width=8))
        assert all(np.array_equal(q, r) for q, r in zip(configs, back))


class TestInterpolate:
    def test_params_zero_gives_start(self):
        block = interpolate_lanes(cfg(0.5, -1), cfg(2, 3), np.zeros(8))
        assert np.array_equal(block.data, np.tile(cfg(0.5, -1)[:, None], 8))

    def test_params_one_gives_goal(self):
        block = interpolate_lanes(cfg(0.5, -1), cfg(2, 3), np.ones(8))
        assert np.array_equal(block.data, np.tile(cfg(2, 3)[:, None], 8))

    def test_midpoint(self):
        block = interpolate_lanes(cfg(0, 0), cfg(2, 4), np.asarray([0.5]))
        assert block.data[:, 0].tolist() == [1, 2]

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            interpolate_lanes(cfg(0, 0), cfg(1, 2, 3), np.zeros(4))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_reversal_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=3).astype(np.float32)
        b = rng.normal(size=3).astype(np.float32)
        t = rng.uniform(0, 1, size=8).astype(np.float32)
        fwd = interpolate_lanes(a, b, t)
        rev = interpolate_lanes(b, a, np.float32(1.0) - t)
        assert np.allclose(fwd.data, rev.data, atol=1e-6)


class TestDistance:
    def test_three_four_five(self):
        assert l2_distance(cfg(0, 0), cfg(3, 4)) == pytest.approx(5.0)

    def test_identity(self):
        q = cfg(0.1, -2.3, 7)
        assert l2_distance(q, q) == 0.0

    def test_matches_scalar_loop_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            d = int(rng.integers(1, 16))
            a = rng.normal(size=d).astype(np.float32)
            b = rng.normal(size=d).astype(np.float32)
            acc = 0.0
            for j in range(d):
                acc += (float(a[j]) - float(b[j])) ** 2
            assert l2_distance(a, b) == pytest.approx(acc ** 0.5, rel=1e-5)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_triangle_inequality(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (rng.normal(size=5).astype(np.float32) for _ in range(3))
        assert l2_distance(a, c) <= l2_distance(a, b) + l2_distance(b, c) + 1e-5


class TestSinCos:
    def test_zero(self):
        s, c = sincos_lanes(np.zeros(8, np.float32))
        assert np.array_equal(s, np.zeros(8, np.float32))
        assert np.array_equal(c, np.ones(8, np.float32))

    def test_half_pi(self):
        s, c = sincos_lanes(np.full(4, np.pi / 2, np.float32))
        assert np.all(np.abs(s - 1.0) <= 2e-6)
        assert np.all(np.abs(c) <= 2e-6)

    def test_against_extended_precision(self):
        import mpmath
        rng = np.random.default_rng(5)
        angles = rng.uniform(-4 * np.pi, 4 * np.pi, 10_000).astype(np.float32)
        s, c = sincos_lanes(angles)
        step = 251  # spot-check a deterministic subsample with mpmath
        for i in range(0, angles.size, step):
            ref_s = float(mpmath.sin(mpmath.mpf(float(angles[i]))))
            ref_c = float(mpmath.cos(mpmath.mpf(float(angles[i]))))
            assert abs(float(s[i]) - ref_s) <= 2e-6
            assert abs(float(c[i]) - ref_c) <= 2e-6
        # full 10^4 sweep against float64 trig, itself within 1e-9 here
        assert np.max(np.abs(s - np.sin(angles.astype(np.float64)))) <= 2e-6
        assert np.max(np.abs(c - np.cos(angles.astype(np.float64)))) <= 2e-6

    def test_width_consistency_of_trig_kernels(self):
        # the whole stack relies on float32 trig being elementwise
        # deterministic regardless of array length
        rng = np.random.default_rng(8)
        x = rng.uniform(-4 * np.pi, 4 * np.pi, 64).astype(np.float32)
        full_s, full_c = sincos_lanes(x)
        for k in (1, 2, 3, 5, 7, 8, 9, 16, 33):
            s, c = sincos_lanes(np.ascontiguousarray(x[:k]))
            assert np.array_equal(s, full_s[:k])
            assert np.array_equal(c, full_c[:k])


class TestAsConfig:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            as_config([0.0, np.inf])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            as_config([])
