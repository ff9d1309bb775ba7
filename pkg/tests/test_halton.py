import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vecmp.halton import HaltonSampler, first_primes, halton_next, radical_inverse


class TestRadicalInverse:
    @pytest.mark.parametrize("base,index,expected", [
        (2, 1, 0.5),
        (2, 3, 0.75),
        (3, 1, 1.0 / 3.0),
        (2, 2, 0.25),
        (5, 1, 0.2),
    ])
    def test_known_values(self, base, index, expected):
        assert radical_inverse(base, index) == pytest.approx(expected, abs=1e-15)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            radical_inverse(1, 1)
        with pytest.raises(ValueError):
            radical_inverse(2, 0)

    @settings(max_examples=100, deadline=None)
    @given(st.sampled_from([2, 3, 5, 7, 11]), st.integers(1, 10_000))
    def test_always_in_open_unit_interval(self, base, index):
        v = radical_inverse(base, index)
        assert 0.0 < v < 1.0


class TestFirstPrimes:
    def test_known_prefix(self):
        assert first_primes(8) == [2, 3, 5, 7, 11, 13, 17, 19]


class TestSampler:
    def test_first_draw_unit_limits(self):
        s = HaltonSampler(limits=np.array([[0.0, 1.0], [0.0, 1.0]]))
        q = s.draw()
        assert q[0] == np.float32(0.5)
        assert q[1] == np.float32(1.0 / 3.0)

    def test_affine_scaling(self):
        s = HaltonSampler(limits=np.array([[-1.0, 1.0]]))
        assert s.draw()[0] == np.float32(0.0)  # base-2 value 0.5 maps to 0

    def test_identical_state_identical_stream(self):
        lims = np.array([[-2.0, 2.0], [-1.0, 3.0], [0.0, 0.5]])
        a, b = HaltonSampler(lims), HaltonSampler(lims)
        for _ in range(10_000):
            assert np.array_equal(a.draw(), b.draw())

    def test_samples_stay_inside_limits(self):
        lims = np.array([[-2.9, 2.9], [-1.9, 1.9], [-3.0, 3.0], [0.0, 0.1]])
        s = HaltonSampler(lims)
        draws = np.stack([s.draw() for _ in range(10_000)])
        assert np.all(draws > lims[:, 0])
        assert np.all(draws < lims[:, 1])

    def test_index_advances_per_draw(self):
        s = HaltonSampler(limits=np.array([[0.0, 1.0]]))
        assert s.index == 1
        halton_next(s)
        assert s.index == 2

    def test_kth_sample_is_pure_function_of_state(self):
        lims = np.array([[-1.0, 1.0], [0.0, 2.0]])
        fresh = HaltonSampler(lims)
        for _ in range(41):
            fresh.draw()
        jumped = HaltonSampler(lims, index=42)
        assert np.array_equal(fresh.draw(), jumped.draw())
