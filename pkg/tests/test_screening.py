import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from energyscreen.data import TwoClassSample
from energyscreen.exceptions import ConfigurationError, PreconditionError
from energyscreen.screening import (ScreenConfig, ScreenedSet, estimate_signal_count,
                                    mars_screen, max_consecutive_noise_ratio, noise_dimension,
                                    noise_ratio_samples, ratio_cut, top_indices)

E4 = [0.001, 0.002, 0.5, 0.6]


class TestSignalCount:
    def test_full_range(self):
        cut = ratio_cut(E4, ScreenConfig.full_range())
        np.testing.assert_allclose(cut.ratios, [2.0, 250.0, 1.2])
        assert (cut.t_hat, cut.s_hat) == (2, 2)

    def test_default_range(self):
        cut = ratio_cut(E4)
        assert (cut.lo, cut.hi) == (2, 3)
        assert estimate_signal_count(E4) == (2, 2)

    def test_all_equal_ties_to_lowest(self):
        assert estimate_signal_count([0.3] * 6) == (3, 3)
        assert estimate_signal_count([0.3] * 6, ScreenConfig.full_range()) == (1, 5)

    def test_clamps_non_positive(self):
        cut = ratio_cut([-0.2, 0.0, 1e-3, 0.4], ScreenConfig.full_range())
        assert cut.sorted_values[0] == cut.sorted_values[1] == 1e-300
        assert np.all(np.isfinite(cut.ratios))

    def test_errors(self):
        with pytest.raises(PreconditionError):
            estimate_signal_count([1.0])
        with pytest.raises(PreconditionError):
            estimate_signal_count([1.0, float("nan")])
        with pytest.raises(ConfigurationError):
            estimate_signal_count(E4, ScreenConfig(search_lo=2, search_hi=4))
        with pytest.raises(ConfigurationError):
            ScreenConfig(search_lo=3, search_hi=2)
        with pytest.raises(ConfigurationError):
            ScreenConfig(energy_floor=0.0)
        with pytest.raises(ConfigurationError):
            ScreenConfig(statistic="other")

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(1e-6, 1e6), min_size=2, max_size=40),
           st.floats(1e-3, 1e3))
    def test_scale_invariance(self, values, c):
        # power-of-two scaling is exact, so ratios are unchanged bit for bit
        scale = 2.0 ** round(math.log2(c))
        a = np.array(values)
        base = estimate_signal_count(a)
        assert estimate_signal_count(a * scale) == base
        n = base[1]
        assert np.array_equal(top_indices(a, n), top_indices(a * scale, n))

    def test_top_indices_ties(self):
        assert top_indices([1.0, 3.0, 3.0, 3.0], 2).tolist() == [1, 2]


class TestMarS:
    def test_wide_separation(self, backend):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((50, 4))
        y = rng.standard_normal((50, 4))
        y[:, :2] += 5.0
        s = mars_screen(TwoClassSample(x, y), "g2")
        assert s.marginal == (0, 1)
        assert s.pairs == ()
        assert s.s_hat == len(s.marginal)
        assert not s.null_warning

    def test_identical_classes_well_defined(self):
        x = np.random.default_rng(2).standard_normal((10, 6))
        s = mars_screen(TwoClassSample(x, x), "g1")
        assert len(s.marginal) == s.s_hat == 6 - s.t_hat
        assert s.null_warning

    def test_null_flag_on_noise_with_unbiased_statistic(self):
        rng = np.random.default_rng(12)
        noise = TwoClassSample(rng.standard_normal((30, 200)), rng.standard_normal((30, 200)))
        assert mars_screen(noise, "g1", ScreenConfig(statistic="unbiased")).null_warning

    def test_unbiased_statistic_available(self):
        rng = np.random.default_rng(3)
        x, y = rng.standard_normal((40, 20)), rng.standard_normal((40, 20))
        y[:, 0] += 4
        s = mars_screen(TwoClassSample(x, y), "g1", ScreenConfig(statistic="unbiased"))
        assert s.profile.statistic == "unbiased"
        assert 0 in s.marginal

    def test_needs_two_columns(self):
        with pytest.raises(PreconditionError):
            mars_screen(TwoClassSample(np.zeros((3, 1)), np.ones((3, 1))), "g1")


class TestScreenedSet:
    def test_invariants(self):
        with pytest.raises(PreconditionError):
            ScreenedSet((1,), ((1, 2),), 0, 2, 4)
        with pytest.raises(PreconditionError):
            ScreenedSet((4,), (), 0, 1, 4)
        s = ScreenedSet((3, 0), ((5, 2),), 0, 3, 6)
        assert s.marginal == (0, 3) and s.pairs == ((2, 5),)
        assert s.retained() == (0, 2, 3, 5)
        assert s.count_retained({0, 1, 2, 3}) == (3, 1)

    def test_all_singletons(self):
        s = ScreenedSet.all_singletons(5)
        assert s.marginal == tuple(range(5)) and s.method == "wos"


class TestNoiseRatio:
    def test_finite_positive(self):
        mean, se = max_consecutive_noise_ratio(100, 20, 100, "gaussian", seed=1)
        assert math.isfinite(mean) and mean > 1.0 and se > 0

    def test_deterministic_and_worker_invariant(self):
        a = noise_ratio_samples(30, 6, 8, "cauchy", seed=4, workers=1)
        b = noise_ratio_samples(30, 6, 8, "cauchy", seed=4, workers=2)
        assert np.array_equal(a, b)

    def test_errors(self):
        with pytest.raises(PreconditionError):
            noise_ratio_samples(1, 5, 3)
        with pytest.raises(PreconditionError):
            noise_ratio_samples(5, 5, 1)
        with pytest.raises(ConfigurationError):
            noise_ratio_samples(5, 5, 3, "uniform")

    def test_noise_dimension_cap(self):
        assert noise_dimension(20, 500) == 500
        assert noise_dimension(1, 10 ** 12) == math.floor(math.exp(25.0))
