import math

import numpy as np
import pytest

from energyscreen.data import TwoClassSample
from energyscreen.energy import marginal_energy_profile
from energyscreen.exceptions import ConfigurationError
from energyscreen.simulate import (ExampleSpec, cauchy, generate, min_dimension,
                                   register_sampler, signal_indices, true_signals,
                                   unregister_sampler)


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        ExampleSpec(9)
    with pytest.raises(ConfigurationError):
        ExampleSpec(1, d=3)
    ExampleSpec(3, d=3)
    with pytest.raises(ConfigurationError):
        ExampleSpec(1, n1=1)
    with pytest.raises(ConfigurationError):
        ExampleSpec(1, seed=-1)
    assert min_dimension(3) == 3 and min_dimension(5) == 4


@pytest.mark.parametrize("ex", [1, 2, 3, 4, 5, 6, 7])
def test_shapes_and_determinism(ex):
    a = generate(ExampleSpec(ex, 7, 9, 12, 3))
    b = generate(ExampleSpec(ex, 7, 9, 12, 3))
    c = generate(ExampleSpec(ex, 7, 9, 12, 4))
    assert a.class1.shape == (7, 12) and a.class2.shape == (9, 12)
    assert np.array_equal(a.class1, b.class1) and np.array_equal(a.class2, b.class2)
    assert not np.array_equal(a.class1, c.class1)


def test_truth_tables():
    assert true_signals(1) == ((0, 1, 2, 3), ())
    assert true_signals(2) == ((), ((0, 1), (2, 3)))
    assert true_signals(3) == ((2,), ((0, 1),))
    assert signal_indices(8) == (0, 1, 2, 3)


def test_example1_means():
    s = generate(ExampleSpec(1, 10_000, 10_000, 10, 1))
    diff = s.class2.mean(axis=0) - s.class1.mean(axis=0)
    assert np.all(np.abs(diff[:4] - 1) < 0.05)
    assert np.all(np.abs(diff[4:]) < 0.05)


def test_example2_correlations():
    s = generate(ExampleSpec(2, 10_000, 10_000, 6, 2))
    for a, b in ((0, 1), (2, 3)):
        assert np.corrcoef(s.class1[:, a], s.class1[:, b])[0, 1] == pytest.approx(0.9, abs=0.03)
        assert np.corrcoef(s.class2[:, a], s.class2[:, b])[0, 1] == pytest.approx(-0.9, abs=0.03)


def test_example3_layout():
    s = generate(ExampleSpec(3, 10_000, 10_000, 5, 3))
    assert s.class1[:, 2].mean() - s.class2[:, 2].mean() == pytest.approx(1.0, abs=0.05)
    assert np.corrcoef(s.class2[:, 0], s.class2[:, 1])[0, 1] == pytest.approx(-0.9, abs=0.03)


def test_example4_scale():
    s = generate(ExampleSpec(4, 10_000, 10_000, 6, 4))
    assert np.all(np.abs(s.class1[:, :4].std(axis=0) - 1.0) < 0.05)
    assert np.all(np.abs(s.class2[:, :4].std(axis=0) - 1 / 3) < 0.02)
    assert np.all(np.abs(s.class2[:, 4:].std(axis=0) - 1.0) < 0.05)


def test_example5_6_cauchy():
    s5 = generate(ExampleSpec(5, 10_000, 10_000, 6, 5))
    assert np.all(np.abs(np.median(s5.class2[:, :4], axis=0) - 2.0) < 0.1)
    q = lambda v: np.subtract(*np.percentile(v, [75, 25], axis=0)) / 2  # noqa: E731
    assert np.all(np.abs(q(s5.class1) - 1.0) < 0.1)
    s6 = generate(ExampleSpec(6, 10_000, 10_000, 6, 6))
    assert np.all(np.abs(q(s6.class2[:, :4]) - 5.0) < 0.5)
    assert np.all(np.abs(q(s6.class2[:, 4:]) - 1.0) < 0.1)


def test_example7_variance():
    s = generate(ExampleSpec(7, 10_000, 10_000, 5, 7))
    assert np.all(np.abs(s.class2[:, :4].var(axis=0) - 4) < 0.15)
    assert np.all(np.abs(s.class1[:, :4].var(axis=0) - 4) < 0.15)


def test_cauchy_inverse_cdf():
    u = cauchy(np.random.default_rng(0), 0.0, 1.0, 100_000)
    assert np.mean(np.abs(u) < 1) == pytest.approx(0.5, abs=0.01)


def test_example2_marginals_match():
    reps = 400
    vals = np.empty((reps, 4))
    for r in range(reps):
        s = generate(ExampleSpec(2, 20, 20, 4, 1000 + r))
        vals[r] = marginal_energy_profile(s, "g1").energies
    se = vals.std(axis=0, ddof=1) / math.sqrt(reps)
    assert np.all(np.abs(vals.mean(axis=0)) < 4 * se)


def test_example8_requires_sampler():
    with pytest.raises(ConfigurationError):
        generate(ExampleSpec(8, 5, 5, 6, 0))

    def sampler(rng, n):
        z = rng.standard_normal((n, 2))
        return np.abs(z) * np.sign(z[:, :1])

    register_sampler(sampler)
    try:
        s = generate(ExampleSpec(8, 50, 60, 7, 0))
        assert s.class2.shape == (60, 7)
        assert np.array_equal(s.class2[:, :2], np.abs(s.class2[:, :2]) * np.sign(s.class2[:, :1]))
    finally:
        unregister_sampler()
    with pytest.raises(ConfigurationError):
        generate(ExampleSpec(8, 5, 5, 6, 0))


def test_heavy_tails_accepted():
    s = generate(ExampleSpec(6, 500, 500, 8, 1))
    assert isinstance(s, TwoClassSample) and np.isfinite(s.class2).all()
