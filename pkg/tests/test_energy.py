import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from energyscreen import _backend
from energyscreen.data import TwoClassSample
from energyscreen.energy import (marginal_energy, marginal_energy_profile, pair_energy,
                                 pair_energy_matrix, population_energy_discrete)
from energyscreen.exceptions import ConfigurationError, DataError, PreconditionError
from energyscreen.kernels import GAMMA1, GAMMA2, GAMMA3, custom_kernel, gamma_eval, get_kernel

KERNELS = ("g1", "g2", "g3")


def brute_energy(x, y, kernel, plugin=False):
    """Direct double loop over the estimator's three terms."""
    g = get_kernel(kernel)
    n1, n2 = len(x), len(y)
    cross = sum(g(np.array([(a - b) ** 2]))[0] for a in x for b in y)
    w1 = sum(g(np.array([(x[i] - x[j]) ** 2]))[0] for i in range(n1) for j in range(n1) if i != j)
    w2 = sum(g(np.array([(y[i] - y[j]) ** 2]))[0] for i in range(n2) for j in range(n2) if i != j)
    d1 = n1 * n1 if plugin else n1 * (n1 - 1)
    d2 = n2 * n2 if plugin else n2 * (n2 - 1)
    return 2 * cross / (n1 * n2) - w1 / d1 - w2 / d2


class TestGamma:
    def test_values(self):
        assert gamma_eval(GAMMA1, 0.0) == 0.0
        assert gamma_eval(GAMMA2, math.e - 1) == pytest.approx(1.0, abs=1e-15)
        assert gamma_eval(GAMMA3, 4.0) == 2.0

    @pytest.mark.parametrize("k", KERNELS)
    def test_zero_and_negative(self, k):
        assert gamma_eval(k, 0.0) == 0.0
        with pytest.raises(PreconditionError):
            gamma_eval(k, -1e-9)
        with pytest.raises(PreconditionError):
            gamma_eval(k, float("nan"))

    @pytest.mark.parametrize("k", KERNELS)
    def test_monotone_and_finite(self, k):
        t = np.concatenate([[0.0], np.logspace(-12, 300, 400)])
        v = get_kernel(k)(t)
        assert np.all(np.isfinite(v))
        assert np.all(np.diff(v) >= 0)

    def test_lookup(self):
        assert get_kernel("G2") is GAMMA2
        assert get_kernel(3) is GAMMA3
        with pytest.raises(ConfigurationError):
            get_kernel("g4")

    def test_custom_must_vanish_at_zero(self):
        with pytest.raises(ConfigurationError):
            custom_kernel(lambda t: t + 1.0)
        k = custom_kernel(lambda t: t / (1.0 + t), name="frac")
        assert gamma_eval(k, 1.0) == 0.5


class TestMarginalEnergy:
    def test_examples(self, backend):
        assert marginal_energy([0, 0], [0, 0], "g1") == 0.0
        assert marginal_energy([0, 2], [1, 3], "g3") == pytest.approx(-1.0, abs=1e-14)
        assert marginal_energy([0, 1], [0, 1], "g2") == pytest.approx(-math.log(2), abs=1e-14)

    def test_too_small(self):
        with pytest.raises(PreconditionError):
            marginal_energy([1.0], [0.0, 1.0], "g1")
        with pytest.raises(ConfigurationError):
            marginal_energy([0, 1], [0, 1], "g1", statistic="biased")

    @pytest.mark.parametrize("k", KERNELS)
    @pytest.mark.parametrize("plugin", [False, True])
    def test_matches_double_loop(self, backend, rng, k, plugin):
        x = rng.standard_normal(7)
        y = rng.standard_normal(5) + 0.5
        stat = "plugin" if plugin else "unbiased"
        assert marginal_energy(x, y, k, stat) == pytest.approx(brute_energy(x, y, k, plugin),
                                                              rel=1e-12, abs=1e-14)

    def test_plugin_nonnegative(self, rng):
        for _ in range(50):
            x, y = rng.standard_normal(6), rng.standard_normal(9)
            for k in KERNELS:
                assert marginal_energy(x, y, k, "plugin") >= -1e-14

    def test_role_symmetry_and_permutation(self, backend, rng):
        x, y = rng.standard_normal(30), rng.standard_normal(25) * 2
        for k in KERNELS:
            e = marginal_energy(x, y, k)
            assert marginal_energy(y, x, k) == e
            assert marginal_energy(rng.permutation(x), rng.permutation(y), k) == pytest.approx(
                e, rel=1e-12, abs=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=12),
           st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=12),
           st.sampled_from(KERNELS))
    def test_symmetry_property(self, x, y, k):
        a = marginal_energy(x, y, k)
        assert math.isfinite(a)
        assert a == marginal_energy(y, x, k)

    def test_population_oracle_values(self):
        # X uniform on {0,1}, Y uniform on {0,2}; gamma3 reduces to |u - v|
        e = population_energy_discrete([0, 1], [.5, .5], [0, 2], [.5, .5], "g3")
        assert e == pytest.approx(2 * 1.0 - 0.5 - 1.0)

    def test_null_mean_zero(self):
        rng = np.random.default_rng(7)
        reps, n = 10_000, 10
        x = rng.standard_normal((reps, n))
        y = rng.standard_normal((reps, n))
        vals = marginal_energy_profile(TwoClassSample(x.T, y.T), "g2").energies
        assert abs(vals.mean()) < 4 * vals.std(ddof=1) / math.sqrt(reps)

    def test_positive_for_shift(self):
        rng = np.random.default_rng(8)
        reps, n = 200, 200
        x = rng.standard_normal((reps, n))
        y = rng.standard_normal((reps, n)) + 2.0
        vals = marginal_energy_profile(TwoClassSample(x.T, y.T), "g1").energies
        assert vals.mean() > 5 * vals.std(ddof=1) / math.sqrt(reps)


class TestPairEnergy:
    def test_examples(self, backend):
        const = np.ones((3, 2))
        assert pair_energy(const, const, "g1") == 0.0
        r = -1 / math.sqrt(2)
        assert pair_energy([[0, 0], [2, 0]], [[1, 0], [3, 0]], "g3") == pytest.approx(r, abs=1e-14)
        assert pair_energy([[0, 0], [0, 2]], [[0, 1], [0, 3]], "g3") == pytest.approx(r, abs=1e-14)

    def test_shape_checks(self):
        with pytest.raises(PreconditionError):
            pair_energy(np.zeros((3, 3)), np.zeros((3, 3)), "g1")

    @pytest.mark.parametrize("k", KERNELS)
    def test_matches_double_loop(self, backend, rng, k):
        x, y = rng.standard_normal((6, 2)), rng.standard_normal((8, 2))
        g = get_kernel(k)

        def h(a, b):
            return g(np.array([0.5 * ((a - b) ** 2).sum()]))[0]

        cross = sum(h(a, b) for a in x for b in y)
        w1 = sum(h(x[i], x[j]) for i in range(6) for j in range(6) if i != j)
        w2 = sum(h(y[i], y[j]) for i in range(8) for j in range(8) if i != j)
        want = 2 * cross / 48 - w1 / 30 - w2 / 56
        assert pair_energy(x, y, k) == pytest.approx(want, rel=1e-12)


class TestProfiles:
    def test_single_column(self, backend):
        s = TwoClassSample([[0.0], [2.0]], [[1.0], [3.0]])
        assert marginal_energy_profile(s, "g3").energies == pytest.approx([-1.0])

    def test_duplicate_column(self, backend, rng):
        x, y = rng.standard_normal((10, 1)), rng.standard_normal((12, 1))
        s = TwoClassSample(np.hstack([x, x]), np.hstack([y, y]))
        e = marginal_energy_profile(s, "g1").energies
        assert e[0] == e[1]

    def test_profile_matches_scalar(self, backend, rng):
        s = TwoClassSample(rng.standard_normal((9, 5)), rng.standard_normal((11, 5)))
        for stat in ("unbiased", "plugin"):
            e = marginal_energy_profile(s, "g2", stat).energies
            for k in range(5):
                assert e[k] == pytest.approx(
                    marginal_energy(s.class1[:, k], s.class2[:, k], "g2", stat), rel=1e-12)

    def test_pair_matrix(self, backend, rng):
        s = TwoClassSample(rng.standard_normal((9, 6)), rng.standard_normal((7, 6)))
        m = pair_energy_matrix(s, "g1").values
        off = ~np.eye(6, dtype=bool)
        assert np.array_equal(m[off], m.T[off])
        assert m[1, 2] == pytest.approx(pair_energy(s.class1[:, [1, 2]], s.class2[:, [1, 2]], "g1"),
                                        rel=1e-12)
        const = TwoClassSample(np.zeros((3, 2)), np.zeros((3, 2)))
        assert pair_energy_matrix(const, "g2").values[0, 1] == 0.0
        with pytest.raises(PreconditionError):
            pair_energy_matrix(TwoClassSample(np.zeros((3, 1)), np.zeros((3, 1))), "g1")

    def test_custom_kernel_runs_on_numpy_path(self, rng):
        s = TwoClassSample(rng.standard_normal((9, 4)), rng.standard_normal((7, 4)))
        k = custom_kernel(lambda t: np.sqrt(t))
        assert marginal_energy_profile(s, k).energies == pytest.approx(
            marginal_energy_profile(s, "g3").energies, rel=1e-12)


@pytest.mark.skipif(not _backend.HAVE_NUMBA, reason="numba not installed")
def test_backends_agree(rng):
    s = TwoClassSample(rng.standard_normal((40, 12)), rng.standard_normal((35, 12)) * 1.5)
    out = {}
    for name in ("numba", "numpy"):
        prev = _backend.set_backend(name)
        try:
            out[name] = [(marginal_energy_profile(s, k, st).energies,
                          pair_energy_matrix(s, k, st).values)
                         for k in KERNELS for st in ("unbiased", "plugin")]
        finally:
            _backend.set_backend(prev)
    for (a1, b1), (a2, b2) in zip(out["numba"], out["numpy"]):
        np.testing.assert_allclose(a1, a2, rtol=1e-11, atol=1e-14)
        np.testing.assert_allclose(b1, b2, rtol=1e-11, atol=1e-14, equal_nan=True)


def test_sample_validation():
    with pytest.raises(PreconditionError):
        TwoClassSample(np.zeros((1, 2)), np.zeros((3, 2)))
    with pytest.raises(PreconditionError):
        TwoClassSample(np.zeros((3, 2)), np.zeros((3, 3)))
    with pytest.raises(DataError):
        TwoClassSample(np.array([[np.nan, 0], [0, 0]]), np.zeros((3, 2)))
