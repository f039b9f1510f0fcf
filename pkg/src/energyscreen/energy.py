"""Unbiased sample energy distances for single features and feature pairs.

For a feature with class samples ``x`` (size n1) and ``y`` (size n2)::

    E = 2/(n1 n2) sum_ij g(|x_i - y_j|^2)
        - 1/C(n1, 2) sum_{i<j} g(|x_i - x_j|^2)
        - 1/C(n2, 2) sum_{i<j} g(|y_i - y_j|^2)

and for a pair of features the squared difference is replaced by half the
squared Euclidean norm of the bivariate difference. The estimator is a
U-statistic, so it is unbiased and can be negative.

``statistic="plugin"`` selects the V-statistic instead: within-class sums are
divided by ``n^2`` rather than ``n(n-1)``. That is the energy distance between
the two empirical distributions, which is never negative; screening ranks
features with it because ratios of order statistics need positive values.
"""

from dataclasses import dataclass

import numpy as np

from . import _backend
from . import _energy_kernels as _k
from .data import TwoClassSample
from .exceptions import ConfigurationError, PreconditionError
from .kernels import GammaKernel, get_kernel


STATISTICS = ("unbiased", "plugin")


def _check_statistic(statistic):
    if statistic not in STATISTICS:
        raise ConfigurationError(
            f"unknown energy statistic {statistic!r}; expected one of {STATISTICS}")
    return statistic == "plugin"


@dataclass(frozen=True)
class EnergyProfile:
    """Marginal energies, one per feature column."""

    energies: np.ndarray
    gamma: GammaKernel
    statistic: str = "unbiased"

    def __len__(self):
        return self.energies.shape[0]


@dataclass(frozen=True)
class PairEnergyMatrix:
    """Symmetric matrix of pair energies; the diagonal is NaN (undefined)."""

    values: np.ndarray
    gamma: GammaKernel
    statistic: str = "unbiased"

    @property
    def d(self):
        return self.values.shape[0]

    def pair(self, i, j):
        if i == j:
            raise PreconditionError("pair energies are defined for i != j only")
        return float(self.values[i, j])


def _as_vector(v, name):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise PreconditionError(f"{name} must be one-dimensional")
    if v.shape[0] < 2:
        raise PreconditionError(f"{name} needs at least 2 observations, got {v.shape[0]}")
    if not np.isfinite(v).all():
        raise PreconditionError(f"{name} contains NaN or infinite entries")
    return v


def _as_pair_matrix(m, name):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] != 2:
        raise PreconditionError(f"{name} must have shape (n, 2)")
    if m.shape[0] < 2:
        raise PreconditionError(f"{name} needs at least 2 observations, got {m.shape[0]}")
    if not np.isfinite(m).all():
        raise PreconditionError(f"{name} contains NaN or infinite entries")
    return m


def _canonical(x, y):
    """Order the two samples so that swapping the arguments gives bit-identical sums."""
    if (x.shape[0], x.tobytes()) > (y.shape[0], y.tobytes()):
        return y, x
    return x, y


def _compiled(kernel):
    return _backend.use_numba() and kernel.is_builtin


def _marginal(xt, yt, kernel, vstat=False):
    if _compiled(kernel):
        return _k.marginal_energies_numba(xt, yt, kernel.code, vstat)
    return _k.marginal_energies_numpy(xt, yt, kernel, vstat)


def _transposed(sample):
    return (np.ascontiguousarray(sample.class1.T),
            np.ascontiguousarray(sample.class2.T))


def marginal_energy(x, y, kernel, statistic="unbiased"):
    """Sample energy distance between two univariate samples."""
    kernel = get_kernel(kernel)
    vstat = _check_statistic(statistic)
    x = _as_vector(x, "x")
    y = _as_vector(y, "y")
    x, y = _canonical(x, y)
    return float(_marginal(x[None, :], y[None, :], kernel, vstat)[0])


def pair_energy(x2, y2, kernel, statistic="unbiased"):
    """Sample energy distance between two bivariate samples (n, 2)."""
    kernel = get_kernel(kernel)
    vstat = _check_statistic(statistic)
    x2 = _as_pair_matrix(x2, "x2")
    y2 = _as_pair_matrix(y2, "y2")
    x2, y2 = _canonical(np.ascontiguousarray(x2), np.ascontiguousarray(y2))
    xt = np.ascontiguousarray(x2.T)
    yt = np.ascontiguousarray(y2.T)
    return float(pair_energies_for(xt, yt, np.array([0]), np.array([1]), kernel, vstat)[0])


def marginal_energy_profile(sample, kernel, statistic="unbiased"):
    """Energy of every feature column of ``sample``."""
    kernel = get_kernel(kernel)
    vstat = _check_statistic(statistic)
    xt, yt = _transposed(sample)
    return EnergyProfile(_marginal(xt, yt, kernel, vstat), kernel, statistic)


def pair_energy_matrix(sample, kernel, statistic="unbiased"):
    """Energies of all unordered column pairs, as a symmetric matrix."""
    kernel = get_kernel(kernel)
    vstat = _check_statistic(statistic)
    if sample.d < 2:
        raise PreconditionError(f"pair energies need d >= 2, got d={sample.d}")
    xt, yt = _transposed(sample)
    if kernel.code == 1:
        values = _k.pair_energy_matrix_gauss(xt, yt, vstat)
    elif _compiled(kernel):
        values = _k.pair_energy_matrix_numba(xt, yt, kernel.code, vstat)
    else:
        values = _k.pair_energy_matrix_numpy(xt, yt, kernel, vstat)
    return PairEnergyMatrix(values, kernel, statistic)


def pair_energies_for(xt, yt, left, right, kernel, vstat=False):
    """Pair energies for explicit column pairs of column-major data."""
    left = np.ascontiguousarray(left, dtype=np.int64)
    right = np.ascontiguousarray(right, dtype=np.int64)
    if _compiled(kernel):
        return _k.pair_energies_for_numba(xt, yt, left, right, kernel.code, vstat)
    return _k.pair_energies_for_numpy(xt, yt, left, right, kernel, vstat)


def population_energy_discrete(support_x, probs_x, support_y, probs_y, kernel):
    """Exact energy distance between two finite discrete distributions.

    Enumerates the joint probability tables of independent draws; used as the
    oracle for the unbiasedness checks.
    """
    kernel = get_kernel(kernel)
    sx = np.asarray(support_x, dtype=np.float64)
    sy = np.asarray(support_y, dtype=np.float64)
    px = np.asarray(probs_x, dtype=np.float64)
    py = np.asarray(probs_y, dtype=np.float64)

    def expect(a, pa, b, pb):
        table = np.outer(pa, pb)
        return float((table * kernel((a[:, None] - b[None, :]) ** 2)).sum())

    return 2 * expect(sx, px, sy, py) - expect(sx, px, sx, px) - expect(sy, py, sy, py)
