"""Marginal screening (MarS) by the largest ratio of consecutive energies.

Sorted energies of noise features cluster near zero while signal energies sit
well above them, so the biggest jump ``E_(k+1) / E_(k)`` marks the boundary.
The features above the jump form the screened set.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._parallel import parallel_map, replicate_seeds
from .data import TwoClassSample
from .energy import STATISTICS, EnergyProfile, marginal_energy_profile
from .exceptions import ConfigurationError, PreconditionError
from .kernels import get_kernel

DEFAULT_ENERGY_FLOOR = 1e-300


@dataclass(frozen=True)
class ScreenConfig:
    """Search range and clamping for the ratio estimator.

    ``search_lo`` and ``search_hi`` are 1-based order-statistic positions
    ``k`` of the ratios ``E_(k+1) / E_(k)``. Left as ``None`` they resolve to
    ``ceil(m/2)`` and ``m - 1`` for ``m`` screened quantities (features for
    MarS, matched pairs for PairS). ``statistic`` picks the energy estimator
    used for ranking; the plug-in version is non-negative.
    """

    search_lo: Optional[int] = None
    search_hi: Optional[int] = None
    energy_floor: float = DEFAULT_ENERGY_FLOOR
    statistic: str = "plugin"

    def __post_init__(self):
        if not (math.isfinite(self.energy_floor) and self.energy_floor > 0):
            raise ConfigurationError("energy_floor must be a positive finite number")
        for name in ("search_lo", "search_hi"):
            value = getattr(self, name)
            if value is not None and (int(value) != value or value < 1):
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
        if (self.search_lo is not None and self.search_hi is not None
                and self.search_lo > self.search_hi):
            raise ConfigurationError("search_lo must not exceed search_hi")
        if self.statistic not in STATISTICS:
            raise ConfigurationError(f"statistic must be one of {STATISTICS}")

    @classmethod
    def full_range(cls, **kwargs):
        """Search every ratio ``1 <= k <= m - 1``."""
        return cls(search_lo=1, **kwargs)

    def resolve(self, m):
        """Concrete ``(lo, hi)`` for ``m`` sorted values."""
        if m < 2:
            raise PreconditionError(f"ratio screening needs at least 2 values, got {m}")
        lo = self.search_lo if self.search_lo is not None else -(-m // 2)
        hi = self.search_hi if self.search_hi is not None else m - 1
        if not 1 <= lo <= hi <= m - 1:
            raise ConfigurationError(
                f"search range [{lo}, {hi}] is invalid for {m} values; need 1 <= lo <= hi <= {m - 1}")
        return int(lo), int(hi)


@dataclass(frozen=True)
class RatioCut:
    """Everything the ratio estimator derived from one energy vector.

    ``null_warning`` is set when the winning ratio's denominator sits at the
    energy floor. The jump then comes from clamping non-positive energies
    rather than from a gap between noise and signal, which is what pure-noise
    input (or the unbiased statistic on noise) produces.
    """

    t_hat: int
    s_hat: int
    lo: int
    hi: int
    ratios: np.ndarray
    sorted_values: np.ndarray
    cut_value: float
    null_warning: bool


@dataclass(frozen=True)
class ScreenedSet:
    """Screened marginal features and feature pairs (0-based indices).

    ``marginal`` is a sorted tuple of column indices, ``pairs`` a sorted tuple
    of ``(i, j)`` with ``i < j``. ``d`` is the column count of the input
    before any padding; ``padded_index`` records the padding column when one
    was added (it never appears in ``marginal`` or ``pairs``).
    """

    marginal: tuple
    pairs: tuple
    t_hat: int
    s_hat: int
    d: int
    profile: object = field(default=None, compare=False, repr=False)
    method: str = "mars"
    null_warning: bool = False
    padded_index: Optional[int] = None
    matching: object = field(default=None, compare=False, repr=False)
    verdicts: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        marginal = tuple(sorted(int(k) for k in self.marginal))
        pairs = tuple(sorted((min(int(i), int(j)), max(int(i), int(j))) for i, j in self.pairs))
        object.__setattr__(self, "marginal", marginal)
        object.__setattr__(self, "pairs", pairs)
        seen = list(marginal) + [k for p in pairs for k in p]
        if len(seen) != len(set(seen)):
            raise PreconditionError("an index appears more than once in the screened set")
        if any(k < 0 or k >= self.d for k in seen):
            raise PreconditionError(f"screened indices must lie in [0, {self.d})")

    @classmethod
    def all_singletons(cls, d):
        """Every feature as a singleton: the no-screening baseline."""
        return cls(tuple(range(d)), (), 0, d, d, method="wos")

    @property
    def s1(self):
        return len(self.marginal)

    @property
    def s2(self):
        return len(self.pairs)

    def is_empty(self):
        return not self.marginal and not self.pairs

    def retained(self):
        """All retained column indices, sorted."""
        return tuple(sorted(set(self.marginal).union(k for p in self.pairs for k in p)))

    def count_retained(self, truth):
        """``(signals kept, noise kept)`` relative to a set of true indices."""
        kept = set(self.retained())
        truth = set(truth)
        return len(kept & truth), len(kept - truth)


def ratio_cut(energies, config=None):
    """Apply the maximum-ratio rule to a vector of energies.

    Values at or below ``config.energy_floor`` are raised to the floor first,
    so every ratio is finite and positive.
    """
    config = config or ScreenConfig()
    e = np.asarray(energies, dtype=np.float64)
    if e.ndim != 1:
        raise PreconditionError("energies must be a vector")
    m = e.shape[0]
    if m < 2:
        raise PreconditionError(f"need at least 2 energies, got {m}")
    if np.isnan(e).any():
        raise PreconditionError("energies contain NaN")
    lo, hi = config.resolve(m)
    s = np.maximum(np.sort(e), config.energy_floor)
    with np.errstate(over="ignore"):
        ratios = s[lo:hi + 1] / s[lo - 1:hi]
    t_hat = lo + int(np.argmax(ratios))
    cut = float(s[t_hat])
    return RatioCut(t_hat, m - t_hat, lo, hi, ratios, s, cut,
                    bool(s[t_hat - 1] < 10.0 * config.energy_floor))


def estimate_signal_count(energies, config=None):
    """Return ``(t_hat, s_hat)``: estimated noise and signal counts.

    Examples
    --------
    >>> estimate_signal_count([0.001, 0.002, 0.5, 0.6], ScreenConfig.full_range())
    (2, 2)
    """
    cut = ratio_cut(energies, config)
    return cut.t_hat, cut.s_hat


def top_indices(values, count, floor=0.0):
    """Indices of the ``count`` largest values; ties go to lower indices."""
    v = np.maximum(np.asarray(values, dtype=np.float64), floor)
    order = np.argsort(-v, kind="stable")
    return np.sort(order[:count])


def mars_screen(sample: TwoClassSample, kernel, config=None) -> ScreenedSet:
    """Marginal screening of every feature of ``sample``."""
    config = config or ScreenConfig()
    kernel = get_kernel(kernel)
    if sample.d < 2:
        raise PreconditionError(f"screening needs d >= 2, got d={sample.d}")
    profile = marginal_energy_profile(sample, kernel, config.statistic)
    cut = ratio_cut(profile.energies, config)
    keep = top_indices(profile.energies, cut.s_hat, config.energy_floor)
    return ScreenedSet(tuple(keep.tolist()), (), cut.t_hat, cut.s_hat, sample.d,
                       profile=profile, method="mars", null_warning=cut.null_warning)


# ------------------------------------------------------------ noise ratio check

NOISE_DISTRIBUTIONS = ("gaussian", "cauchy")


def noise_dimension(n, cap):
    """``floor(exp(25 n^(1/4)))`` limited to ``cap`` (the raw value is astronomical)."""
    exponent = 25.0 * n ** 0.25
    if exponent >= math.log(cap):
        return int(cap)
    return max(2, int(math.floor(math.exp(exponent))))


def max_noise_ratio(energies, floor=DEFAULT_ENERGY_FLOOR):
    """Largest ratio of consecutive sorted energies over the full range."""
    s = np.maximum(np.sort(np.asarray(energies, dtype=np.float64)), floor)
    with np.errstate(over="ignore"):
        return float(np.max(s[1:] / s[:-1]))


def _draw_noise(rng, dist, n, d):
    if dist == "gaussian":
        return rng.standard_normal((n, d))
    return np.tan(np.pi * (rng.random((n, d)) - 0.5))


def _noise_ratio_replicate(args):
    seed_seq, d_noise, n, dist, kernel, statistic, floor = args
    rng = np.random.default_rng(seed_seq)
    x = _draw_noise(rng, dist, n, d_noise)
    y = _draw_noise(rng, dist, n, d_noise)
    profile = marginal_energy_profile(TwoClassSample(x, y), kernel, statistic)
    return max_noise_ratio(profile.energies, floor)


def noise_ratio_samples(d_noise, n, replicates, noise_dist="gaussian", seed=0,
                        kernel="g1", statistic="plugin", floor=DEFAULT_ENERGY_FLOOR,
                        workers=1):
    """Per-replicate values of the maximum consecutive ratio on pure noise."""
    if d_noise < 2:
        raise PreconditionError("d_noise must be at least 2")
    if replicates < 2:
        raise PreconditionError("replicates must be at least 2")
    if n < 2:
        raise PreconditionError("n must be at least 2")
    noise_dist = str(noise_dist).lower()
    if noise_dist not in NOISE_DISTRIBUTIONS:
        raise ConfigurationError(f"noise_dist must be one of {NOISE_DISTRIBUTIONS}")
    kernel = get_kernel(kernel)
    seeds = replicate_seeds(seed, replicates)
    tasks = [(s, int(d_noise), int(n), noise_dist, kernel, statistic, floor) for s in seeds]
    return np.array(parallel_map(_noise_ratio_replicate, tasks, workers))


def max_consecutive_noise_ratio(d_noise, n, replicates, noise_dist="gaussian", seed=0,
                                kernel="g1", statistic="plugin", workers=1):
    """Mean and standard error of the maximum consecutive noise-energy ratio.

    Each replicate draws two classes of ``n`` rows and ``d_noise`` i.i.d.
    noise columns, computes their energies and takes the largest ratio of
    consecutive order statistics.

    Returns
    -------
    (mean, stderr) : tuple of float
    """
    vals = noise_ratio_samples(d_noise, n, replicates, noise_dist, seed, kernel,
                               statistic, workers=workers)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))


__all__ = [
    "ScreenConfig", "ScreenedSet", "RatioCut", "ratio_cut", "estimate_signal_count",
    "top_indices", "mars_screen", "noise_dimension", "max_noise_ratio",
    "noise_ratio_samples", "max_consecutive_noise_ratio", "DEFAULT_ENERGY_FLOOR",
    "NOISE_DISTRIBUTIONS", "EnergyProfile",
]
