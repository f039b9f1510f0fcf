"""Mixed screening (MixS): decide what each screened pair really carries.

A pair picked by PairS may hold one marginal signal and a noise feature, two
marginal signals, or a genuinely joint (paired) signal. Four resampling tests
on the statistics ``E_i``, ``E_j``, ``E_i + E_j`` and ``E_ij`` are compared,
and the smallest p-value names the verdict.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import _backend
from . import _energy_kernels as _k
from ._parallel import parallel_map
from .data import TwoClassSample
from .exceptions import ConfigurationError, PreconditionError
from .kernels import get_kernel
from .matching import DEFAULT_EXACT_MAX_DIM
from .pairs import pad_odd_dimension, pairs_screen, seed_sequence
from .screening import ScreenConfig, ScreenedSet

DEFAULT_RESAMPLES = 200
MIN_RESAMPLES = 20
SCHEMES = ("permutation", "bootstrap")


class Verdict(enum.Enum):
    MARGINAL_FIRST = "MarginalFirst"
    MARGINAL_SECOND = "MarginalSecond"
    BOTH_MARGINAL = "BothMarginal"
    PAIRED = "Paired"


_ORDER = (Verdict.MARGINAL_FIRST, Verdict.MARGINAL_SECOND, Verdict.BOTH_MARGINAL,
          Verdict.PAIRED)


@dataclass(frozen=True)
class PairVerdict:
    pair: tuple
    pvalues: tuple
    verdict: Verdict

    def retained(self):
        """``(singletons, pair or None)`` kept under this verdict."""
        i, j = self.pair
        if self.verdict is Verdict.MARGINAL_FIRST:
            return (i,), None
        if self.verdict is Verdict.MARGINAL_SECOND:
            return (j,), None
        if self.verdict is Verdict.BOTH_MARGINAL:
            return (i, j), None
        return (), (i, j)


def _split_counts(rng, n1, n2, reps, scheme):
    """Group-membership counts; row 0 is the observed split."""
    n = n1 + n2
    c1 = np.zeros((reps + 1, n))
    c2 = np.zeros((reps + 1, n))
    c1[0, :n1] = 1.0
    c2[0, n1:] = 1.0
    for r in range(1, reps + 1):
        if scheme == "permutation":
            perm = rng.permutation(n)
            c1[r, perm[:n1]] = 1.0
            c2[r, perm[n1:]] = 1.0
        else:
            draw = rng.integers(0, n, size=n)
            c1[r] = np.bincount(draw[:n1], minlength=n)
            c2[r] = np.bincount(draw[n1:], minlength=n)
    return c1, c2


def split_statistics(zi, zj, c1, c2, n1, n2, kernel, statistic="unbiased"):
    """Energies of feature i, feature j and the pair for every split.

    Returns an ``(R, 3)`` array. All rows, including the observed split,
    go through the same arithmetic so that ties compare exactly.
    """
    kernel = get_kernel(kernel)
    zi = np.ascontiguousarray(zi, dtype=np.float64)
    zj = np.ascontiguousarray(zj, dtype=np.float64)
    if _backend.use_numba() and kernel.is_builtin:
        sums = _k.resample_sums_numba(zi, zj, c1, c2, kernel.code)
    else:
        sums = _k.resample_sums_numpy(zi, zj, c1, c2, kernel)
    cn, w1n, w2n = _k._norms.py_func(n1, n2, statistic == "plugin")
    return cn * sums[:, :, 0] - w1n * sums[:, :, 1] - w2n * sums[:, :, 2]


def _check_resamples(m):
    if int(m) != m or m < MIN_RESAMPLES:
        raise ConfigurationError(f"resample count must be an integer >= {MIN_RESAMPLES}, got {m!r}")
    return int(m)


def _check_scheme(scheme):
    if scheme not in SCHEMES:
        raise ConfigurationError(f"resampling scheme must be one of {SCHEMES}, got {scheme!r}")
    return scheme


def resample_pvalues(sample: TwoClassSample, pair, kernel, M=DEFAULT_RESAMPLES, seed=None,
                     scheme="permutation", statistic="unbiased"):
    """Resampling p-values ``(p1, p2, p3, p4)`` for one feature pair.

    The statistics are ``E_i``, ``E_j``, ``E_i + E_j`` and ``E_ij``. Null
    replicates re-split the pooled rows into groups of the original sizes,
    either by permutation (default) or by drawing with replacement. Each
    p-value is ``(1 + #{replicate >= observed}) / (M + 1)``, and one split
    serves all four statistics. The random stream is derived from
    ``(seed, i, j)``, so a pair's result does not depend on which other pairs
    are tested.
    """
    M = _check_resamples(M)
    _check_scheme(scheme)
    i, j = (int(k) for k in pair)
    if i == j or not (0 <= i < sample.d and 0 <= j < sample.d):
        raise PreconditionError(f"invalid pair {pair!r} for d={sample.d}")
    z, _ = sample.pooled()
    rng = np.random.default_rng(seed_sequence(seed, i, j))
    c1, c2 = _split_counts(rng, sample.n1, sample.n2, M, scheme)
    e = split_statistics(z[:, i], z[:, j], c1, c2, sample.n1, sample.n2, kernel, statistic)
    stats = np.column_stack([e[:, 0], e[:, 1], e[:, 0] + e[:, 1], e[:, 2]])
    counts = (stats[1:] >= stats[0]).sum(axis=0)
    return tuple(float((1 + c) / (M + 1)) for c in counts)


def classify_pair(pvalues) -> Verdict:
    """Verdict of the smallest p-value; ties resolve in the order p1, p2, p3, p4."""
    p = [float(v) for v in pvalues]
    if len(p) != 4:
        raise PreconditionError("expected four p-values")
    if any(not (0.0 < v <= 1.0) for v in p):
        raise PreconditionError(f"p-values must lie in (0, 1], got {p}")
    best = 0
    for k in range(1, 4):
        if p[k] < p[best]:
            best = k
    return _ORDER[best]


def _pair_task(args):
    sample, pair, kernel, M, seed, scheme, statistic = args
    pv = resample_pvalues(sample, pair, kernel, M, seed, scheme, statistic)
    return PairVerdict(tuple(pair), pv, classify_pair(pv))


def mixs_screen(sample: TwoClassSample, kernel, config=None, M=DEFAULT_RESAMPLES, seed=None,
                scheme="permutation", workers=1, method="auto",
                exact_max_dim=DEFAULT_EXACT_MAX_DIM) -> ScreenedSet:
    """PairS followed by a verdict for every screened pair.

    Retained singletons go to ``marginal`` and paired signals to ``pairs``;
    the rest are dropped as noise. ``t_hat`` and ``s_hat`` are those of the
    underlying pair cut. When the padding column of an odd-dimensional input
    would be retained, it is dropped, and a paired verdict involving it keeps
    only the real feature.
    """
    M = _check_resamples(M)
    _check_scheme(scheme)
    kernel = get_kernel(kernel)
    config = config or ScreenConfig()
    if seed is None:
        seed = int(np.random.SeedSequence().entropy)
    base = pairs_screen(sample, kernel, config, seed, method, exact_max_dim)
    pad = base.padded_index
    work = sample
    if pad is not None:
        work, _ = pad_odd_dimension(sample, seed)
    # PairS may have folded a padded pair into a singleton; test the full pair
    screened = list(base.pairs)
    for k in base.marginal:
        screened.append((k, pad))
    screened.sort()
    tasks = [(work, p, kernel, M, seed, scheme, "unbiased") for p in screened]
    verdicts = parallel_map(_pair_task, tasks, workers)
    marginal, pairs = [], []
    for v in verdicts:
        singles, paired = v.retained()
        if paired is not None:
            if pad in paired:
                marginal.extend(k for k in paired if k != pad)
            else:
                pairs.append(paired)
        marginal.extend(k for k in singles if k != pad)
    return ScreenedSet(tuple(marginal), tuple(pairs), base.t_hat, base.s_hat, sample.d,
                       profile=base.profile, method="mixs", null_warning=base.null_warning,
                       padded_index=pad, matching=base.matching, verdicts=tuple(verdicts))


__all__ = [
    "Verdict", "PairVerdict", "resample_pvalues", "classify_pair", "mixs_screen",
    "split_statistics", "DEFAULT_RESAMPLES", "MIN_RESAMPLES", "SCHEMES",
]
