"""Paired screening (PairS): match features into pairs, then cut by pair energy."""

import numpy as np

from .data import TwoClassSample
from .energy import pair_energy_matrix
from .kernels import get_kernel
from .matching import DEFAULT_EXACT_MAX_DIM, build_weight_matrix, min_weight_perfect_matching
from .screening import ScreenConfig, ScreenedSet, ratio_cut, top_indices

# spawn key reserved for the padding column's random stream
_PAD_KEY = (0,)


def seed_sequence(seed, *keys):
    """Child stream of ``seed`` addressed by integer ``keys``.

    ``seed=None`` draws fresh OS entropy.
    """
    if seed is None:
        seed = np.random.SeedSequence().entropy
    return np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in keys))


def pad_odd_dimension(sample: TwoClassSample, seed=None):
    """Append one standard normal column when ``d`` is odd.

    Returns
    -------
    (TwoClassSample, bool)
        The possibly padded sample and whether padding happened. The padding
        column, if any, is the last one (index ``d``).
    """
    if sample.d % 2 == 0:
        return sample, False
    rng = np.random.default_rng(seed_sequence(seed, *_PAD_KEY))
    extra1 = rng.standard_normal((sample.n1, 1))
    extra2 = rng.standard_normal((sample.n2, 1))
    names = None
    if sample.feature_names is not None:
        names = list(sample.feature_names) + ["_padding"]
    padded = TwoClassSample(np.hstack([sample.class1, extra1]),
                            np.hstack([sample.class2, extra2]), names)
    return padded, True


def matched_pairs(sample, kernel, config=None, method="auto",
                  exact_max_dim=DEFAULT_EXACT_MAX_DIM):
    """Optimal pairing of the (even) columns of ``sample`` and its pair energies."""
    config = config or ScreenConfig()
    energies = pair_energy_matrix(sample, kernel, config.statistic)
    matching = min_weight_perfect_matching(build_weight_matrix(energies), method,
                                           exact_max_dim)
    values = np.array([energies.values[i, j] for i, j in matching.pairs])
    return matching, values


def pairs_screen(sample: TwoClassSample, kernel, config=None, seed=None,
                 method="auto", exact_max_dim=DEFAULT_EXACT_MAX_DIM) -> ScreenedSet:
    """Screen feature pairs by their matched pair energies.

    The ratio rule runs over the ``d/2`` matched energies with the range
    resolved against that count. A selected pair that contains the padding
    column is reported as a singleton of its real feature.
    """
    config = config or ScreenConfig()
    kernel = get_kernel(kernel)
    d = sample.d
    work, padded = pad_odd_dimension(sample, seed)
    pad = d if padded else None
    matching, values = matched_pairs(work, kernel, config, method, exact_max_dim)
    cut = ratio_cut(values, config)
    keep = top_indices(values, cut.s_hat, config.energy_floor)
    marginal, pairs = [], []
    for k in keep:
        i, j = matching.pairs[k]
        if pad is not None and pad in (i, j):
            marginal.append(i if j == pad else j)
        else:
            pairs.append((i, j))
    return ScreenedSet(tuple(marginal), tuple(pairs), cut.t_hat, cut.s_hat, d,
                       profile=values, method="pairs", null_warning=cut.null_warning,
                       padded_index=pad, matching=matching)


__all__ = ["pad_odd_dimension", "pairs_screen", "matched_pairs", "seed_sequence"]
