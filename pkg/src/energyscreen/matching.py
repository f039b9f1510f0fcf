"""Optimal non-bipartite matching of features by pair energy.

The pairing that maximises the total pair energy is found as a minimum-weight
perfect matching on the complete graph with weights ``W = K - E``, where
``K = max(E) + 1`` keeps every weight strictly positive.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._blossom import max_weight_perfect_matching_dense
from .energy import PairEnergyMatrix
from .exceptions import ConfigurationError, PreconditionError

DEFAULT_EXACT_MAX_DIM = 2000


@dataclass(frozen=True)
class WeightMatrix:
    """Edge weights ``offset - E`` together with the energies they came from."""

    values: np.ndarray
    offset: float
    energies: Optional[np.ndarray] = None

    @property
    def d(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class Matching:
    """A perfect matching as sorted 0-based pairs ``(i, j)`` with ``i < j``.

    ``total_energy`` is ``None`` when the matching was computed from bare
    weights with no energy matrix attached.
    """

    pairs: tuple
    total_weight: float
    total_energy: Optional[float] = None

    def partner(self):
        """Array mapping each index to its partner."""
        d = 2 * len(self.pairs)
        out = np.empty(d, dtype=np.int64)
        for i, j in self.pairs:
            out[i] = j
            out[j] = i
        return out


def _offdiag_max(values):
    mask = ~np.eye(values.shape[0], dtype=bool)
    return float(values[mask].max())


def build_weight_matrix(energies):
    """Turn pair energies into strictly positive matching weights.

    Parameters
    ----------
    energies : PairEnergyMatrix or array_like
        Symmetric ``(d, d)`` matrix; the diagonal is ignored.

    Returns
    -------
    WeightMatrix
        ``W[i, j] = max(E) + 1 - E[i, j]`` off the diagonal, NaN on it.
    """
    if isinstance(energies, PairEnergyMatrix):
        energies = energies.values
    e = np.array(energies, dtype=np.float64)
    if e.ndim != 2 or e.shape[0] != e.shape[1]:
        raise PreconditionError("energy matrix must be square")
    d = e.shape[0]
    if d < 2 or d % 2:
        raise PreconditionError(f"matching needs an even dimension >= 2, got d={d}")
    mask = ~np.eye(d, dtype=bool)
    if not np.isfinite(e[mask]).all():
        raise PreconditionError("energy matrix has non-finite off-diagonal entries")
    offset = _offdiag_max(e) + 1.0
    w = offset - e
    np.fill_diagonal(w, np.nan)
    return WeightMatrix(w, offset, e)


def _validate_weights(weights):
    wm = weights if isinstance(weights, WeightMatrix) else None
    w = np.asarray(wm.values if wm is not None else weights, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise PreconditionError("weight matrix must be square")
    d = w.shape[0]
    if d < 2 or d % 2:
        raise PreconditionError(f"perfect matching needs an even dimension >= 2, got d={d}")
    off = w[~np.eye(d, dtype=bool)]
    if not np.isfinite(off).all():
        raise PreconditionError("weight matrix has non-finite off-diagonal entries")
    if (off <= 0).any():
        raise PreconditionError("weights must be strictly positive")
    return w, wm


def _finish(pairs, w, wm):
    pairs = tuple(sorted((min(i, j), max(i, j)) for i, j in pairs))
    total_w = float(sum(w[i, j] for i, j in pairs))
    total_e = None
    if wm is not None and wm.energies is not None:
        e = wm.energies
        total_e = float(sum(e[i, j] for i, j in pairs))
    return Matching(pairs, total_w, total_e)


def _exact_pairs(w):
    # maximise -W: negation is exact, so no rounding enters the comparisons
    neg = -w.copy()
    np.fill_diagonal(neg, 0.0)
    mate = max_weight_perfect_matching_dense(neg)
    d = w.shape[0]
    if (mate < 0).any() or not np.array_equal(mate[mate], np.arange(d)):
        raise RuntimeError("matching solver returned an invalid matching")
    return [(i, int(mate[i])) for i in range(d) if i < mate[i]]


def _greedy_pairs(w):
    d = w.shape[0]
    iu, ju = np.triu_indices(d, 1)
    order = np.argsort(w[iu, ju], kind="stable")
    used = np.zeros(d, dtype=bool)
    pairs = []
    for k in order:
        i, j = iu[k], ju[k]
        if not used[i] and not used[j]:
            used[i] = used[j] = True
            pairs.append((int(i), int(j)))
            if len(pairs) == d // 2:
                break
    return pairs


def min_weight_perfect_matching(weights, method="auto", exact_max_dim=DEFAULT_EXACT_MAX_DIM):
    """Perfect matching of minimum total weight.

    Parameters
    ----------
    weights : WeightMatrix or array_like
        Symmetric positive weights; the diagonal is ignored.
    method : {"auto", "exact", "greedy"}
        ``"auto"`` solves exactly up to ``exact_max_dim`` and falls back to the
        greedy heuristic (largest energy first) above it.
    exact_max_dim : int
        Threshold used by ``"auto"``.
    """
    w, wm = _validate_weights(weights)
    if method not in ("auto", "exact", "greedy"):
        raise ConfigurationError(f"unknown matching method {method!r}")
    d = w.shape[0]
    if method == "greedy" or (method == "auto" and d > exact_max_dim):
        pairs = _greedy_pairs(w)
    else:
        pairs = _exact_pairs(w)
    return _finish(pairs, w, wm)


def enumerate_perfect_matchings(d):
    """Yield every perfect matching of ``range(d)`` as a list of pairs."""
    if d % 2:
        raise PreconditionError("d must be even")

    def rec(rest):
        if not rest:
            yield []
            return
        a = rest[0]
        for k in range(1, len(rest)):
            b = rest[k]
            for tail in rec(rest[1:k] + rest[k + 1:]):
                yield [(a, b)] + tail

    yield from rec(list(range(d)))


def brute_force_min_weight(weights):
    """Minimum total weight over all perfect matchings (small ``d`` only)."""
    w, _ = _validate_weights(weights)
    best = None
    for m in enumerate_perfect_matchings(w.shape[0]):
        total = float(sum(w[i, j] for i, j in sorted(m)))
        if best is None or total < best:
            best = total
    return best


def matching_count(d):
    """Number of perfect matchings of ``d`` points, ``(d-1)!!``."""
    return int(np.prod(np.arange(d - 1, 0, -2))) if d > 0 else 1


__all__ = [
    "WeightMatrix", "Matching", "build_weight_matrix", "min_weight_perfect_matching",
    "enumerate_perfect_matchings", "brute_force_min_weight", "matching_count",
    "DEFAULT_EXACT_MAX_DIM",
]
