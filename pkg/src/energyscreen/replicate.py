"""Seeded replication of the screening and classification experiments.

Each replicate draws its own training and test data from child seed streams,
so replicate ``r`` gives the same numbers whatever the number of workers.
Summaries reduce over replicates in index order.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._parallel import parallel_map, replicate_seeds
from .classify import fit_discriminant, misclassification_rate
from .exceptions import ConfigurationError
from .kernels import get_kernel
from .mixs import DEFAULT_RESAMPLES, SCHEMES, mixs_screen
from .pairs import pairs_screen
from .screening import (NOISE_DISTRIBUTIONS, ScreenConfig, ScreenedSet, mars_screen,
                        noise_ratio_samples)
from .simulate import ExampleSpec, generate, signal_indices, true_signals

METHODS = ("wos", "mars", "pairs", "mixs")
GAMMAS = ("g1", "g2", "g3")
DEFAULT_TEST_PER_CLASS = 250


@dataclass(frozen=True)
class ReplicationConfig:
    """Everything that determines a replication run.

    ``classify`` toggles the misclassification part; without it only the
    screening counts are produced. ``test_per_class`` rows per class make
    up each replicate's test set.
    """

    example: int
    reps: int = 100
    n1: int = 100
    n2: int = 100
    d: int = 1000
    seed: int = 0
    methods: Sequence[str] = ("mars",)
    gammas: Sequence[str] = ("g2",)
    classify: bool = True
    test_per_class: int = DEFAULT_TEST_PER_CLASS
    resamples: int = DEFAULT_RESAMPLES
    scheme: str = "permutation"
    search_lo: Optional[int] = None
    search_hi: Optional[int] = None
    statistic: str = "plugin"

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "gammas", tuple(self.gammas))
        if self.reps < 1:
            raise ConfigurationError("reps must be at least 1")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ConfigurationError(f"methods must be drawn from {METHODS}, got {self.methods}")
        bad = [g for g in self.gammas if g not in GAMMAS]
        if bad or not self.gammas:
            raise ConfigurationError(f"gammas must be drawn from {GAMMAS}, got {self.gammas}")
        if self.test_per_class < 1:
            raise ConfigurationError("test_per_class must be positive")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"scheme must be one of {SCHEMES}")
        if self.resamples < 20:
            raise ConfigurationError("resamples must be at least 20")
        # validates the example id, sizes and seed
        ExampleSpec(self.example, self.n1, self.n2, self.d, self.seed)
        self.screen_config()

    def screen_config(self):
        return ScreenConfig(self.search_lo, self.search_hi, statistic=self.statistic)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ReplicateRecord:
    """Outcome of one (replicate, method, gamma) cell."""

    rep: int
    method: str
    gamma: str
    signals: int
    noise: int
    exact: bool
    error: float = math.nan
    marginal: tuple = ()
    pairs: tuple = ()


@dataclass
class ReplicationResult:
    config: ReplicationConfig
    records: list = field(default_factory=list)

    def summary(self):
        """Rows of mean and standard error per (method, gamma), in config order."""
        rows = []
        for method in self.config.methods:
            for gamma in self.config.gammas:
                cell = [r for r in self.records if r.method == method and r.gamma == gamma]
                cell.sort(key=lambda r: r.rep)
                sig = np.array([r.signals for r in cell], dtype=float)
                noi = np.array([r.noise for r in cell], dtype=float)
                err = np.array([r.error for r in cell], dtype=float)
                exact = np.array([r.exact for r in cell], dtype=float)
                rows.append({
                    "method": method, "gamma": gamma, "reps": len(cell),
                    "signals_mean": _mean(sig), "signals_se": _se(sig),
                    "noise_mean": _mean(noi), "noise_se": _se(noi),
                    "exact_rate": _mean(exact),
                    "error_mean": _mean(err), "error_se": _se(err),
                })
        return rows

    def cell(self, method, gamma):
        for row in self.summary():
            if row["method"] == method and row["gamma"] == gamma:
                return row
        raise KeyError((method, gamma))


def _mean(v):
    if v.size == 0 or np.isnan(v).any():
        return math.nan
    return float(v.mean())


def _se(v):
    if v.size < 2 or np.isnan(v).any():
        return math.nan
    return float(v.std(ddof=1) / math.sqrt(v.size))


def _child_int(seq):
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _screen(method, train, kernel, config, cfg, seed):
    if method == "wos":
        return ScreenedSet.all_singletons(train.d)
    if method == "mars":
        return mars_screen(train, kernel, config)
    if method == "pairs":
        return pairs_screen(train, kernel, config, seed)
    return mixs_screen(train, kernel, config, cfg.resamples, seed, cfg.scheme)


def _exact(screened, example):
    marginal, pairs = true_signals(example)
    if screened.method == "mars":
        return set(screened.marginal) == set(signal_indices(example))
    return set(screened.marginal) == set(marginal) and set(screened.pairs) == set(pairs)


def _run_one(args):
    cfg, rep, seq = args
    train_seq, test_seq, method_seq = seq.spawn(3)
    train = generate(ExampleSpec(cfg.example, cfg.n1, cfg.n2, cfg.d, _child_int(train_seq)))
    test = None
    if cfg.classify:
        test = generate(ExampleSpec(cfg.example, cfg.test_per_class, cfg.test_per_class,
                                    cfg.d, _child_int(test_seq)))
    truth = signal_indices(cfg.example)
    config = cfg.screen_config()
    method_seed = _child_int(method_seq)
    out = []
    for method in cfg.methods:
        for gamma in cfg.gammas:
            kernel = get_kernel(gamma)
            screened = _screen(method, train, kernel, config, cfg, method_seed)
            sig, noi = screened.count_retained(truth)
            err = math.nan
            if test is not None and not screened.is_empty():
                model = fit_discriminant(train, screened, kernel)
                err = misclassification_rate(model, test)
            out.append(ReplicateRecord(rep, method, gamma, sig, noi,
                                       _exact(screened, cfg.example), err,
                                       screened.marginal, screened.pairs))
    return out


def run_replications(cfg: ReplicationConfig, workers=1) -> ReplicationResult:
    """Run every replicate of ``cfg`` and collect per-cell records."""
    if cfg.example == 8:
        # fail fast (and in the parent) when no plug-in sampler is registered
        generate(ExampleSpec(8, 2, 2, 4, 0))
    seeds = replicate_seeds(cfg.seed, cfg.reps)
    tasks = [(cfg, r, s) for r, s in enumerate(seeds)]
    result = ReplicationResult(cfg)
    for chunk in parallel_map(_run_one, tasks, workers):
        result.records.extend(chunk)
    return result


# ------------------------------------------------------------ noise ratio trend

def noise_ratio_table(n_grid, d_noise, reps=100, dists=NOISE_DISTRIBUTIONS, seed=0,
                      kernel="g1", statistic="plugin", workers=1):
    """Mean and standard error of the maximal noise ratio for each ``(dist, n)``."""
    rows = []
    for k, dist in enumerate(dists):
        for q, n in enumerate(n_grid):
            sub = np.random.SeedSequence(seed, spawn_key=(k, q))
            vals = noise_ratio_samples(d_noise, n, reps, dist, sub, kernel, statistic,
                                       workers=workers)
            rows.append({"dist": dist, "n": int(n), "d_noise": int(d_noise), "reps": reps,
                         "mean": float(vals.mean()),
                         "se": float(vals.std(ddof=1) / math.sqrt(vals.size))})
    return rows


def is_non_increasing(values, slack=0.0):
    """True when each value is at most ``slack`` above its predecessor."""
    return all(b <= a + slack for a, b in zip(values, values[1:]))


__all__ = [
    "ReplicationConfig", "ReplicateRecord", "ReplicationResult", "run_replications",
    "noise_ratio_table", "is_non_increasing", "METHODS", "GAMMAS",
]
