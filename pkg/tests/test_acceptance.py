"""Exit checks at full replicate counts.

Each check prints one ``PASS`` or ``FAIL`` line. Replication runs are cached
per module and rerun once with two workers for the determinism check. Run
``python tests/test_acceptance.py`` to get the report without pytest.
"""

import json
import math

import numpy as np
import pytest

from energyscreen.energy import marginal_energy, population_energy_discrete
from energyscreen.matching import brute_force_min_weight, min_weight_perfect_matching
from energyscreen.replicate import (GAMMAS, ReplicationConfig, is_non_increasing,
                                    noise_ratio_table, run_replications)

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]

SEED = 20240611
REPS = 100

# Example 1 screening and error
EX1_SIGNALS_MIN = 3.8
EX1_NOISE_MAX = 0.5
EX1_ERROR_TARGET, EX1_ERROR_TOL = 0.1745, 0.025
# Example 2 paired screening at reduced size
EX2_D, EX2_REPS = 200, 20
EX2_BOTH_PAIRS_MIN = 0.80
EX2_ERROR_MAX = 0.25
# Example 5 heavy tails
EX5_G2_MAX, EX5_G3_MIN = 0.16, 0.45
# Example 4 scale difference
EX4_ERROR_TARGET, EX4_ERROR_TOL = 0.1014, 0.03
# matching
MATCHING_DIMS, MATCHING_INSTANCES = (4, 6, 8), 100
# unbiasedness
UNBIASED_REPS, UNBIASED_N, UNBIASED_SE = 10_000, 10, 4.0
# noise ratio trend
NOISE_GRID, NOISE_D = (5, 10, 20), 200
# exact screening trend
ESP_D, ESP_GRID, ESP_SLACK = 200, (50, 100, 200), 0.02

RUNS = {
    "ex1": ReplicationConfig(1, reps=REPS, seed=SEED, methods=("mars",), gammas=("g2",)),
    "ex2": ReplicationConfig(2, reps=EX2_REPS, d=EX2_D, seed=SEED, methods=("mixs",),
                             gammas=("g1",)),
    "ex5": ReplicationConfig(5, reps=REPS, seed=SEED, methods=("mars",), gammas=("g2", "g3")),
    "ex4": ReplicationConfig(4, reps=REPS, seed=SEED, methods=("mars",), gammas=("g1", "g3")),
}
for _n in ESP_GRID:
    RUNS[f"esp{_n}"] = ReplicationConfig(1, reps=REPS, n1=_n, n2=_n, d=ESP_D, seed=SEED,
                                         methods=("mars",), gammas=("g2",), classify=False)


def report(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name:<28} {detail}"
    print(line, flush=True)
    return ok


@pytest.fixture(scope="module")
def runs():
    cache = {}

    def get(key):
        if key not in cache:
            cache[key] = run_replications(RUNS[key], workers=1)
        return cache[key]

    return get


@pytest.fixture(scope="module")
def noise_tables():
    return noise_ratio_table(NOISE_GRID, NOISE_D, reps=REPS, seed=SEED, workers=1)


@pytest.fixture
def say(capsys):
    def out(name, ok, detail):
        with capsys.disabled():
            report(name, ok, detail)
        return ok
    return out


def test_example1_screening(runs, say):
    row = runs("ex1").cell("mars", "g2")
    ok = row["signals_mean"] >= EX1_SIGNALS_MIN and row["noise_mean"] <= EX1_NOISE_MAX
    assert say("example1_screening", ok,
               f"signals {row['signals_mean']:.2f} (>= {EX1_SIGNALS_MIN}), "
               f"noise {row['noise_mean']:.2f} (<= {EX1_NOISE_MAX})")


def test_example1_error(runs, say):
    err = runs("ex1").cell("mars", "g2")["error_mean"]
    ok = abs(err - EX1_ERROR_TARGET) <= EX1_ERROR_TOL
    assert say("example1_error", ok,
               f"error {100 * err:.2f}% (target {100 * EX1_ERROR_TARGET:.2f} "
               f"+/- {100 * EX1_ERROR_TOL:.1f})")


def test_example2_pairs(runs, say):
    res = runs("ex2")
    both = np.mean([{(0, 1), (2, 3)} <= set(r.pairs) for r in res.records])
    err = res.cell("mixs", "g1")["error_mean"]
    ok = both >= EX2_BOTH_PAIRS_MIN and err <= EX2_ERROR_MAX
    assert say("example2_pairs", ok,
               f"both pairs in {100 * both:.0f}% of reps (>= {100 * EX2_BOTH_PAIRS_MIN:.0f}), "
               f"error {100 * err:.2f}% (<= {100 * EX2_ERROR_MAX:.0f})")


def test_example5_heavy_tails(runs, say):
    res = runs("ex5")
    g2, g3 = res.cell("mars", "g2")["error_mean"], res.cell("mars", "g3")["error_mean"]
    ok = g2 <= EX5_G2_MAX and g3 >= EX5_G3_MIN
    assert say("example5_heavy_tails", ok,
               f"g2 {100 * g2:.2f}% (<= {100 * EX5_G2_MAX:.0f}), "
               f"g3 {100 * g3:.2f}% (>= {100 * EX5_G3_MIN:.0f})")


def test_example4_scale(runs, say):
    res = runs("ex4")
    g1, g3 = res.cell("mars", "g1")["error_mean"], res.cell("mars", "g3")["error_mean"]
    ok = abs(g1 - EX4_ERROR_TARGET) <= EX4_ERROR_TOL and g1 < g3
    assert say("example4_scale", ok,
               f"g1 {100 * g1:.2f}% (target {100 * EX4_ERROR_TARGET:.2f} "
               f"+/- {100 * EX4_ERROR_TOL:.0f}), g3 {100 * g3:.2f}%")


def test_matching_exact(say):
    rng = np.random.default_rng(SEED)
    mismatches = 0
    for d in MATCHING_DIMS:
        for k in range(MATCHING_INSTANCES):
            if k % 2:
                w = rng.integers(1, 50, size=(d, d)).astype(float)
            else:
                w = rng.random((d, d)) + 0.01
            w = np.triu(w, 1)
            w = w + w.T
            got = min_weight_perfect_matching(w, method="exact").total_weight
            mismatches += got != brute_force_min_weight(w)
    ok = mismatches == 0
    assert say("matching_exact", ok,
               f"{mismatches} mismatches over {len(MATCHING_DIMS) * MATCHING_INSTANCES} "
               f"instances, d in {MATCHING_DIMS}")


@pytest.mark.parametrize("gamma", GAMMAS)
def test_unbiased(gamma, say):
    px, py = [0.5, 0.5], [0.3, 0.7]
    truth = population_energy_discrete([0, 1], px, [0, 2], py, gamma)
    rng = np.random.default_rng(SEED)
    vals = np.empty(UNBIASED_REPS)
    for r in range(UNBIASED_REPS):
        x = rng.choice([0.0, 1.0], size=UNBIASED_N, p=px)
        y = rng.choice([0.0, 2.0], size=UNBIASED_N, p=py)
        vals[r] = marginal_energy(x, y, gamma)
    se = vals.std(ddof=1) / math.sqrt(UNBIASED_REPS)
    z = (vals.mean() - truth) / se
    ok = abs(z) <= UNBIASED_SE
    assert say(f"unbiased_{gamma}", ok,
               f"mean {vals.mean():.5f} vs exact {truth:.5f}, z={z:+.2f} (|z| <= {UNBIASED_SE:.0f})")


@pytest.mark.parametrize("dist", ["gaussian", "cauchy"])
def test_noise_ratio_trend(noise_tables, dist, say):
    means = [r["mean"] for r in noise_tables if r["dist"] == dist]
    ok = len(means) >= 3 and is_non_increasing(means)
    assert say(f"noise_ratio_{dist}", ok,
               "means " + ", ".join(f"n={n}: {m:.3f}" for n, m in zip(NOISE_GRID, means)))


def test_exact_screening_trend(runs, say):
    rates = [runs(f"esp{n}").cell("mars", "g2")["exact_rate"] for n in ESP_GRID]
    ok = all(b >= a - ESP_SLACK for a, b in zip(rates, rates[1:]))
    assert say("exact_screening_trend", ok,
               "rates " + ", ".join(f"n={n}: {r:.2f}" for n, r in zip(ESP_GRID, rates)))


def _frozen(rows):
    return json.dumps(rows, sort_keys=True)


def test_determinism_across_workers(runs, noise_tables, say):
    changed = []
    for key, cfg in RUNS.items():
        again = run_replications(cfg, workers=2)
        if _frozen(again.summary()) != _frozen(runs(key).summary()):
            changed.append(key)
    again = noise_ratio_table(NOISE_GRID, NOISE_D, reps=REPS, seed=SEED, workers=2)
    if _frozen(again) != _frozen(noise_tables):
        changed.append("noise_ratio")
    ok = not changed
    assert say("determinism_workers", ok,
               f"{len(RUNS) + 1} summaries compared, differing: {changed or 'none'}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
