"""Timing of the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 100] [--dim 1000] [--repeat 3]

Each workload runs once untimed to trigger compilation, then the best of
``--repeat`` runs is reported along with the largest difference between the
two backends' outputs.
"""

import argparse
import time

import numpy as np

from energyscreen import _backend
from energyscreen.energy import marginal_energy_profile, pair_energy_matrix
from energyscreen.mixs import _split_counts, split_statistics
from energyscreen.simulate import ExampleSpec, generate


def best_of(func, repeat):
    func()
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = func()
        best = min(best, time.perf_counter() - t0)
    return best, out


def workloads(n, dim, pair_dim):
    wide = generate(ExampleSpec(1, n, n, dim, seed=1))
    narrow = generate(ExampleSpec(2, n, n, pair_dim, seed=2))
    z = np.vstack([narrow.class1[:, :2], narrow.class2[:, :2]])
    c1, c2 = _split_counts(np.random.default_rng(3), n, n, 200, "permutation")
    return {
        f"marginal profile g1 (d={dim})":
            lambda: marginal_energy_profile(wide, "g1").energies,
        f"marginal profile g2 (d={dim})":
            lambda: marginal_energy_profile(wide, "g2").energies,
        f"marginal profile g3 (d={dim})":
            lambda: marginal_energy_profile(wide, "g3").energies,
        f"pair matrix g2 (d={pair_dim})":
            lambda: pair_energy_matrix(narrow, "g2").values,
        f"pair matrix g1 (d={pair_dim})":
            lambda: pair_energy_matrix(narrow, "g1").values,
        "split statistics g1 (200 resamples)":
            lambda: split_statistics(z[:, 0], z[:, 1], c1, c2, n, n, "g1"),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--dim", type=int, default=1000)
    ap.add_argument("--pair-dim", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    jobs = workloads(args.n, args.dim, args.pair_dim)
    print(f"{'workload':<38}{'numba s':>10}{'numpy s':>10}{'speedup':>9}{'max diff':>11}")
    for name, job in jobs.items():
        times, outs = {}, {}
        for backend in ("numba", "numpy"):
            prev = _backend.set_backend(backend)
            try:
                times[backend], outs[backend] = best_of(job, args.repeat)
            finally:
                _backend.set_backend(prev)
        diff = np.nanmax(np.abs(np.asarray(outs["numba"]) - np.asarray(outs["numpy"])))
        print(f"{name:<38}{times['numba']:>10.4f}{times['numpy']:>10.4f}"
              f"{times['numpy'] / times['numba']:>8.1f}x{diff:>11.1e}")


if __name__ == "__main__":
    main()
