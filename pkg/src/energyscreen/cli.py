"""Command-line front end.

Subcommands: ``screen``, ``classify``, ``simulate``, ``replicate`` and
``noise-ratio``. Feature indices in reports are 1-based, matching column
positions in the input file (the label column excluded).
"""

import argparse
import hashlib
import json
import sys

import numpy as np

from . import __version__
from ._parallel import default_workers
from .classify import discriminant_scores, fit_discriminant
from .csvio import read_labeled_csv, write_labeled_csv, write_rows
from .exceptions import ConfigurationError, DataError, EnergyScreenError
from .mixs import DEFAULT_RESAMPLES, SCHEMES, mixs_screen
from .pairs import pairs_screen
from .replicate import GAMMAS, METHODS, ReplicationConfig, noise_ratio_table, run_replications
from .screening import NOISE_DISTRIBUTIONS, ScreenConfig, ScreenedSet, mars_screen
from .simulate import ExampleSpec, generate


def _config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _metadata(command, cfg):
    return [f"tool: energyscreen {__version__}", f"command: {command}",
            f"config_hash: {_config_hash(cfg)}", f"seed: {cfg.get('seed')}"]


def _csv_list(text, allowed, what):
    items = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in items if t not in allowed]
    if bad or not items:
        raise ConfigurationError(f"invalid {what} {text!r}; choose from {', '.join(allowed)}")
    return items


def _int_list(text, what):
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigurationError(f"{what} must be a comma-separated list of integers") from None
    if not values:
        raise ConfigurationError(f"{what} is empty")
    return values


def _positive(name, value, minimum=1):
    if value is not None and value < minimum:
        raise ConfigurationError(f"--{name} must be >= {minimum}, got {value}")


def _screen_config(args):
    return ScreenConfig(args.range_lo, args.range_hi, statistic=args.statistic)


def _run_screen(sample, args, config):
    if args.method == "wos":
        return ScreenedSet.all_singletons(sample.d)
    if args.method == "mars":
        return mars_screen(sample, args.gamma, config)
    if args.method == "pairs":
        return pairs_screen(sample, args.gamma, config, args.seed)
    return mixs_screen(sample, args.gamma, config, args.perm_count, args.seed, args.scheme,
                       workers=args.workers)


def _one(k):
    return k + 1


def _screen_rows(screened):
    """Machine-readable rows: one per feature or matched pair."""
    rows = []
    kept = set(screened.retained())
    if screened.method == "mars" and screened.profile is not None:
        for k, e in enumerate(screened.profile.energies):
            rows.append({"kind": "feature", "i": _one(k), "j": "", "energy": float(e),
                         "selected": int(k in kept), "verdict": ""})
    elif screened.method in ("pairs", "mixs") and screened.matching is not None:
        verdicts = {v.pair: v for v in screened.verdicts}
        pad = screened.padded_index
        for (i, j), e in zip(screened.matching.pairs, screened.profile):
            v = verdicts.get((i, j))
            rows.append({
                "kind": "pair", "i": _one(i), "j": "pad" if j == pad else _one(j),
                "energy": float(e),
                "selected": int(i in kept or (j != pad and j in kept)),
                "verdict": v.verdict.value if v else "",
                "p1": v.pvalues[0] if v else "", "p2": v.pvalues[1] if v else "",
                "p3": v.pvalues[2] if v else "", "p4": v.pvalues[3] if v else "",
            })
    else:
        for k in range(screened.d):
            rows.append({"kind": "feature", "i": _one(k), "j": "", "energy": "",
                         "selected": 1, "verdict": ""})
    return rows


def _describe(screened, out):
    marg = ", ".join(str(_one(k)) for k in screened.marginal) or "-"
    pairs = ", ".join(f"{{{_one(i)},{_one(j)}}}" for i, j in screened.pairs) or "-"
    print(f"method        : {screened.method}", file=out)
    print(f"t_hat / s_hat : {screened.t_hat} / {screened.s_hat}", file=out)
    print(f"marginal      : {marg}", file=out)
    print(f"pairs         : {pairs}", file=out)
    if screened.padded_index is not None:
        print(f"padding       : odd dimension; column {_one(screened.padded_index)} "
              "was added as noise and is excluded from the results", file=out)
    if screened.null_warning:
        print("warning       : cut energy is at the floor; the input looks like pure noise",
              file=out)
    for v in screened.verdicts:
        i, j = v.pair
        jj = "pad" if j == screened.padded_index else _one(j)
        ps = ", ".join(f"{p:.4f}" for p in v.pvalues)
        print(f"  pair {{{_one(i)},{jj}}}: p = ({ps}) -> {v.verdict.value}", file=out)


def cmd_screen(args):
    _positive("perm-count", args.perm_count, 20)
    _positive("workers", args.workers)
    config = _screen_config(args)
    sample = read_labeled_csv(args.input)
    screened = _run_screen(sample, args, config)
    cfg = {"method": args.method, "gamma": args.gamma, "seed": args.seed,
           "perm_count": args.perm_count, "range_lo": args.range_lo,
           "range_hi": args.range_hi, "statistic": args.statistic, "scheme": args.scheme,
           "input": str(args.input)}
    meta = _metadata("screen", cfg)
    for line in meta:
        print(f"# {line}")
    _describe(screened, sys.stdout)
    if args.out:
        fields = ["kind", "i", "j", "energy", "selected", "verdict", "p1", "p2", "p3", "p4"]
        write_rows(args.out, _screen_rows(screened), fields, meta + [
            f"t_hat: {screened.t_hat}", f"s_hat: {screened.s_hat}",
            f"null_warning: {int(screened.null_warning)}",
            f"padded: {int(screened.padded_index is not None)}"])
        print(f"report written to {args.out}")
    return 0


def cmd_classify(args):
    _positive("perm-count", args.perm_count, 20)
    _positive("workers", args.workers)
    config = _screen_config(args)
    train = read_labeled_csv(args.train)
    test = read_labeled_csv(args.test)
    if train.d != test.d:
        raise DataError(f"train has {train.d} features but test has {test.d}")
    screened = _run_screen(train, args, config)
    if screened.is_empty():
        raise DataError("screening retained no features; cannot classify")
    model = fit_discriminant(train, screened, args.gamma)
    z, labels = test.pooled()
    scores = discriminant_scores(model, z)
    pred = np.where(scores > 0.0, 1, 2)
    rate = float(np.mean(pred != labels))
    cfg = {"method": args.method, "gamma": args.gamma, "seed": args.seed,
           "perm_count": args.perm_count, "range_lo": args.range_lo,
           "range_hi": args.range_hi, "statistic": args.statistic,
           "train": str(args.train), "test": str(args.test)}
    meta = _metadata("classify", cfg)
    for line in meta:
        print(f"# {line}")
    _describe(screened, sys.stdout)
    print(f"misclassification rate: {rate!r} ({int((pred != labels).sum())} of {labels.size})")
    if args.out:
        rows = [{"row": k + 1, "label": int(labels[k]), "predicted": int(pred[k]),
                 "score": float(scores[k])} for k in range(labels.size)]
        write_rows(args.out, rows, ["row", "label", "predicted", "score"],
                   meta + [f"misclassification_rate: {rate!r}"])
        print(f"predictions written to {args.out}")
    return 0


def cmd_simulate(args):
    spec = ExampleSpec(args.example, args.n1, args.n2, args.dim, args.seed)
    sample = generate(spec)
    write_labeled_csv(args.out, sample)
    print(f"wrote example {spec.id} (n1={spec.n1}, n2={spec.n2}, d={spec.d}, "
          f"seed={spec.seed}) to {args.out}")
    return 0


def _fmt_pm(mean, se, scale=1.0, digits=3):
    if mean != mean:
        return "-"
    if se != se:
        return f"{mean * scale:.{digits}f}"
    return f"{mean * scale:.{digits}f} ± {se * scale:.{digits}f}"


def cmd_replicate(args):
    _positive("workers", args.workers)
    methods = _csv_list(args.method, METHODS, "method list")
    gammas = _csv_list(args.gamma, GAMMAS, "gamma list")
    cfg = ReplicationConfig(args.example, args.reps, args.n1, args.n2, args.dim, args.seed,
                            methods, gammas, not args.no_classify, args.test_size,
                            args.perm_count, args.scheme, args.range_lo, args.range_hi,
                            args.statistic)
    result = run_replications(cfg, workers=args.workers)
    meta = _metadata("replicate", cfg.as_dict())
    for line in meta:
        print(f"# {line}")
    rows = result.summary()
    print(f"example {cfg.example}: {cfg.reps} replicates, n1={cfg.n1}, n2={cfg.n2}, d={cfg.d}")
    print(f"{'method':<7}{'gamma':<7}{'signals':>18}{'noise':>18}{'exact':>8}{'error %':>18}")
    for r in rows:
        print(f"{r['method']:<7}{r['gamma']:<7}"
              f"{_fmt_pm(r['signals_mean'], r['signals_se']):>18}"
              f"{_fmt_pm(r['noise_mean'], r['noise_se']):>18}"
              f"{r['exact_rate']:>8.2f}"
              f"{_fmt_pm(r['error_mean'], r['error_se'], 100.0, 2):>18}")
    if args.out:
        fields = ["method", "gamma", "reps", "signals_mean", "signals_se", "noise_mean",
                  "noise_se", "exact_rate", "error_mean", "error_se"]
        write_rows(args.out, rows, fields, meta)
        print(f"summary written to {args.out}")
    if args.noise_grid:
        _noise_table(args, _int_list(args.noise_grid, "--noise-grid"), args.noise_dim,
                     args.reps, NOISE_DISTRIBUTIONS)
    return 0


def _noise_table(args, grid, d_noise, reps, dists):
    rows = noise_ratio_table(grid, d_noise, reps, dists, args.seed, "g1", args.statistic,
                             workers=args.workers)
    print(f"maximal consecutive noise-energy ratio, d_noise={d_noise}, {reps} replicates")
    print(f"{'dist':<10}{'n':>6}{'mean ± se':>22}")
    for r in rows:
        print(f"{r['dist']:<10}{r['n']:>6}{_fmt_pm(r['mean'], r['se'], digits=4):>22}")
    return rows


def cmd_noise_ratio(args):
    _positive("workers", args.workers)
    _positive("reps", args.reps, 2)
    _positive("dim", args.dim, 2)
    grid = _int_list(args.n_grid, "--n-grid")
    if min(grid) < 2:
        raise ConfigurationError("every n in --n-grid must be >= 2")
    dists = _csv_list(args.dist, NOISE_DISTRIBUTIONS, "distribution list")
    rows = _noise_table(args, grid, args.dim, args.reps, dists)
    if args.out:
        cfg = {"n_grid": grid, "dim": args.dim, "reps": args.reps, "seed": args.seed,
               "dist": dists, "statistic": args.statistic}
        write_rows(args.out, rows, ["dist", "n", "d_noise", "reps", "mean", "se"],
                   _metadata("noise-ratio", cfg))
        print(f"table written to {args.out}")
    return 0


def _add_common(p, seed_default=0):
    p.add_argument("--seed", type=int, default=seed_default, help="random seed (default %(default)s)")
    p.add_argument("--workers", type=int, default=default_workers(),
                   help="worker processes (default: available cores)")
    p.add_argument("--statistic", choices=("plugin", "unbiased"), default="plugin",
                   help="energy estimator used for ranking (default %(default)s)")


def _add_screening(p, multi=False):
    if multi:
        p.add_argument("--method", default="mars",
                       help="comma-separated methods from " + ",".join(METHODS))
        p.add_argument("--gamma", default="g2", help="comma-separated kernels g1,g2,g3")
    else:
        p.add_argument("--method", choices=METHODS, default="mars")
        p.add_argument("--gamma", choices=GAMMAS, default="g2")
    p.add_argument("--perm-count", type=int, default=DEFAULT_RESAMPLES,
                   help="resamples per pair for mixs (default %(default)s)")
    p.add_argument("--scheme", choices=SCHEMES, default="permutation")
    p.add_argument("--range-lo", type=int, default=None, help="first ratio index searched")
    p.add_argument("--range-hi", type=int, default=None, help="last ratio index searched")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="energyscreen",
        description="Energy-distance screening and classification for two-class data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("screen", help="screen the features of a labelled CSV file")
    p.add_argument("--input", required=True, help="CSV with a 'label' column (1/2)")
    p.add_argument("--out", default=None, help="write the CSV report here")
    _add_screening(p)
    _add_common(p)
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("classify", help="screen, fit on a training CSV, evaluate on a test CSV")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", default=None, help="write per-row predictions here")
    _add_screening(p)
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("simulate", help="write a simulated example as CSV")
    p.add_argument("--example", type=int, required=True, help="design id 1..8")
    p.add_argument("--n1", type=int, default=100)
    p.add_argument("--n2", type=int, default=100)
    p.add_argument("--dim", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replicate", help="replicate screening and classification tables")
    p.add_argument("--example", type=int, required=True)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--n1", type=int, default=100)
    p.add_argument("--n2", type=int, default=100)
    p.add_argument("--dim", type=int, default=1000)
    p.add_argument("--test-size", type=int, default=250, help="test rows per class")
    p.add_argument("--no-classify", action="store_true", help="screening counts only")
    p.add_argument("--noise-grid", default=None,
                   help="also print the noise-ratio trend for these n (comma-separated)")
    p.add_argument("--noise-dim", type=int, default=200)
    p.add_argument("--out", default=None, help="write the summary CSV here")
    _add_screening(p, multi=True)
    _add_common(p)
    p.set_defaults(func=cmd_replicate)

    p = sub.add_parser("noise-ratio", help="maximal consecutive energy ratio on pure noise")
    p.add_argument("--n-grid", default="5,10,20", help="comma-separated sample sizes per class")
    p.add_argument("--dim", type=int, default=200, help="number of noise features")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--dist", default="gaussian,cauchy")
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_noise_ratio)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    except EnergyScreenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
