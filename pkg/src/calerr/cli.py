"""Command-line interface: compute, synth, true-ce, bench.

Datasets travel as CSV with header p_0,...,p_{k-1},label; estimates are emitted
as a JSON report with a stable key order.  All randomness derives from the
--seed flag, so identical invocations produce byte-identical outputs.  The
CALIB_THREADS environment variable caps benchmark parallelism; results do not
depend on it.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import __version__
from .baselines import binned_ece_binary, clustered_ece_multiclass
from .core import CEReport, LabeledDataset, MetricSpec, subseed
from .estimator import estimate_ce_cv, estimate_ce_insample
from .recalibrate import RECALIBRATOR_KINDS, RecalibratorSpec
from .synthetic import RNG_NAME, SCENARIO_KINDS, Scenario, make_dataset, true_ce_monte_carlo

_METRIC_TOKENS = {
    "l1": ("lp", 1.0),
    "l2": ("lp", 2.0),
    "brier": ("brier", 1.0),
    "logloss": ("logloss", 1.0),
    "topclass-l1": ("topclass_l1", 1.0),
    "over": ("over_confidence", 1.0),
    "under": ("under_confidence", 1.0),
    "topclass-over": ("topclass_over", 1.0),
    "topclass-under": ("topclass_under", 1.0),
}

_BENCH_ESTIMATORS = ("cv-variational", "insample-variational", "binning")


def parse_metric(token: str) -> MetricSpec:
    if token in _METRIC_TOKENS:
        kind, p = _METRIC_TOKENS[token]
        return MetricSpec(kind, p)
    for prefix, kind in (("lp:", "lp"), ("lpp:", "lp_power_p")):
        if token.startswith(prefix):
            try:
                return MetricSpec(kind, float(token[len(prefix):]))
            except ValueError as err:
                raise ValueError(f"bad metric token {token!r}: {err}") from None
    raise ValueError(f"unknown metric {token!r}")


def parse_dataset(path: str) -> LabeledDataset:
    """Read a prediction CSV; errors carry 1-based file line numbers."""
    with open(path, newline="") as fh:
        lines = [(no, line) for no, line in enumerate(fh.read().splitlines(), start=1)
                 if line and not line.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: no rows")
    header = next(csv.reader([lines[0][1]]))
    k = len(header) - 1
    if k < 2 or header != [f"p_{j}" for j in range(k)] + ["label"]:
        raise ValueError(f"{path}: expected header p_0,...,p_{{k-1}},label")
    preds = np.empty((len(lines) - 1, k))
    labels = np.empty(len(lines) - 1, dtype=np.int64)
    linenos = np.empty(len(lines) - 1, dtype=np.int64)
    for i, (no, line) in enumerate(lines[1:]):
        cells = next(csv.reader([line]))
        if len(cells) != k + 1:
            raise ValueError(f"{path}: line {no}: expected {k + 1} fields, got {len(cells)}")
        try:
            preds[i] = [float(c) for c in cells[:k]]
            labels[i] = int(cells[k])
        except ValueError:
            raise ValueError(f"{path}: line {no}: malformed number") from None
        if not 0 <= labels[i] < k:
            raise ValueError(f"{path}: line {no}: label {labels[i]} outside [0, {k - 1}]")
        linenos[i] = no
    try:
        return LabeledDataset(preds, labels)
    except ValueError as err:
        msg = str(err)
        if msg.startswith("row "):
            bad, rest = msg[4:].split(":", 1)
            raise ValueError(f"{path}: line {linenos[int(bad)]}:{rest}") from None
        raise ValueError(f"{path}: {msg}") from None


def write_dataset(d: LabeledDataset, path: str, comment: str | None = None):
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write(",".join([f"p_{j}" for j in range(d.k)] + ["label"]) + "\n")
        for row, label in zip(d.predictions, d.labels):
            fh.write(",".join(repr(float(v)) for v in row) + f",{int(label)}\n")


def emit_report(reports: list[CEReport], path: str):
    """JSON report with stable key order, reproducible byte-for-byte."""
    payload = {"reports": []}
    for r in reports:
        entry = r.to_dict()
        entry["version"] = __version__
        payload["reports"].append(entry)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _scenario_from_args(args) -> Scenario:
    return Scenario(
        kind=args.scenario,
        classes=args.classes,
        epsilon=args.epsilon,
        alpha=args.alpha,
        seed=args.seed,
    )


def _threads() -> int:
    raw = os.environ.get("CALIB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"CALIB_THREADS must be an integer, got {raw!r}") from None


def run_benchmark(scenario: Scenario, n_grid, reps: int, k_folds: int, seed: int,
                  threads: int = 1):
    """Mean and stderr per (n, estimator) over reps; independent of thread count."""
    binary = scenario.classes == 2
    metric = MetricSpec("lp", 1.0 if binary else 2.0)

    def one(job):
        ni, n, rep = job
        rep_seed = subseed(seed, ni, rep)
        data = make_dataset(replace(scenario, seed=rep_seed), n)
        spec = RecalibratorSpec("isotonic", seed=rep_seed)
        cv = estimate_ce_cv(data, metric, spec, k_folds, rep_seed).estimate
        ins = estimate_ce_insample(data, metric, spec).estimate
        if binary:
            # scalar binary convention, comparable with the binned ECE column
            cv, ins = cv / 2.0, ins / 2.0
            binned = binned_ece_binary(data, 15)
        else:
            binned = clustered_ece_multiclass(data, 30, seed=rep_seed)
        return cv, ins, binned

    jobs = [(ni, n, rep) for ni, n in enumerate(n_grid) for rep in range(reps)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, jobs))
    else:
        results = [one(job) for job in jobs]
    by_job = dict(zip(jobs, results))
    rows = []
    for ni, n in enumerate(n_grid):
        for ei, name in enumerate(_BENCH_ESTIMATORS):
            vals = np.array([by_job[(ni, n, rep)][ei] for rep in range(reps)])
            stderr = float(vals.std(ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
            rows.append((n, name, float(vals.mean()), stderr))
    return rows


def cmd_compute(args) -> int:
    data = parse_dataset(args.input)
    metric = parse_metric(args.metric)
    spec = RecalibratorSpec(
        args.recalibrator,
        bandwidth=args.bandwidth,
        n_clusters=args.clusters,
        seed=args.seed,
    )
    if args.no_cv:
        report = estimate_ce_insample(data, metric, spec)
    else:
        report = estimate_ce_cv(data, metric, spec, args.folds, args.seed)
    emit_report([report], args.output)
    return 0


def cmd_synth(args) -> int:
    s = _scenario_from_args(args)
    data = make_dataset(s, args.n)
    comment = (f"rng={RNG_NAME} scenario={s.kind} classes={s.classes} "
               f"n={args.n} seed={s.seed}")
    write_dataset(data, args.output, comment)
    return 0


def cmd_true_ce(args) -> int:
    s = _scenario_from_args(args)
    value, stderr = true_ce_monte_carlo(s, args.p, args.samples)
    out = {
        "scenario": s.kind,
        "classes": s.classes,
        "p": float(args.p),
        "value": value,
        "stderr": stderr,
        "samples": args.samples,
        "seed": args.seed,
        "version": __version__,
    }
    print(json.dumps(out))
    return 0


def cmd_bench(args) -> int:
    try:
        n_grid = [int(tok) for tok in args.n_grid.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"bad --n-grid {args.n_grid!r}") from None
    if not n_grid or min(n_grid) < 2 * args.folds:
        raise ValueError(f"--n-grid values must be >= {2 * args.folds}")
    if args.reps < 1:
        raise ValueError("--reps must be >= 1")
    s = _scenario_from_args(args)
    rows = run_benchmark(s, n_grid, args.reps, args.folds, args.seed, _threads())
    with open(args.output, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "estimator", "mean", "stderr"])
        for n, name, mean, stderr in rows:
            writer.writerow([n, name, repr(mean), repr(stderr)])
    return 0


def _add_scenario_flags(sub):
    sub.add_argument("--scenario", required=True, choices=SCENARIO_KINDS)
    sub.add_argument("--classes", type=int, default=2)
    sub.add_argument("--epsilon", type=float, default=0.02)
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="calerr",
                                     description="calibration-error estimation")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    c = subs.add_parser("compute", help="estimate calibration error from a CSV")
    c.add_argument("--input", required=True)
    c.add_argument("--metric", required=True,
                   help="l1|l2|lp:<p>|lpp:<p>|brier|logloss|over|under"
                        "|topclass-l1|topclass-over|topclass-under")
    c.add_argument("--recalibrator", default="isotonic", choices=RECALIBRATOR_KINDS)
    c.add_argument("--folds", type=int, default=5)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--no-cv", action="store_true", help="fit and score in-sample")
    c.add_argument("--bandwidth", type=float, default=0.1)
    c.add_argument("--clusters", type=int, default=None)
    c.add_argument("--output", required=True)
    c.set_defaults(fn=cmd_compute)

    s = subs.add_parser("synth", help="sample a synthetic scenario to CSV")
    _add_scenario_flags(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--output", required=True)
    s.set_defaults(fn=cmd_synth)

    t = subs.add_parser("true-ce", help="Monte Carlo ground-truth calibration error")
    _add_scenario_flags(t)
    t.add_argument("--p", type=float, default=1.0)
    t.add_argument("--samples", type=int, default=300_000)
    t.set_defaults(fn=cmd_true_ce)

    b = subs.add_parser("bench", help="compare estimators over a grid of sample sizes")
    _add_scenario_flags(b)
    b.add_argument("--n-grid", required=True, help="comma-separated sample sizes")
    b.add_argument("--reps", type=int, default=10)
    b.add_argument("--folds", type=int, default=5)
    b.add_argument("--output", required=True)
    b.set_defaults(fn=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", 0) < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return 1
    try:
        return args.fn(args)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
