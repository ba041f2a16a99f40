"""Command-line entry point.

``RAMANUJAN_LAB_OUT`` sets the default output directory and
``RAMANUJAN_LAB_THREADS`` the default worker count. Numbers are printed with
six significant digits; CSV files on disk keep full precision.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness
from .ensembles import CONSTRAINTS, FAMILIES, EnsembleSpec
from .exceptions import SamplingExhaustedError
from .stats import CHI2_CRIT_01, CHI2_CRIT_05, threshold_sigma_distance
from .tracy_widom import REFERENCE_NAMES, tw_table


def fmt(x):
    if x is None:
        return "-"
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.6g}"


def _row(*cells):
    return ",".join(c if isinstance(c, str) else fmt(c) for c in cells)


def _refs(text):
    names = tuple(t.strip().lower() for t in text.split(",") if t.strip())
    bad = [n for n in names if n not in REFERENCE_NAMES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown reference(s) {bad}; choose from {REFERENCE_NAMES}")
    return names


def cmd_sample(args, out):
    spec = EnsembleSpec(args.family, args.constraint, args.n, args.d, args.max_rejections)
    records = harness.run_cell(spec, args.count, args.seed, workers=args.workers)
    path = harness.write_cell(args.out, spec, records)
    cell = harness.CellData(spec.label, args.n, args.d, records)
    print(f"wrote {path}", file=sys.stderr)
    print(_row("family", "N", "d", "rows", "discarded", "mean_lambda_plus", "percent_ramanujan"), file=out)
    lp = cell.lambda_plus()
    pr = np.mean([r.is_ramanujan for r in cell.converged])
    print(_row(spec.label, args.n, args.d, len(records), cell.discarded, lp.mean(), pr), file=out)
    return 0


def cmd_run(args, out):
    config = harness.ExperimentConfig(
        families=args.families.split(","),
        N_list=harness.FULL_N_GRID if args.full_grid else harness.DESK_N_GRID,
        d_list=[int(d) for d in args.d.split(",")],
        samples_per_cell=args.count,
        master_seed=args.seed,
        output_path=args.out,
        workers=args.workers,
    )
    store = harness.run_experiment(config)
    print(f"{len(store)} cells in {args.out}", file=out)
    return 0


def _section(title, out):
    print(f"# {title}", file=out)


def cmd_analyze(args, out):
    store = harness.RunStore.load(args.inp)
    if not len(store):
        print(f"no cell CSVs found in {args.inp}", file=sys.stderr)
        return 1
    aggs = store.aggregates(args.refs)

    _section(f"chi-square (20 bins; crit {CHI2_CRIT_05} at .05, {CHI2_CRIT_01} at .01)", out)
    print(_row("family", "d", "N", "n", *[f"{r}_plus" for r in args.refs],
               *[f"{r}_minus" for r in args.refs]), file=out)
    for a in aggs:
        print(_row(a.label, a.d, a.N, a.n,
                   *[a.chi2_plus.get(r) for r in args.refs],
                   *[a.chi2_minus.get(r) for r in args.refs]), file=out)

    _section("z (mass left of mean)", out)
    print(_row("family", "d", "N", *[f"{r}_plus" for r in args.refs],
               *[f"{r}_minus" for r in args.refs]), file=out)
    for a in aggs:
        print(_row(a.label, a.d, a.N, *[a.z_plus[r] for r in args.refs],
                   *[a.z_minus[r] for r in args.refs]), file=out)

    _section("correlation of lambda_plus and lambda_minus", out)
    print(_row("family", "d", "N", "logN", "r"), file=out)
    for a in aggs:
        if a.correlation is not None:
            print(_row(a.label, a.d, a.N, float(np.log(a.N)), a.correlation), file=out)

    _section("exponent fits of lambda_plus", out)
    print(_row("family", "d", "N_lo", "N_hi", "c_mu", "m", "c_sigma", "s",
               "sigmas_to_threshold_at_N_hi"), file=out)
    for (label, d, lo, hi), fit in store.fit_windows():
        print(_row(label, d, lo, hi, fit.c_mu, fit.m, fit.c_sigma, fit.s,
                   threshold_sigma_distance(fit, hi)), file=out)

    _section("percent Ramanujan", out)
    print(_row("family", "d", "N", "percent_ramanujan", "discarded"), file=out)
    for a in aggs:
        print(_row(a.label, a.d, a.N, a.percent_ramanujan, a.discarded), file=out)
    return 0


def cmd_tw_table(args, out):
    table = tw_table(step=args.step, s_lo=args.s_lo, s_hi=args.s_hi)
    print("s,f1,F1,f2,F2,f4,F4", file=out)
    for row in table:
        print(_row(*row), file=out)
    return 0


def cmd_goe_validate(args, out):
    rep = harness.goe_validate(args.n, args.count, np.random.default_rng(args.seed))
    print(_row("N", "count", "mean_scaled", "std_scaled", "theta_obs", "theta_pred", "z", "chi2"),
          file=out)
    print(_row(rep.N, rep.count, rep.mean, rep.std, rep.z.theta_obs, rep.z.theta_pred,
               rep.z.z, rep.chi2.statistic), file=out)
    return 0


def cmd_plot_data(args, out):
    store = harness.RunStore.load(args.inp)
    rows = harness.emit_plot_data(store, args.figure)
    print("x,y,series", file=out)
    for x, y, series in rows:
        print(_row(x, y, series), file=out)
    return 0


def build_parser():
    out_default = harness.default_output_path()
    workers_default = harness.default_workers()
    p = argparse.ArgumentParser(prog="ramanujan-lab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="sample one cell and write its CSV")
    s.add_argument("--family", choices=FAMILIES, required=True)
    s.add_argument("--constraint", choices=CONSTRAINTS, default="none")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--count", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-rejections", type=int, default=10_000)
    s.add_argument("--out", default=out_default)
    s.add_argument("--workers", type=int, default=workers_default)
    s.set_defaults(func=cmd_sample)

    r = sub.add_parser("run", help="sweep families x N x d")
    r.add_argument("--families", default=",".join(harness.DEFAULT_FAMILIES))
    r.add_argument("--d", default="3", help="comma-separated degrees")
    r.add_argument("--count", type=int, default=1000)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--full-grid", action="store_true", help="N up to 20000 instead of 5022")
    r.add_argument("--out", default=out_default)
    r.add_argument("--workers", type=int, default=workers_default)
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("analyze", help="statistics tables for a run directory")
    a.add_argument("--in", dest="inp", default=out_default)
    a.add_argument("--refs", type=_refs, default=REFERENCE_NAMES)
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("tw-table", help="Tracy-Widom densities and CDFs as CSV")
    t.add_argument("--step", type=float, default=0.01)
    t.add_argument("--s-lo", type=float, default=-8.0)
    t.add_argument("--s-hi", type=float, default=6.0)
    t.set_defaults(func=cmd_tw_table)

    g = sub.add_parser("goe-validate", help="check GOE edge statistics against TW1")
    g.add_argument("--n", type=int, default=200)
    g.add_argument("--count", type=int, default=5000)
    g.add_argument("--seed", type=int, default=7)
    g.set_defaults(func=cmd_goe_validate)

    pd = sub.add_parser("plot-data", help="(x, y, series) CSV for one figure")
    pd.add_argument("--figure", choices=harness.FIGURES, required=True)
    pd.add_argument("--in", dest="inp", default=out_default)
    pd.set_defaults(func=cmd_plot_data)
    return p


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "out", None):
        Path(args.out).mkdir(parents=True, exist_ok=True)
    try:
        return args.func(args, out)
    except (ValueError, SamplingExhaustedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
