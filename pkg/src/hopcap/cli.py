"""Command-line entry point: ``hopcap {run,verify-gen,single,plot}``."""
from __future__ import annotations

import argparse
import itertools
import logging
import sys
from pathlib import Path

from . import report
from .crosstalk import WEIGHTING_MODES
from .harness import (
    RECALL_MODES,
    TrialConfig,
    run_suite,
    simulate_trial,
    static_estimates,
    verify_generator,
)
from .network import save_weights

log = logging.getLogger("hopcap")

# Mean/std pairs of the biased and correlated efficiency grid: (b, sb, c, sc)
DISPERSION_ROWS = [
    (0.5, 0.03, 0.0, 0.0),
    (0.55, 0.05, 0.0, 0.0),
    (0.65, 0.03, 0.0, 0.0),
    (0.5, 0.0, 0.05, 0.03),
    (0.5, 0.0, 0.1, 0.05),
    (0.5, 0.0, 0.25, 0.05),
]
DESK_SIZES = [500, 1000]
EXTENDED_SIZE = 3000


def _formats(values):
    out = []
    for v in values or ["csv"]:
        for item in v.split(","):
            item = item.strip()
            if item not in ("csv", "json", "svg"):
                raise argparse.ArgumentTypeError(f"unknown format {item!r}")
            if item not in out:
                out.append(item)
    return out


def _add_trial_flags(p: argparse.ArgumentParser, multi: bool) -> None:
    nargs = "+" if multi else None
    p.add_argument("--n", type=int, nargs=nargs, default=[1000] if multi else 1000,
                   help="neuron count")
    p.add_argument("--bias-mean", type=float, nargs=nargs, default=[0.5] if multi else 0.5)
    p.add_argument("--bias-std", type=float, nargs=nargs, default=[0.0] if multi else 0.0)
    p.add_argument("--corr-mean", type=float, nargs=nargs, default=[0.0] if multi else 0.0)
    p.add_argument("--corr-std", type=float, nargs=nargs, default=[0.0] if multi else 0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weighting", choices=WEIGHTING_MODES, default="expectation",
                   help="how new crosstalk is spread over older patterns")
    p.add_argument("--only-weighting", action="store_true",
                   help="run only the selected weighting instead of all three")
    p.add_argument("--recall", choices=RECALL_MODES, default="fixed-point")
    p.add_argument("--max-patterns", type=int, default=None,
                   help="safety cap on patterns per trial (default N)")
    p.add_argument("--threshold", type=float, default=1.0, help="crosstalk flag level")
    p.add_argument("--online-stats", action="store_true",
                   help="re-estimate b and c from the patterns seen so far")
    p.add_argument("--zero-centered", action="store_true",
                   help="store (x - m)(x - m)^T / N with m = 2b - 1")
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--format", action="append", dest="formats", metavar="{csv,json,svg}",
                   help="output format; repeat or comma-separate (default csv)")


def _config(args, N, bm, bs, cm, cs, trials) -> TrialConfig:
    return TrialConfig(
        N=N, b_mean=bm, b_std=bs, c_mean=cm, c_std=cs, trials=trials, seed=args.seed,
        weighting=args.weighting, compare_modes=not args.only_weighting,
        recall=args.recall, max_patterns=args.max_patterns, threshold=args.threshold,
        online_stats=args.online_stats, zero_centered=args.zero_centered,
    )


def suite_configs(args) -> list[TrialConfig]:
    if args.preset == "iid":
        sizes = DESK_SIZES + ([EXTENDED_SIZE] if args.extended else [])
        grid = [(N, 0.5, 0.0, 0.0, 0.0) for N in sizes]
    elif args.preset == "dispersion":
        N = EXTENDED_SIZE if args.extended else 1000
        grid = [(N, *row) for row in DISPERSION_ROWS]
    else:
        sizes = list(args.n)
        if args.extended and EXTENDED_SIZE not in sizes:
            sizes.append(EXTENDED_SIZE)
        grid = itertools.product(sizes, args.bias_mean, args.bias_std,
                                 args.corr_mean, args.corr_std)
    return [_config(args, *g, args.trials) for g in grid]


def _print_table(summaries) -> None:
    rows = report.summary_rows(summaries)
    print(f"{'N':>6} {'b':>11} {'c':>11}  {'model':<14} {'accuracy %':>13} "
          f"{'efficiency 1e-5':>17} {'C0':>12}")
    for r in rows:
        acc = f"{100 * r['accuracy_mean']:.1f}±{100 * r['accuracy_std']:.1f}"
        eff = f"{1e5 * r['efficiency_mean']:.3f}±{1e5 * r['efficiency_std']:.3f}"
        c0 = f"{r['c0_mean']:.1f}±{r['c0_std']:.1f}"
        print(f"{r['N']:>6} {r['b_mean']:>5.2f}±{r['b_std']:<5.2f} {r['c_mean']:>5.2f}±{r['c_std']:<5.2f}"
              f"  {r['model']:<14} {acc:>13} {eff:>17} {c0:>12}")


def cmd_run(args) -> int:
    summaries = []
    for cfg in suite_configs(args):
        log.info("running %d trials at N=%d b=%g±%g c=%g±%g", cfg.trials, cfg.N,
                 cfg.b_mean, cfg.b_std, cfg.c_mean, cfg.c_std)
        summaries.append(run_suite(cfg, jobs=args.jobs))
    _print_table(summaries)
    for path in report.emit_results(summaries, args.out, _formats(args.formats)):
        print(f"wrote {path}")
    return 0


def cmd_verify_gen(args) -> int:
    rows = verify_generator(args.bias, args.corr, N=args.n, M=args.patterns, seed=args.seed)
    print(f"{'b':>5} {'c':>5} {'measured b':>11} {'measured c':>11}")
    for r in rows:
        flag = "  (deviation-prone)" if r["deviation_regime"] else ""
        print(f"{r['b']:>5.2f} {r['c']:>5.2f} {r['measured_b']:>11.4f} {r['measured_c']:>11.4f}{flag}")
    args.out.mkdir(parents=True, exist_ok=True)
    formats = _formats(args.formats)
    if "csv" in formats:
        print(f"wrote {report.write_generator_csv(rows, args.out / 'generator.csv')}")
    if "svg" in formats:
        print(f"wrote {report.plot_generator(rows, args.out / 'generator.svg')}")
    return 0


def cmd_single(args) -> int:
    cfg = _config(args, args.n, args.bias_mean, args.bias_std, args.corr_mean, args.corr_std, 1)
    trial = simulate_trial(cfg, args.trial_index, trace=True)
    record, rows, monitors = trial.record, trial.trace, trial.monitors
    modes = list(monitors)
    print("stored  recalled  " + "  ".join(f"maxchi[{m}]" for m in modes))
    for r in rows:
        print(f"{r['stored']:>6}  {r['recalled']:>8.3f}  "
              + "  ".join(f"{r[f'max_chi_{m}'] + 0.0:>{len(m) + 8}.4f}" for m in modes))
    print(f"b={record.b:.4f} c={record.c:.4f} measured b={record.realized_b:.4f} "
          f"c={record.realized_c:.4f}")
    print(f"true capacity C0={record.true_capacity}")
    for name, est in record.estimates.items():
        if name == "true":
            continue
        print(f"  {name:<20} estimate={est:8.2f} accuracy={100 * record.accuracy[name]:6.1f}% "
              f"efficiency={record.efficiency[name]:.3e}")
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    static_worst = min(e.capacity for e in static_estimates(cfg).values())
    formats = _formats(args.formats)
    if "csv" in formats or "svg" in formats:
        trace_path = report.write_trace_csv(rows, out / "trace.csv", cfg.threshold, static_worst)
        print(f"wrote {trace_path}")
        for mode, mon in monitors.items():
            mon.to_csv(out / f"chi_{mode}.csv")
            print(f"wrote {out / f'chi_{mode}.csv'}")
    if "svg" in formats:
        print(f"wrote {report.plot_trace(report.read_trace_csv(trace_path), out / 'trace.svg')}")
    if args.save_weights:
        save_weights(trial.network, args.save_weights)
        print(f"wrote {args.save_weights}")
    return 0


def cmd_plot(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)
    for path in args.csv:
        kind = report.detect_kind(path)
        target = args.out / (Path(path).stem + ".svg")
        if kind == "suite":
            report.plot_suite(report.read_csv(path), target)
        elif kind == "generator":
            report.plot_generator(report.read_generator_csv(path), target)
        else:
            report.plot_trace(report.read_trace_csv(path), target)
        print(f"wrote {target}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hopcap", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run seeded trial suites and write result tables")
    _add_trial_flags(p, multi=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--preset", choices=["iid", "dispersion"], default=None,
                   help="unbiased accuracy grid or biased/correlated efficiency grid")
    p.add_argument("--extended", action="store_true", help="include N=3000 suites (slow)")
    p.add_argument("--jobs", type=int, default=1, help="parallel trial processes")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify-gen", help="measure generated bias/correlation over a grid")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--patterns", type=int, default=200)
    p.add_argument("--bias", type=float, nargs="+", default=None)
    p.add_argument("--corr", type=float, nargs="+", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--format", action="append", dest="formats", metavar="{csv,svg}")
    p.set_defaults(func=cmd_verify_gen)

    p = sub.add_parser("single", help="one verbose trial with a crosstalk trace")
    _add_trial_flags(p, multi=False)
    p.add_argument("--trial-index", type=int, default=0)
    p.add_argument("--save-weights", type=Path, default=None,
                   help="dump the final weight matrix (binary, see hopcap.network)")
    p.set_defaults(func=cmd_single)

    p = sub.add_parser("plot", help="re-render figures from CSV output")
    p.add_argument("csv", nargs="+", type=Path)
    p.add_argument("--out", type=Path, default=Path("results"))
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, argparse.ArgumentTypeError) as exc:
        print(f"hopcap: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
