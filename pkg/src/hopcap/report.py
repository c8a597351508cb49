"""Result files: suite tables (CSV/JSON), generator checks and figures.

Suite CSV schema, one row per (config, model), rows sorted by
``(N, b_mean, b_std, c_mean, c_std)`` and then by model::

    N, b_mean, b_std, c_mean, c_std, model, trials,
    accuracy_mean, accuracy_std, efficiency_mean, efficiency_std, c0_mean, c0_std

``model`` is ``true`` (the empirical capacity, i.e. maximum efficiency),
``dynamic`` (the configured weighting), ``dynamic-<mode>`` for the other
weightings, or one of the static baselines ``mceliece``, ``lowe-bias``,
``lowe-corr``.  Standard deviations are sample standard deviations over
trials (0 for a single trial).  Floats are written with ``repr``.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import plotting
from .harness import SuiteSummary

__all__ = [
    "CSV_COLUMNS",
    "GENERATOR_COLUMNS",
    "summary_rows",
    "write_csv",
    "read_csv",
    "write_json",
    "read_json",
    "emit_results",
    "plot_suite",
    "write_generator_csv",
    "read_generator_csv",
    "plot_generator",
    "write_trace_csv",
    "read_trace_csv",
    "plot_trace",
    "detect_kind",
]

CSV_COLUMNS = [
    "N", "b_mean", "b_std", "c_mean", "c_std", "model", "trials",
    "accuracy_mean", "accuracy_std", "efficiency_mean", "efficiency_std",
    "c0_mean", "c0_std",
]
GENERATOR_COLUMNS = ["N", "M", "b", "c", "measured_b", "measured_c", "deviation_regime"]
_INT_COLUMNS = {"N", "M", "trials", "stored"}
_BOOL_COLUMNS = {"deviation_regime"}
_STR_COLUMNS = {"model"}
_MODEL_ORDER = ["true", "dynamic", "dynamic-expectation", "dynamic-raw", "dynamic-exact",
                "mceliece", "lowe-bias", "lowe-corr"]


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _parse(key: str, v: str):
    if key in _INT_COLUMNS:
        return int(v)
    if key in _BOOL_COLUMNS:
        return v == "true"
    if key in _STR_COLUMNS:
        return v
    try:
        return float(v)
    except ValueError:
        return v


def _model_key(model: str):
    return (_MODEL_ORDER.index(model) if model in _MODEL_ORDER else len(_MODEL_ORDER), model)


def _require(summaries) -> list[SuiteSummary]:
    if isinstance(summaries, SuiteSummary):
        summaries = [summaries]
    summaries = list(summaries)
    if not summaries:
        raise ValueError("no suite results to emit")
    return sorted(summaries, key=lambda s: s.config.key)


def summary_rows(summaries) -> list[dict]:
    rows = []
    for s in _require(summaries):
        cfg = s.config
        c0_mean, c0_std = s.c0_stats()
        for model in sorted(s.models, key=_model_key):
            st = s.model_stats(model)
            rows.append({
                "N": cfg.N, "b_mean": cfg.b_mean, "b_std": cfg.b_std,
                "c_mean": cfg.c_mean, "c_std": cfg.c_std, "model": model,
                "trials": len(s.records),
                "accuracy_mean": st.accuracy_mean, "accuracy_std": st.accuracy_std,
                "efficiency_mean": st.efficiency_mean, "efficiency_std": st.efficiency_std,
                "c0_mean": c0_mean, "c0_std": c0_std,
            })
    return rows


def _write_rows(rows, columns, path) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([_fmt(row[c]) for c in columns])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _read_rows(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return [{k: _parse(k, v) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_csv(summaries, path) -> Path:
    return _write_rows(summary_rows(summaries), CSV_COLUMNS, path)


def read_csv(path) -> list[dict]:
    return _read_rows(path)


def write_json(summaries, path) -> Path:
    path = Path(path)
    data = [s.to_dict() for s in _require(summaries)]
    try:
        path.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def read_json(path) -> list[SuiteSummary]:
    return [SuiteSummary.from_dict(d) for d in json.loads(Path(path).read_text())]


def _config_label(row) -> str:
    return (f"N={row['N']}\nb={row['b_mean']:g}±{row['b_std']:g}\n"
            f"c={row['c_mean']:g}±{row['c_std']:g}")


def plot_suite(rows, path) -> Path:
    """Grouped efficiency bars per configuration with accuracy underneath."""
    if not rows:
        raise ValueError("no rows to plot")
    configs = []
    for r in rows:
        key = (r["N"], r["b_mean"], r["b_std"], r["c_mean"], r["c_std"])
        if key not in configs:
            configs.append(key)
    models = sorted({r["model"] for r in rows}, key=_model_key)
    fig, (ax_eff, ax_acc) = plotting.new_figure(2, 1, scale=1.2, ratio=0.9)
    width = 0.8 / len(models)
    xs = np.arange(len(configs))
    labels = []
    for key in configs:
        labels.append(_config_label(dict(zip(("N", "b_mean", "b_std", "c_mean", "c_std"), key))))
    for i, model in enumerate(models):
        sel = {(r["N"], r["b_mean"], r["b_std"], r["c_mean"], r["c_std"]): r
               for r in rows if r["model"] == model}
        eff = [sel[k]["efficiency_mean"] * 1e5 if k in sel else np.nan for k in configs]
        eff_sd = [sel[k]["efficiency_std"] * 1e5 if k in sel else 0 for k in configs]
        acc = [sel[k]["accuracy_mean"] * 100 if k in sel else np.nan for k in configs]
        acc_sd = [sel[k]["accuracy_std"] * 100 if k in sel else 0 for k in configs]
        color = plotting.COLORS.get(model, None)
        pos = xs - 0.4 + width * (i + 0.5)
        ax_eff.bar(pos, eff, width, yerr=eff_sd, color=color, label=model, capsize=2)
        ax_acc.bar(pos, acc, width, yerr=acc_sd, color=color, capsize=2)
    ax_eff.set_ylabel(r"efficiency $\hat C/N^2$ ($\times10^{-5}$)")
    ax_acc.set_ylabel(r"accuracy $\hat C/C_0$ (%)")
    ax_acc.axhline(100, color="0.5", lw=0.8, ls="--")
    for ax in (ax_eff, ax_acc):
        ax.set_xticks(xs)
        ax.set_xticklabels(labels)
    ax_eff.legend(ncol=4, frameon=False, loc="lower center", bbox_to_anchor=(0.5, 1.0))
    plotting.save(fig, path)
    return Path(path)


def emit_results(summaries, out_dir, formats=("csv",), stem: str = "suite") -> list[Path]:
    summaries = _require(summaries)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = []
    for fmt in formats:
        if fmt == "csv":
            written.append(write_csv(summaries, out / f"{stem}.csv"))
        elif fmt == "json":
            written.append(write_json(summaries, out / f"{stem}.json"))
        elif fmt == "svg":
            written.append(plot_suite(summary_rows(summaries), out / f"{stem}.svg"))
        else:
            raise ValueError(f"unknown output format {fmt!r}")
    return written


def write_generator_csv(rows, path) -> Path:
    if not rows:
        raise ValueError("no generator rows to write")
    return _write_rows(rows, GENERATOR_COLUMNS, path)


def read_generator_csv(path) -> list[dict]:
    return _read_rows(path)


def plot_generator(rows, path) -> Path:
    """Measured against nominal bias (one line per c) and correlation (one line per b)."""
    fig, (ax_b, ax_c) = plotting.new_figure(1, 2, scale=1.2, ratio=0.42)
    bs = sorted({r["b"] for r in rows})
    cs = sorted({r["c"] for r in rows})
    cmap = plotting.plt.get_cmap("viridis")
    for i, c in enumerate(cs):
        pts = sorted((r["b"], r["measured_b"]) for r in rows if r["c"] == c)
        ax_b.plot(*zip(*pts), marker="o", ms=3, color=cmap(i / max(len(cs) - 1, 1)), label=f"c={c:g}")
    for i, b in enumerate(bs):
        pts = sorted((r["c"], r["measured_c"]) for r in rows if r["b"] == b)
        ax_c.plot(*zip(*pts), marker="o", ms=3, color=cmap(i / max(len(bs) - 1, 1)), label=f"b={b:g}")
    for ax, grid in ((ax_b, bs), (ax_c, cs)):
        ax.plot([min(grid), max(grid)], [min(grid), max(grid)], color="0.6", ls="--", lw=0.8)
        ax.legend(frameon=False)
    ax_b.set_xlabel("nominal bias b")
    ax_b.set_ylabel("measured bias")
    ax_c.set_xlabel("nominal correlation c")
    ax_c.set_ylabel("measured correlation")
    plotting.save(fig, path)
    return Path(path)


def write_trace_csv(rows, path, threshold: float, static_worst: float) -> Path:
    if not rows:
        raise ValueError("empty trace")
    columns = ["stored", "recalled"] + [k for k in rows[0] if k.startswith("max_chi_")]
    full = [dict(r, threshold=threshold, static_worst=static_worst) for r in rows]
    return _write_rows(full, columns + ["threshold", "static_worst"], path)


def read_trace_csv(path) -> list[dict]:
    return _read_rows(path)


def plot_trace(rows, path) -> Path:
    """Crosstalk against patterns stored, marking the flag, static and true capacities."""
    if not rows:
        raise ValueError("empty trace")
    threshold = rows[0]["threshold"]
    static = rows[0]["static_worst"]
    stored = np.array([r["stored"] for r in rows])
    recalled = np.array([r["recalled"] for r in rows])
    fig, ax = plotting.new_figure(scale=1.1)
    for key in (k for k in rows[0] if k.startswith("max_chi_")):
        mode = key[len("max_chi_"):]
        vals = np.array([r[key] for r in rows])
        color = plotting.COLORS.get(f"dynamic-{mode}")
        (line,) = ax.plot(stored, vals, color=color, label=f"max χ ({mode})")
        over = np.nonzero(vals >= threshold)[0]
        if over.size:
            chat = stored[over[0]] - 1
            ax.axvline(chat, color=line.get_color(), ls=":", lw=1.6, label=f"flag ({mode}) at {chat}")
    ax.axhline(threshold, color="0.4", lw=0.8, ls="--", label="flag threshold")
    lost = np.nonzero(recalled < 1.0)[0]
    if lost.size:
        c0 = stored[lost[0]] - 1
        ax.axvspan(0, c0, color="0.85", zorder=0, label=f"true capacity C0={c0}")
    ax.axvline(static, color=plotting.COLORS["lowe-bias"], lw=1.2,
               label=f"static worst case ({static:.1f})")
    ax.set_xlabel("patterns stored")
    ax.set_ylabel("max destructive crosstalk")
    ax.set_xlim(0, stored[-1])
    ax.legend(frameon=False, loc="upper left")
    plotting.save(fig, path)
    return Path(path)


def detect_kind(path) -> str:
    with Path(path).open(newline="") as fh:
        header = next(csv.reader(fh), [])
    if "model" in header:
        return "suite"
    if "measured_b" in header:
        return "generator"
    if "stored" in header:
        return "trace"
    raise ValueError(f"{path}: unrecognised CSV layout")
