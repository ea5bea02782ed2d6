#!/usr/bin/env python3
"""Render publication-style figures from the spinscale CSV outputs.

One recipe per figure id.  Inputs are the CSV files written by the
`spinscale fig <id>` presets; files are recognized by their header, so the
order of --in paths does not matter.

Usage:
    render_fig.py --fig fig7 --in fig7_ipr_k*.csv fig7_sections.csv --out fig7.png
"""

import argparse
import csv
import sys
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


class SchemaError(ValueError):
    """Input CSV does not carry a known header."""


class EmptySelection(ValueError):
    """A recipe selected no rows to draw."""


SCHEMAS = {
    ("model", "alpha", "k", "Q", "P", "J", "N", "q", "ipr", "parity_mode",
     "timestamp", "code_version"): "sweep",
    ("alpha", "k", "J", "parity", "mean_r", "n_levels"): "rstat",
    ("model", "alpha", "k", "seed_Q", "seed_P", "step", "Q", "P"): "classical",
    ("model", "alpha", "k", "Q", "P", "q", "N_mid", "tau", "tau_smooth",
     "tau_cummean"): "tau",
    ("model", "alpha", "k", "Q", "P", "q", "tau_q", "r2", "d_q", "d0",
     "verdict"): "tauq",
    ("model", "alpha", "k", "Q", "P", "energy"): "energy",
    ("model", "alpha", "k", "Q", "P", "energy", "kind"): "critical",
}

# reference ordinates drawn as dashed guides
R_POISSON = 0.386
R_COE = 0.53
TAU_REGULAR = 0.5
TAU_CHAOTIC = 1.0


def load_table(path):
    """Parse one CSV into (role, list of row dicts with floats where possible)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        role = SCHEMAS.get(header)
        if role is None:
            raise SchemaError(f"{path}: header {list(header)} matches no known "
                              f"schema; expected one of {sorted(set(SCHEMAS.values()))}")
        rows = []
        for raw in reader:
            row = {}
            for key, val in zip(header, raw):
                try:
                    row[key] = float(val)
                except ValueError:
                    row[key] = val
            rows.append(row)
    if not rows:
        raise EmptySelection(f"{path}: no data rows")
    return role, rows


def classify(paths):
    tables = defaultdict(list)
    for path in paths:
        role, rows = load_table(path)
        tables[role].append(rows)
    return tables


def need(tables, role, fig_id):
    if role not in tables:
        raise SchemaError(f"{fig_id} needs a {role} CSV; none of the inputs has "
                          "that header")
    return tables[role]


def group(rows, keys):
    out = defaultdict(list)
    for row in rows:
        out[tuple(row[k] for k in keys)].append(row)
    return dict(sorted(out.items()))


def probe_colors(n):
    return plt.cm.viridis(np.linspace(0.0, 0.92, max(n, 2)))


def col(rows, key):
    return np.array([r[key] for r in rows])


def _sorted_by(rows, key):
    return sorted(rows, key=lambda r: r[key])


def _ipr_panel(ax, sweep_rows, q_value=2.0, title=""):
    by_probe = group([r for r in sweep_rows if r["q"] == q_value], ("Q", "P"))
    if not by_probe:
        raise EmptySelection(f"no rows at q={q_value}")
    colors = probe_colors(len(by_probe))
    for color, (probe, rows) in zip(colors, by_probe.items()):
        rows = _sorted_by(rows, "N")
        ax.plot(col(rows, "N"), col(rows, "ipr"), "o-", ms=2.5, lw=0.9,
                color=color)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("IPR")
    if title:
        ax.set_title(title, fontsize=9)


def _tau_panel(ax, tau_rows, refs=(TAU_REGULAR,), smooth=False, q_value=2.0):
    by_probe = group([r for r in tau_rows if r["q"] == q_value], ("Q", "P"))
    if not by_probe:
        raise EmptySelection(f"no tau rows at q={q_value}")
    colors = probe_colors(len(by_probe))
    for color, (probe, rows) in zip(colors, by_probe.items()):
        rows = _sorted_by(rows, "N_mid")
        x = np.log(col(rows, "N_mid"))
        ax.plot(x, col(rows, "tau"), "-", lw=0.8,
                color=color, alpha=0.45 if smooth else 1.0)
        if smooth:
            sm = [(xi, r["tau_smooth"]) for xi, r in zip(x, rows)
                  if r["tau_smooth"] != ""]
            if sm:
                ax.plot(*zip(*sm), "-", lw=1.6, color=color)
    for ref in refs:
        ax.axhline(ref, ls="--",
                   color="orange" if ref == TAU_REGULAR else "goldenrod")
    ax.axhline(0.0, ls="--", color="gray", lw=0.8)
    ax.set_xlabel("ln N")
    ax.set_ylabel("tau")


def _tauq_panel(ax, tauq_rows):
    rows = _sorted_by(tauq_rows, "q")
    q = col(rows, "q")
    ax.plot(q, col(rows, "tau_q"), "o", ms=3.5, color="saddlebrown",
            label="fitted")
    qline = np.linspace(q.min(), q.max(), 50)
    ax.plot(qline, TAU_REGULAR * (qline - 1), "--", color="orange",
            label="monofractal 1/2")
    ax.plot(qline, TAU_CHAOTIC * (qline - 1), "--", color="goldenrod",
            label="dimension 1")
    ax.axhline(0.0, ls="--", color="black", lw=0.8, label="no scaling")
    ax.set_xlabel("q")
    ax.set_ylabel("tau_q")
    ax.legend(fontsize=6)


def fig2(tables, fig_id):
    classical = need(tables, "classical", fig_id)[0]
    sweep = need(tables, "sweep", fig_id)[0]
    tau = need(tables, "tau", fig_id)[0]
    fig, axes = plt.subplots(3, 1, figsize=(5.2, 10.0))
    by_seed = group(classical, ("seed_Q", "seed_P"))
    colors = probe_colors(len(by_seed))
    for color, (seed, rows) in zip(colors, by_seed.items()):
        rows = _sorted_by(rows, "step")
        axes[0].plot(col(rows, "Q"), col(rows, "P"), ".", ms=1.0, color=color)
    axes[0].set_xlabel("Q")
    axes[0].set_ylabel("P")
    axes[0].set_aspect("equal")
    _ipr_panel(axes[1], sweep)
    _tau_panel(axes[2], tau)
    return fig


def fig3(tables, fig_id):
    sweep = need(tables, "sweep", fig_id)[0]
    tauq = need(tables, "tauq", fig_id)[0]
    by_probe = group(sweep, ("Q", "P"))
    if len(by_probe) < 2:
        raise EmptySelection(f"{fig_id} wants two probes, got {len(by_probe)}")
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.4))
    for ax, (probe, rows) in zip(axes[:2], by_probe.items()):
        for q_value, qrows in group(rows, ("q",)).items():
            qrows = _sorted_by(qrows, "N")
            ax.plot(col(qrows, "N"), col(qrows, "ipr"), "-", lw=0.7)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("N")
        ax.set_ylabel("IPR_q")
        ax.set_title(f"(Q,P)=({probe[0]:g},{probe[1]:g})", fontsize=8)
    last_probe = sorted(group(tauq, ("Q", "P")))[-1]
    _tauq_panel(axes[2], group(tauq, ("Q", "P"))[last_probe])
    fig.tight_layout()
    return fig


def fig4(tables, fig_id):
    energy = need(tables, "energy", fig_id)[0]
    sweep = need(tables, "sweep", fig_id)[0]
    critical = tables.get("critical", [[]])[0]
    fig, axes = plt.subplots(1, 2, figsize=(9.6, 3.6))
    cut = _sorted_by(energy, "Q")
    axes[0].plot(col(cut, "Q"), col(cut, "energy"), "-", color="black", lw=1.0)
    marks = {"saddle": ("x", "gold"), "minimum": ("+", "green"),
             "maximum": ("*", "red")}
    for row in critical:
        mk, color = marks.get(row["kind"], ("o", "cyan"))
        axes[0].plot([row["Q"]], [row["energy"]], mk, color=color, ms=9, mew=2)
    probes = sorted(group(sweep, ("Q", "P")))
    colors = probe_colors(len(probes))
    for (q0, _), color in zip(probes, colors):
        e = np.interp(q0, col(cut, "Q"), col(cut, "energy"))
        axes[0].plot([q0], [e], ".", color=color, ms=4)
    axes[0].set_xlabel("Q")
    axes[0].set_ylabel("H(Q, 0)")
    _ipr_panel(axes[1], sweep)
    fig.tight_layout()
    return fig


def fig5(tables, fig_id):
    sweep = need(tables, "sweep", fig_id)[0]
    tau = need(tables, "tau", fig_id)[0]
    windows = ((1.03, 1.15), (1.47, 1.59), (-0.06, 0.06))
    fig, axes = plt.subplots(3, 2, figsize=(9.0, 10.0))
    for i, (lo, hi) in enumerate(windows):
        in_window = lambda r: lo <= r["Q"] <= hi
        _ipr_panel(axes[i, 0], [r for r in sweep if in_window(r)])
        _tau_panel(axes[i, 1], [r for r in tau if in_window(r)])
    fig.tight_layout()
    return fig


def fig6(tables, fig_id):
    rstat = need(tables, "rstat", fig_id)[0]
    fig, ax = plt.subplots(figsize=(5.6, 3.4))
    for parity, rows in group(rstat, ("parity",)).items():
        rows = _sorted_by(rows, "k")
        ax.plot(col(rows, "k"), col(rows, "mean_r"), "o-", ms=3,
                label=f"parity {int(parity[0]):+d}")
    ax.axhline(R_POISSON, ls="--", color="orange", label=f"Poisson {R_POISSON}")
    ax.axhline(R_COE, ls="--", color="goldenrod", label=f"COE {R_COE}")
    ax.set_xlabel("k")
    ax.set_ylabel("<r>")
    ax.legend(fontsize=7)
    fig.tight_layout()
    return fig


def fig7(tables, fig_id):
    sweeps = need(tables, "sweep", fig_id)
    sections = need(tables, "classical", fig_id)[0]
    by_k = {}
    for rows in sweeps:
        for kval, krows in group(rows, ("k",)).items():
            by_k.setdefault(kval[0], []).extend(krows)
    ks = sorted(by_k)
    sec_by_k = {key[0]: rows for key, rows in group(sections, ("k",)).items()}
    fig, axes = plt.subplots(2, len(ks), figsize=(3.2 * len(ks), 6.4))
    axes = np.asarray(axes).reshape(2, len(ks))
    for i, kval in enumerate(ks):
        _ipr_panel(axes[0, i], by_k[kval], title=f"k={kval:g}")
        sec = sec_by_k.get(kval, [])
        if sec:
            by_seed = group(sec, ("seed_Q", "seed_P"))
            colors = probe_colors(len(by_seed))
            for color, (_, rows) in zip(colors, by_seed.items()):
                axes[1, i].plot(col(rows, "Q"), col(rows, "P"), ".", ms=0.5,
                                color=color)
        axes[1, i].set_xlabel("Q")
        axes[1, i].set_ylabel("P")
        axes[1, i].set_aspect("equal")
    fig.tight_layout()
    return fig


def fig10(tables, fig_id):
    sweep = need(tables, "sweep", fig_id)[0]
    tauq = need(tables, "tauq", fig_id)[0]
    fig, axes = plt.subplots(1, 2, figsize=(8.4, 3.4))
    for _, qrows in group(sweep, ("q",)).items():
        qrows = _sorted_by(qrows, "N")
        axes[0].plot(col(qrows, "N"), col(qrows, "ipr"), "-", lw=0.7)
    axes[0].set_xscale("log")
    axes[0].set_yscale("log")
    axes[0].set_xlabel("N")
    axes[0].set_ylabel("IPR_q")
    _tauq_panel(axes[1], tauq)
    fig.tight_layout()
    return fig


def fig11(tables, fig_id):
    sweep = need(tables, "sweep", fig_id)[0]
    tau = need(tables, "tau", fig_id)[0]
    tauq = need(tables, "tauq", fig_id)[0]
    fig, axes = plt.subplots(1, 3, figsize=(11.5, 3.4))
    _tau_panel(axes[0], tau, refs=(TAU_CHAOTIC,), smooth=True)
    for _, qrows in group(sweep, ("q",)).items():
        qrows = _sorted_by(qrows, "N")
        axes[1].plot(col(qrows, "N"), col(qrows, "ipr"), "-", lw=0.7)
    axes[1].set_xscale("log")
    axes[1].set_yscale("log")
    axes[1].set_xlabel("N")
    axes[1].set_ylabel("IPR_q")
    _tauq_panel(axes[2], tauq)
    fig.tight_layout()
    return fig


def appA(tables, fig_id):
    tau = need(tables, "tau", fig_id)[0]
    fig, ax = plt.subplots(figsize=(5.6, 3.6))
    _tau_panel(ax, tau)
    fig.tight_layout()
    return fig


def appB(tables, fig_id):
    tau = need(tables, "tau", fig_id)[0]
    windows = ((0.2, 0.4), (0.42, 0.52), (0.54, 0.8))
    fig, axes = plt.subplots(3, 1, figsize=(5.4, 9.6))
    for ax, (lo, hi) in zip(axes, windows):
        rows = [r for r in tau if lo - 1e-9 <= r["Q"] <= hi + 1e-9]
        _tau_panel(ax, rows)
    fig.tight_layout()
    return fig


def appC(tables, fig_id):
    sweep = need(tables, "sweep", fig_id)[0]
    tau = need(tables, "tau", fig_id)[0]
    probes = sorted(group(tau, ("Q", "P")))
    fig = plt.figure(figsize=(10.5, 6.8))
    ax_ipr = fig.add_subplot(2, 2, 1)
    _ipr_panel(ax_ipr, sweep)
    ax_tau = fig.add_subplot(2, 2, 2)
    _tau_panel(ax_tau, tau, refs=(TAU_CHAOTIC, TAU_REGULAR))
    n_p = len(probes)
    colors = probe_colors(n_p)
    for i, (probe, color) in enumerate(zip(probes, colors)):
        ax = fig.add_subplot(2, n_p, n_p + i + 1)
        rows = _sorted_by(group(tau, ("Q", "P"))[probe], "N_mid")
        ax.plot(np.log(col(rows, "N_mid")), col(rows, "tau_cummean"), "-",
                color=color, lw=1.2)
        ax.axhline(TAU_CHAOTIC, ls="--", color="goldenrod", lw=0.8)
        ax.axhline(TAU_REGULAR, ls="--", color="orange", lw=0.8)
        ax.set_xlabel("ln N")
        if i == 0:
            ax.set_ylabel("cum. mean tau")
    fig.tight_layout()
    return fig


RECIPES = {
    "fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5, "fig6": fig6,
    "fig7": fig7, "fig10": fig10, "fig11": fig11,
    "appA": appA, "appB": appB, "appC": appC,
}


def render(fig_id, in_paths, out_path):
    """Render one figure id from its input CSVs; returns the Figure."""
    key = fig_id if fig_id in RECIPES else f"fig{fig_id}"
    if key not in RECIPES:
        raise ValueError(f"unknown figure id {fig_id!r}; choose from {sorted(RECIPES)}")
    tables = classify(in_paths)
    fig = RECIPES[key](tables, key)
    fig.savefig(out_path, dpi=160)
    return fig


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fig", required=True, help="figure id (fig2..fig11, appA..appC)")
    ap.add_argument("--in", dest="inputs", nargs="+", required=True,
                    help="input CSV paths (order-independent)")
    ap.add_argument("--out", required=True, help="output image path")
    args = ap.parse_args(argv)
    try:
        fig = render(args.fig, args.inputs, args.out)
        plt.close(fig)
    except (SchemaError, EmptySelection, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
