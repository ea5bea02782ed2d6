"""Figure-data presets: one recipe per named figure, desk-scale J caps.

Each preset writes the CSV inputs its figure needs into an output directory
and returns the written paths.  Desk caps keep every preset to minutes of
dense solves; full_scale restores the original grids (and lifts the flop
budget), which for the largest runs means hours.
"""

import logging
import os
from dataclasses import dataclass

import numpy as np

from . import csvio
from .classical import (chart_to_sphere, classical_energy,
                        default_critical_seeds, find_critical_points,
                        poincare_section, trajectory)
from .pipelines import write_tau_csv, write_tauq_csv
from .spectra import ModelParams
from .sweep import DEFAULT_BUDGET_FLOPS, SweepSpec, run_rstat, run_sweep

log = logging.getLogger(__name__)

Q_GRID_FULL = [round(q, 10) for q in np.arange(0.1, 4.0 + 1e-9, 0.1)]

#: the 31 kicked-top probes: P=1, Q from 0.2 to 0.8 in steps of 0.02
QKT_PROBES = [(round(q, 10), 1.0) for q in np.arange(0.2, 0.8 + 1e-9, 0.02)]

QKT_KS = (0.5, 1.3, 2.5, 30.0)


@dataclass
class PresetContext:
    out_dir: str = "."
    jmax: int | None = None
    full_scale: bool = False
    cache_dir: str | None = None
    workers: int = 1

    def path(self, name: str) -> str:
        os.makedirs(self.out_dir, exist_ok=True)
        return os.path.join(self.out_dir, name)

    def jgrid(self, start: int, desk_stop: int, full_stop: int, step: int):
        stop = full_stop if self.full_scale else desk_stop
        if self.jmax is not None:
            stop = min(stop, self.jmax)
        return list(range(start, stop + 1, step))

    def budget(self) -> float:
        return float("inf") if self.full_scale else DEFAULT_BUDGET_FLOPS

    def sweep(self, model, alpha, k, j_grid, probes, q_grid, out_name):
        spec = SweepSpec(model=model, alpha=alpha, k=k, j_grid=j_grid,
                         probes=probes, q_grid=q_grid,
                         out_path=self.path(out_name),
                         cache_dir=self.cache_dir, workers=self.workers,
                         budget_flops=self.budget())
        summary = run_sweep(spec)
        if summary.failures:
            log.warning("%s: %d J values failed", out_name, len(summary.failures))
        return summary.out_path


def _ho_line_probes():
    return [(round(0.02 * i, 10), 0.0) for i in range(8)]


def fig2(ctx: PresetContext):
    """HO probe line: classical orbits, IPR(N) at q=2, finite tau."""
    alpha = 0.84
    jg = ctx.jgrid(500, 3000, 15000, 500)
    ipr_csv = ctx.sweep("HO", alpha, 0.0, jg, _ho_line_probes(), [2.0], "fig2_ipr.csv")
    tau_csv = write_tau_csv(ipr_csv, ctx.path("fig2_tau.csv"))
    params = ModelParams("HO", 1, alpha, 0.0)
    rows = []
    t_end = 2.0 * np.pi / alpha
    for q0, p0 in _ho_line_probes():
        _, pts = trajectory(params, (q0, p0), t_end=t_end, dt=1e-3)
        for step in range(0, len(pts), 10):
            rows.append(("HO", alpha, 0.0, q0, p0, step, pts[step, 0], pts[step, 1]))
    cl_csv = csvio.write_rows(ctx.path("fig2_classical.csv"),
                              csvio.CLASSICAL_HEADER, rows)
    return [cl_csv, ipr_csv, tau_csv]


def fig3(ctx: PresetContext):
    """HO IPR_q curves for the slow (0.02, 0) and generic (0.14, 0) probes."""
    jg = ctx.jgrid(500, 3000, 15000, 500)
    ipr_csv = ctx.sweep("HO", 0.84, 0.0, jg, [(0.02, 0.0), (0.14, 0.0)],
                        Q_GRID_FULL, "fig3_ipr.csv")
    tauq_csv = write_tauq_csv(ipr_csv, ctx.path("fig3_tauq.csv"))
    return [ipr_csv, tauq_csv]


def fig4(ctx: PresetContext):
    """LMG probe line across the double well, plus the energy cut at P=0."""
    alpha, k = 0.84, -2.0
    probes = [(round(q, 12), 0.0) for q in np.linspace(-0.5, 1.99, 250)]
    jg = ctx.jgrid(100, 1000, 5500, 100)
    ipr_csv = ctx.sweep("LMG", alpha, k, jg, probes, [2.0], "fig4_ipr.csv")
    params = ModelParams("LMG", 1, alpha, k)
    cut = [("LMG", alpha, k, q, 0.0, classical_energy(params, q, 0.0))
           for q in np.linspace(-2.0, 2.0, 801)]
    cut_csv = csvio.write_rows(ctx.path("fig4_energy.csv"), csvio.ENERGY_HEADER, cut)
    crit = find_critical_points(params, default_critical_seeds())
    crit_csv = csvio.write_rows(
        ctx.path("fig4_critical.csv"), csvio.CRITICAL_HEADER,
        [("LMG", alpha, k, c.q, c.p, c.energy, c.kind) for c in crit])
    return [ipr_csv, cut_csv, crit_csv]


def fig5(ctx: PresetContext):
    """LMG probe windows around the minimum, the separatrix edge, the saddle."""
    alpha, k = 0.84, -2.0
    probes = [(round(q, 10), 0.0) for q in np.arange(1.04, 1.14 + 1e-9, 0.01)]
    probes += [(round(q, 10), 0.0) for q in np.arange(1.48, 1.58 + 1e-9, 0.01)]
    probes += [(round(q, 10), 0.0) for q in np.arange(-0.05, 0.05 + 1e-9, 0.01)
               if abs(q) > 1e-12]
    jg = ctx.jgrid(100, 1000, 10000, 100)
    ipr_csv = ctx.sweep("LMG", alpha, k, jg, probes, [2.0], "fig5_ipr.csv")
    tau_csv = write_tau_csv(ipr_csv, ctx.path("fig5_tau.csv"))
    return [ipr_csv, tau_csv]


def fig6(ctx: PresetContext):
    """Mean spacing ratio against kick strength, both parity sectors."""
    j = ctx.jmax or (2000 if ctx.full_scale else 500)
    rows = []
    for k in np.arange(0.5, 10.0 + 1e-9, 0.5):
        rows.extend(run_rstat(0.84, round(float(k), 10), j,
                              cache_dir=ctx.cache_dir))
        log.info("rstat k=%.2f done", k)
    out = csvio.write_rows(ctx.path("fig6_rstat.csv"), csvio.RSTAT_HEADER, rows)
    return [out]


def fig7(ctx: PresetContext):
    """Kicked-top IPR scaling at four kick strengths, with Poincare sections."""
    jg = ctx.jgrid(50, 1000, 5000, 50)
    paths = []
    for k in QKT_KS:
        paths.append(ctx.sweep("QKT", 0.84, k, jg, QKT_PROBES, [2.0],
                               f"fig7_ipr_k{k:g}.csv"))
    sec_rows = []
    for k in QKT_KS:
        params = ModelParams("QKT", 1, 0.84, k)
        seeds = [chart_to_sphere(q, p) for q, p in QKT_PROBES]
        for (q0, p0), cloud in zip(QKT_PROBES, poincare_section(params, seeds, 300)):
            for qq, pp in cloud:
                sec_rows.append(("QKT", 0.84, k, q0, p0, 0, qq, pp))
    paths.append(csvio.write_rows(ctx.path("fig7_sections.csv"),
                                  csvio.CLASSICAL_HEADER, sec_rows))
    return paths


def fig10(ctx: PresetContext):
    """IPR_q curves and mass exponents of a regular-region kicked-top probe."""
    jg = ctx.jgrid(50, 1000, 5000, 50)
    ipr_csv = ctx.sweep("QKT", 0.84, 0.5, jg, [(0.2, 1.0)], Q_GRID_FULL,
                        "fig10_ipr.csv")
    tauq_csv = write_tauq_csv(ipr_csv, ctx.path("fig10_tauq.csv"))
    return [ipr_csv, tauq_csv]


def fig11(ctx: PresetContext):
    """IPR_q curves, finite tau, and mass exponents deep in the chaotic sea."""
    jg = ctx.jgrid(50, 500, 5000, 50)
    ipr_csv = ctx.sweep("QKT", 0.84, 30.0, jg, [(0.2, 1.0)], Q_GRID_FULL,
                        "fig11_ipr.csv")
    tau_csv = write_tau_csv(ipr_csv, ctx.path("fig11_tau.csv"), q=2.0)
    tauq_csv = write_tauq_csv(ipr_csv, ctx.path("fig11_tauq.csv"))
    return [ipr_csv, tau_csv, tauq_csv]


def _app_tau(ctx, name, k, probes, full_stop):
    jg = ctx.jgrid(50, 1000, full_stop, 50)
    ipr_csv = ctx.sweep("QKT", 0.84, k, jg, probes, [2.0], f"{name}_ipr.csv")
    tau_csv = write_tau_csv(ipr_csv, ctx.path(f"{name}_tau.csv"))
    return [ipr_csv, tau_csv]


def appA(ctx: PresetContext):
    """Finite tau of all 31 probes at k=0.5."""
    return _app_tau(ctx, "appA", 0.5, QKT_PROBES, 5000)


def appB(ctx: PresetContext):
    """Finite tau of all 31 probes at k=1.3."""
    return _app_tau(ctx, "appB", 1.3, QKT_PROBES, 5000)


def appC(ctx: PresetContext):
    """Finite tau and its running mean for chaotic-sea probes at k=2.5."""
    probes = [(0.26, 1.0), (0.5, 1.0), (0.64, 1.0), (0.74, 1.0)]
    return _app_tau(ctx, "appC", 2.5, probes, 10000)


PRESETS = {
    "fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5, "fig6": fig6,
    "fig7": fig7, "fig10": fig10, "fig11": fig11,
    "appA": appA, "appB": appB, "appC": appC,
}


def run_preset(fig_id: str, ctx: PresetContext):
    """Run one preset by id ('fig6', '6', or 'appA')."""
    key = fig_id if fig_id in PRESETS else f"fig{fig_id}"
    if key not in PRESETS:
        raise ValueError(f"unknown figure preset {fig_id!r}; "
                         f"choose from {sorted(PRESETS)}")
    return PRESETS[key](ctx)
