"""Analysis passes over sweep CSVs: finite-tau tables and MFA fits."""

import logging

import numpy as np

from . import csvio
from .errors import TooFewPoints
from .scaling import mfa, tau_series

log = logging.getLogger(__name__)


def write_tau_csv(sweep_csv, out_csv, q=None, window: int = 5):
    """Finite-tau table of every (probe, q) series in a sweep CSV.

    The smoothed column holds the window-sized moving average at its
    centered alignment (blank where undefined); cummean is the running mean.
    """
    series = csvio.read_sweep_series(sweep_csv)
    rows = []
    for key in sorted(series):
        model, alpha, k, qs, ps, qv = key
        if q is not None and float(qv) != float(q):
            continue
        _, n, ipr = series[key]
        try:
            ts = tau_series(n, ipr, window=window)
        except TooFewPoints:
            log.warning("series %s has fewer than two points; skipped", key)
            continue
        off = (ts.window - 1) // 2
        for i in range(len(ts.tau)):
            sm = ts.smoothed[i - off] if 0 <= i - off < len(ts.smoothed) else ""
            rows.append((model, alpha, k, qs, ps, qv, ts.n_mid[i], ts.tau[i],
                         sm, ts.cumulative[i]))
    return csvio.write_rows(out_csv, csvio.TAU_HEADER, rows)


def mfa_by_probe(sweep_csv, q_grid=None, window=None, r2_threshold=0.995):
    """Run MFA per probe of a sweep CSV.

    Returns [(meta dict, MfaResult)], one entry per (model, alpha, k, Q, P).
    All q series of a probe must share the same N grid.
    """
    series = csvio.read_sweep_series(sweep_csv)
    probes = {}
    for (model, alpha, k, qs, ps, qv), (j, n, ipr) in series.items():
        probes.setdefault((model, alpha, k, qs, ps), {})[float(qv)] = (n, ipr)
    out = []
    for probe_key in sorted(probes):
        by_q = probes[probe_key]
        qs_all = sorted(by_q)
        if q_grid is not None:
            qs_all = [q for q in qs_all if any(abs(q - g) < 1e-9 for g in q_grid)]
        if not qs_all:
            continue
        n0 = by_q[qs_all[0]][0]
        for q in qs_all:
            if not np.array_equal(by_q[q][0], n0):
                raise ValueError(f"probe {probe_key}: q={q} has a different N grid")
        ipr_matrix = np.vstack([by_q[q][1] for q in qs_all])
        result = mfa(n0, ipr_matrix, qs_all, window=window,
                     r2_threshold=r2_threshold)
        meta = dict(zip(("model", "alpha", "k", "Q", "P"), probe_key))
        out.append((meta, result))
    return out


def write_tauq_csv(sweep_csv, out_csv, q_grid=None, window=None,
                   r2_threshold=0.995):
    """Mass-exponent table (one row per probe and q) from a sweep CSV."""
    rows = []
    for meta, res in mfa_by_probe(sweep_csv, q_grid, window, r2_threshold):
        for i, q in enumerate(res.q):
            dq = "" if np.isnan(res.d_q[i]) else res.d_q[i]
            rows.append((meta["model"], meta["alpha"], meta["k"], meta["Q"],
                         meta["P"], q, res.tau_q[i], res.r2[i], dq,
                         res.d0, res.verdict))
    return csvio.write_rows(out_csv, csvio.TAUQ_HEADER, rows)
