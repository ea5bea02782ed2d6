import csv
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

SWEEP_HEADER = ["model", "alpha", "k", "Q", "P", "J", "N", "q", "ipr",
                "parity_mode", "timestamp", "code_version"]
RSTAT_HEADER = ["alpha", "k", "J", "parity", "mean_r", "n_levels"]
CLASSICAL_HEADER = ["model", "alpha", "k", "seed_Q", "seed_P", "step", "Q", "P"]
TAU_HEADER = ["model", "alpha", "k", "Q", "P", "q", "N_mid", "tau",
              "tau_smooth", "tau_cummean"]
TAUQ_HEADER = ["model", "alpha", "k", "Q", "P", "q", "tau_q", "r2", "d_q",
               "d0", "verdict"]
ENERGY_HEADER = ["model", "alpha", "k", "Q", "P", "energy"]
CRITICAL_HEADER = ["model", "alpha", "k", "Q", "P", "energy", "kind"]

JS = np.arange(50, 351, 50)
NS = 2 * JS + 1
QS = np.round(np.arange(0.5, 3.51, 0.5), 10)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return str(path)


def sweep_rows(model="QKT", alpha=0.84, k=2.5, probes=((0.2, 1.0), (0.8, 1.0)),
               qs=QS, tau_of_q=lambda q: 0.5 * (q - 1.0)):
    rows = []
    for q0, p0 in probes:
        for q in qs:
            for j, n in zip(JS, NS):
                ipr = float(n) ** (-tau_of_q(q))
                rows.append([model, alpha, k, q0, p0, j, n, q, ipr,
                             "full", "2026-01-01T00:00:00+00:00", "0.1.0"])
    return rows


def tau_rows(model="QKT", alpha=0.84, k=2.5, probes=((0.2, 1.0), (0.8, 1.0)),
             q=2.0, rng_seed=5):
    rng = np.random.default_rng(rng_seed)
    rows = []
    for q0, p0 in probes:
        taus = 0.5 + 0.05 * rng.standard_normal(len(JS) - 1)
        cum = np.cumsum(taus) / np.arange(1, len(taus) + 1)
        n_mid = np.sqrt(NS[:-1] * NS[1:])
        for i in range(len(taus)):
            rows.append([model, alpha, k, q0, p0, q, n_mid[i], taus[i],
                         taus[i], cum[i]])
    return rows


def tauq_rows(model="QKT", alpha=0.84, k=2.5, probe=(0.2, 1.0), d0=0.5):
    rows = []
    for q in QS:
        dq = "" if abs(q - 1.0) <= 0.05 else d0
        rows.append([model, alpha, k, probe[0], probe[1], q, d0 * (q - 1.0),
                     0.9999, dq, d0, "monofractal"])
    return rows


def rstat_rows(alpha=0.84, j=500):
    rows = []
    for k in np.arange(0.5, 10.1, 0.5):
        val = 0.386 + (0.53 - 0.386) / (1.0 + np.exp(-(k - 4.0)))
        for parity, n in ((1, j + 1), (-1, j)):
            rows.append([alpha, k, j, parity, round(val, 4), n])
    return rows


def classical_rows(model="QKT", alpha=0.84, k=2.5,
                   seeds=((0.2, 1.0), (0.8, 1.0)), n_pts=120):
    rows = []
    for q0, p0 in seeds:
        r = np.hypot(q0, p0)
        th = np.linspace(0, 2 * np.pi, n_pts)
        for i in range(n_pts):
            rows.append([model, alpha, k, q0, p0, i,
                         r * np.cos(th[i]), r * np.sin(th[i])])
    return rows


def energy_rows(model="LMG", alpha=0.84, k=-2.0):
    rows = []
    for q in np.linspace(-2, 2, 101):
        sx2 = q * q * (1 - q * q / 4.0)
        rows.append([model, alpha, k, q, 0.0, alpha * (q * q / 2 - 1) + k / 2 * sx2])
    return rows


def critical_rows(model="LMG", alpha=0.84, k=-2.0):
    return [[model, alpha, k, 0.0, 0.0, -0.84, "saddle"],
            [model, alpha, k, 1.077, 0.0, -1.1764, "minimum"],
            [model, alpha, k, -1.077, 0.0, -1.1764, "minimum"]]


@pytest.fixture
def csv_factory(tmp_path):
    """Writes synthetic CSVs of every schema into tmp_path on demand."""

    def make(role, name=None, **kw):
        name = name or f"{role}.csv"
        table = {
            "sweep": (SWEEP_HEADER, sweep_rows),
            "tau": (TAU_HEADER, tau_rows),
            "tauq": (TAUQ_HEADER, tauq_rows),
            "rstat": (RSTAT_HEADER, rstat_rows),
            "classical": (CLASSICAL_HEADER, classical_rows),
            "energy": (ENERGY_HEADER, energy_rows),
            "critical": (CRITICAL_HEADER, critical_rows),
        }[role]
        return write_csv(tmp_path / name, table[0], table[1](**kw))

    return make
