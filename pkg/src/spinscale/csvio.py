"""CSV schemas shared by the sweep harness, the analysis CLI, and the figure
scripts.  Floats are written with repr so reruns are byte-identical."""

import csv
import json

import numpy as np

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


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_rows(path, header, rows):
    """Write a header plus rows of mixed scalars (floats via repr)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def read_rows(path, expected_header):
    """Read a schema-checked CSV into a list of dicts (values as strings)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected_header:
            raise ValueError(f"{path}: header {header} != expected {expected_header}")
        return [dict(zip(header, row)) for row in reader]


def read_sweep_series(path):
    """Group a sweep CSV into {(model, alpha, k, Q, P, q): (J, N, ipr)} arrays.

    Arrays are sorted by J; the key fields keep their string form so float
    round-trips cannot split groups.
    """
    groups = {}
    for row in read_rows(path, SWEEP_HEADER):
        key = (row["model"], row["alpha"], row["k"], row["Q"], row["P"], row["q"])
        groups.setdefault(key, []).append(
            (int(row["J"]), int(row["N"]), float(row["ipr"])))
    out = {}
    for key, triples in groups.items():
        triples.sort()
        j, n, ipr = (np.array(col) for col in zip(*triples))
        out[key] = (j.astype(int), n.astype(int), ipr.astype(float))
    return out


def mfa_result_to_dict(meta, result):
    """JSON-ready dict of one MfaResult."""
    return {
        **meta,
        "window": [float(result.window[0]), float(result.window[1])],
        "r2_threshold": result.r2_threshold,
        "d0": None if np.isnan(result.d0) else float(result.d0),
        "verdict": result.verdict,
        "q": [float(v) for v in result.q],
        "tau_q": [float(v) for v in result.tau_q],
        "r2": [float(v) for v in result.r2],
        "d_q": [None if np.isnan(v) else float(v) for v in result.d_q],
    }


def dump_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return path
