"""Scaling-experiment harness: J sweeps, the spectrum cache, r-stat scans.

A sweep walks a J grid, diagonalizes the model once per J (per parity
block), projects every probe coherent state, and appends one CSV record per
(probe, J, q).  Records are sorted by key before writing, so the output is
independent of worker count; rerunning against a warm cache reproduces the
numeric columns byte for byte.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__, cache, csvio
from .errors import CacheCorruption, OutOfBudget, SpinScaleError
from .scaling import r_statistic
from .spectra import (DENSE_DIM_LIMIT, ModelParams, _eig_unitary,
                      _eigh_tridiagonal, _lmg_sector_band, floquet_phases,
                      floquet_sector_matrices)
from .spin import DickeSpace, coherent_coefficients

log = logging.getLogger(__name__)

#: default ceiling on the projected cost of one sweep
DEFAULT_BUDGET_FLOPS = 2e13

#: eigenvector blocks are cached only up to this full dimension
DEFAULT_EVEC_CACHE_LIMIT = 4001

_SECTOR_NAMES = {1: "even", -1: "odd"}


@dataclass
class SweepSpec:
    """Everything needed to run one scaling sweep."""

    model: str
    alpha: float
    k: float
    j_grid: list
    probes: list          # [(Q, P), ...]
    q_grid: list
    out_path: str
    cache_dir: str | None = None
    workers: int = 1
    parity_mode: str = "full"  # full | even | odd
    budget_flops: float = DEFAULT_BUDGET_FLOPS
    evec_cache_limit: int = DEFAULT_EVEC_CACHE_LIMIT

    def __post_init__(self):
        self.j_grid = [int(j) for j in self.j_grid]
        if not self.j_grid or np.any(np.diff(self.j_grid) <= 0):
            raise ValueError("J grid must be nonempty and strictly increasing")
        for q, p in self.probes:
            if q * q + p * p >= 4.0 - 1e-9:
                raise ValueError(f"probe ({q},{p}) outside the open chart disk")
        for q in self.q_grid:
            if not 0.0 < q <= 4.0:
                raise ValueError(f"q={q} outside (0, 4]")
        if self.parity_mode not in ("full", "even", "odd"):
            raise ValueError(f"parity_mode {self.parity_mode!r}")

    def params(self, j: int) -> ModelParams:
        return ModelParams(self.model, j, self.alpha, self.k)


@dataclass(frozen=True)
class SweepSummary:
    out_path: str
    n_records: int
    n_j_done: int
    failures: list = field(default_factory=list)
    elapsed_s: float = 0.0


def estimate_flops(spec: SweepSpec) -> float:
    """Projected cost: ~c*N^3 per dense solve (none for the diagonal HO)."""
    total = 0.0
    c = 0.0 if spec.model == "HO" else (30.0 if spec.model == "QKT" else 10.0)
    for j in spec.j_grid:
        n = 2 * j + 1
        total += c * float(n) ** 3 + 8.0 * n * len(spec.probes) * len(spec.q_grid)
    return total


def check_budget(spec: SweepSpec):
    for j in spec.j_grid:
        n = 2 * j + 1
        if spec.model != "HO" and n > DENSE_DIM_LIMIT:
            raise OutOfBudget(
                f"J={j} needs a dense solve at N={n} > limit {DENSE_DIM_LIMIT}")
    flops = estimate_flops(spec)
    if flops > spec.budget_flops:
        raise OutOfBudget(
            f"projected {flops:.2e} flops exceed the budget {spec.budget_flops:.2e}; "
            "raise budget_flops to proceed")


def sector_spectra(params: ModelParams, cache_dir=None,
                   evec_cache_limit: int = DEFAULT_EVEC_CACHE_LIMIT,
                   need_vectors: bool = True):
    """Per-sector spectra, going through the on-disk cache when configured.

    Returns [(sign, dicke indices, eigenvalues, block eigenvectors|None)].
    Corrupt entries are dropped and recomputed; eigenvectors are stored only
    up to the configured dimension, larger runs recompute them on demand.
    """
    qkt_blocks = None  # both Floquet sector matrices, built once on first miss
    out = []
    for sign in (1, -1):
        sector = _SECTOR_NAMES[sign]
        key = (params.model, params.alpha, params.k, params.j, sector)
        entry = None
        if cache_dir is not None:
            try:
                entry = cache.load(cache_dir, *key, need_vectors=need_vectors)
            except CacheCorruption as exc:
                log.warning("%s; recomputing", exc)
                cache.drop(cache_dir, *key)
        if entry is not None:
            sel = DickeSpace(params.j).parity_indices(sign)
            out.append((sign, sel, entry[0], entry[1]))
            continue
        if params.model == "LMG":
            sel = DickeSpace(params.j).parity_indices(sign)
            d, e = _lmg_sector_band(params, sel)
            w, vb = _eigh_tridiagonal(d, e, f"LMG J={params.j} parity {sign:+d}")
        elif params.model == "QKT":
            if qkt_blocks is None:
                qkt_blocks = floquet_sector_matrices(params)
            sel, fb = qkt_blocks[0 if sign == 1 else 1]
            w, vb = _eig_unitary(fb, f"QKT J={params.j} parity {sign:+d}")
        else:
            raise ValueError("HO has no sector solve; use the identity fast path")
        if cache_dir is not None:
            cache.drop(cache_dir, *key)  # may exist without vectors
            keep_vecs = vb if params.dim <= evec_cache_limit else None
            cache.store(cache_dir, *key, evals=w, evecs=keep_vecs)
        out.append((sign, sel, w, vb if need_vectors else None))
    return out


def _sweep_one_j(spec: SweepSpec, j: int):
    n = 2 * j + 1
    coeffs = np.column_stack([coherent_coefficients(j, q, p)
                              for q, p in spec.probes])
    if spec.model == "HO":
        probs = np.abs(coeffs) ** 2
    else:
        params = spec.params(j)
        blocks = sector_spectra(params, spec.cache_dir, spec.evec_cache_limit)
        wanted = {"full": (1, -1), "even": (1,), "odd": (-1,)}[spec.parity_mode]
        parts = [np.abs(vb.conj().T @ coeffs[sel]) ** 2
                 for sign, sel, _, vb in blocks if sign in wanted]
        probs = np.vstack(parts)
        if spec.parity_mode != "full":
            probs = probs / probs.sum(axis=0)
    colsum_err = np.abs(probs.sum(axis=0) - 1.0).max()
    if colsum_err > 1e-8:
        raise SpinScaleError(f"projection lost normalization by {colsum_err:.2e}")
    rows = []
    for ip, (q_probe, p_probe) in enumerate(spec.probes):
        col = probs[:, ip]
        col = col[col > 0.0]
        for q in spec.q_grid:
            rows.append((q_probe, p_probe, j, n, q, float(np.sum(col ** q))))
    return rows


def run_sweep(spec: SweepSpec) -> SweepSummary:
    """Execute a sweep and write its CSV; per-J failures are recorded, not fatal."""
    check_budget(spec)
    t0 = time.time()
    timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    results, failures = {}, []

    def job(j):
        t = time.time()
        rows = _sweep_one_j(spec, j)
        log.info("%s J=%d done in %.2fs", spec.model, j, time.time() - t)
        return rows

    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            futures = {j: pool.submit(job, j) for j in spec.j_grid}
            for j, fut in futures.items():
                try:
                    results[j] = fut.result()
                except (SpinScaleError, np.linalg.LinAlgError) as exc:
                    failures.append((j, str(exc)))
                    log.error("J=%d failed: %s", j, exc)
    else:
        for j in spec.j_grid:
            try:
                results[j] = job(j)
            except (SpinScaleError, np.linalg.LinAlgError) as exc:
                failures.append((j, str(exc)))
                log.error("J=%d failed: %s", j, exc)

    records = [row for j in spec.j_grid for row in results.get(j, [])]
    records.sort(key=lambda r: (r[0], r[1], r[2], r[4]))  # (Q, P, J, q)
    csvio.write_rows(
        spec.out_path, csvio.SWEEP_HEADER,
        [(spec.model, spec.alpha, spec.k, qp, pp, j, n, q, ipr,
          spec.parity_mode, timestamp, __version__)
         for qp, pp, j, n, q, ipr in records])
    return SweepSummary(out_path=spec.out_path, n_records=len(records),
                        n_j_done=len(results), failures=failures,
                        elapsed_s=time.time() - t0)


def run_rstat(alpha: float, k: float, j: int, parities=(1, -1),
              cache_dir=None) -> list:
    """Sector-resolved mean spacing ratios of the kicked-top quasienergies.

    Returns rows (alpha, k, J, parity, mean_r, n_levels); only eigenvalues
    are computed (and cached) on this path.
    """
    params = ModelParams("QKT", j, alpha, k)
    rows = []
    for sign in parities:
        sector = _SECTOR_NAMES[sign]
        key = (params.model, params.alpha, params.k, params.j, sector)
        phases = None
        if cache_dir is not None:
            try:
                entry = cache.load(cache_dir, *key, need_vectors=False)
                if entry is not None:
                    phases = entry[0]
            except CacheCorruption as exc:
                log.warning("%s; recomputing", exc)
                cache.drop(cache_dir, *key)
        if phases is None:
            phases = floquet_phases(params, sign)
            if cache_dir is not None:
                cache.store(cache_dir, *key, evals=phases)
        mean_r, n_used, n_excluded = r_statistic(np.sort(phases), return_counts=True)
        if n_excluded:
            log.info("J=%d k=%g parity %+d: %d degenerate spacings excluded",
                     j, k, sign, n_excluded)
        rows.append((alpha, k, j, sign, mean_r, len(phases)))
    return rows
