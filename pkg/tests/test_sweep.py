import os

import numpy as np
import pytest

from spinscale import cache, csvio
from spinscale.errors import CacheCorruption, OutOfBudget
from spinscale.spectra import ModelParams, spectral_basis
from spinscale.sweep import (SweepSpec, estimate_flops, run_rstat, run_sweep,
                             sector_spectra)


def _read_csv(path):
    return csvio.read_rows(path, csvio.SWEEP_HEADER)


def _spec(tmp_path, **kw):
    base = dict(model="HO", alpha=0.84, k=0.0,
                j_grid=[500, 1000, 1500, 2000, 2500, 3000],
                probes=[(round(0.02 * i, 10), 0.0) for i in range(8)],
                q_grid=[round(q, 10) for q in np.arange(0.1, 4.01, 0.1)],
                out_path=str(tmp_path / "out.csv"))
    base.update(kw)
    return SweepSpec(**base)


def test_ho_sweep_cardinality_and_schema(tmp_path):
    summary = run_sweep(_spec(tmp_path))
    assert summary.n_records == 8 * 6 * 40
    assert not summary.failures
    rows = _read_csv(summary.out_path)
    assert len(rows) == summary.n_records
    keys = {(r["model"], r["alpha"], r["k"], r["Q"], r["P"], r["J"], r["q"])
            for r in rows}
    assert len(keys) == summary.n_records  # unique key per record
    for r in rows[:50]:
        assert int(r["N"]) == 2 * int(r["J"]) + 1
        assert 0 < float(r["ipr"]) <= 1.0 + 1e-12 or float(r["q"]) < 1.0


def test_sweep_determinism_and_worker_independence(tmp_path):
    s1 = run_sweep(_spec(tmp_path, out_path=str(tmp_path / "a.csv"), workers=1))
    s2 = run_sweep(_spec(tmp_path, out_path=str(tmp_path / "b.csv"), workers=4))
    rows1 = _read_csv(s1.out_path)
    rows2 = _read_csv(s2.out_path)
    strip = lambda rows: [{k: v for k, v in r.items() if k != "timestamp"}
                          for r in rows]
    assert strip(rows1) == strip(rows2)


def test_lmg_sweep_range_check(tmp_path):
    probes = [(round(q, 12), 0.0) for q in np.linspace(-0.5, 1.99, 25)]
    spec = _spec(tmp_path, model="LMG", k=-2.0, j_grid=[100, 200, 300],
                 probes=probes, q_grid=[2.0])
    summary = run_sweep(spec)
    assert summary.n_records == 25 * 3
    iprs = [float(r["ipr"]) for r in _read_csv(spec.out_path)]
    assert all(0.0 < v <= 1.0 for v in iprs)


def test_warm_cache_reproduces_numeric_columns(tmp_path):
    cache_dir = str(tmp_path / "cache")
    kw = dict(model="QKT", k=2.5, j_grid=[20, 40], q_grid=[0.5, 2.0],
              probes=[(0.2, 1.0), (0.8, 1.0)], cache_dir=cache_dir)
    cold = run_sweep(_spec(tmp_path, out_path=str(tmp_path / "cold.csv"), **kw))
    assert os.path.isdir(cache_dir)
    warm = run_sweep(_spec(tmp_path, out_path=str(tmp_path / "warm.csv"), **kw))
    strip_ts = lambda path: [{k: v for k, v in r.items() if k != "timestamp"}
                             for r in _read_csv(path)]
    assert strip_ts(cold.out_path) == strip_ts(warm.out_path)


def test_cache_roundtrip_and_corruption(tmp_path):
    cache_dir = str(tmp_path / "cache")
    params = ModelParams("LMG", 12, alpha=0.84, k=-2.0)
    first = sector_spectra(params, cache_dir)
    again = sector_spectra(params, cache_dir)
    for (s1, sel1, w1, v1), (s2, sel2, w2, v2) in zip(first, again):
        assert s1 == s2
        np.testing.assert_array_equal(sel1, sel2)
        np.testing.assert_array_equal(w1, w2)
        np.testing.assert_array_equal(v1, v2)
    # corrupt one payload; the loader must notice
    entry = cache.entry_dir(cache_dir, "LMG", 0.84, -2.0, 12, "even")
    with open(os.path.join(entry, "evals.bin"), "r+b") as fh:
        fh.seek(8)
        fh.write(b"\x42" * 8)
    with pytest.raises(CacheCorruption):
        cache.load(cache_dir, "LMG", 0.84, -2.0, 12, "even", need_vectors=False)
    # the harness recovers by recomputing
    fixed = sector_spectra(params, cache_dir)
    np.testing.assert_array_equal(fixed[0][2], first[0][2])


def test_evec_cache_limit(tmp_path):
    cache_dir = str(tmp_path / "cache")
    params = ModelParams("LMG", 30, alpha=0.84, k=-2.0)
    sector_spectra(params, cache_dir, evec_cache_limit=41)  # N=61 > 41
    entry = cache.load(cache_dir, "LMG", 0.84, -2.0, 30, "even",
                       need_vectors=False)
    assert entry is not None
    assert cache.load(cache_dir, "LMG", 0.84, -2.0, 30, "even",
                      need_vectors=True) is None
    # asking for vectors recomputes and upgrades the entry
    blocks = sector_spectra(params, cache_dir, evec_cache_limit=4001)
    assert blocks[0][3] is not None
    assert cache.load(cache_dir, "LMG", 0.84, -2.0, 30, "even",
                      need_vectors=True) is not None


def test_budget_enforced_before_launch(tmp_path):
    spec = _spec(tmp_path, model="QKT", k=30.0, j_grid=[400, 800],
                 probes=[(0.2, 1.0)], q_grid=[2.0], budget_flops=1e6)
    with pytest.raises(OutOfBudget):
        run_sweep(spec)
    assert not os.path.exists(spec.out_path)
    with pytest.raises(OutOfBudget, match="dense solve"):
        run_sweep(_spec(tmp_path, model="LMG", k=-2.0, j_grid=[10001],
                        probes=[(0.2, 1.0)], q_grid=[2.0]))
    assert estimate_flops(_spec(tmp_path)) < 1e9  # HO has no dense solves


def test_spec_validation(tmp_path):
    with pytest.raises(ValueError):
        _spec(tmp_path, j_grid=[100, 100])
    with pytest.raises(ValueError):
        _spec(tmp_path, probes=[(2.0, 0.1)])
    with pytest.raises(ValueError):
        _spec(tmp_path, q_grid=[5.0])
    with pytest.raises(ValueError):
        _spec(tmp_path, parity_mode="both")


def test_parity_restricted_mode(tmp_path):
    full = _spec(tmp_path, model="LMG", k=-2.0, j_grid=[40],
                 probes=[(0.5, 0.0)], q_grid=[2.0],
                 out_path=str(tmp_path / "f.csv"))
    even = _spec(tmp_path, model="LMG", k=-2.0, j_grid=[40],
                 probes=[(0.5, 0.0)], q_grid=[2.0], parity_mode="even",
                 out_path=str(tmp_path / "e.csv"))
    run_sweep(full)
    run_sweep(even)
    vf = float(_read_csv(full.out_path)[0]["ipr"])
    ve = float(_read_csv(even.out_path)[0]["ipr"])
    assert 0 < vf <= 1 and 0 < ve <= 1
    assert vf != ve


def test_parity_mode_consistency_with_basis(tmp_path):
    # full-space sweep IPR equals a direct computation from the eigenbasis
    from spinscale.scaling import ipr_q
    from spinscale.spin import coherent_state, overlap_probabilities
    spec = _spec(tmp_path, model="QKT", k=2.5, j_grid=[15],
                 probes=[(0.3, 0.7)], q_grid=[2.0])
    run_sweep(spec)
    got = float(_read_csv(spec.out_path)[0]["ipr"])
    basis = spectral_basis(ModelParams("QKT", 15, 0.84, 2.5))
    p = overlap_probabilities(coherent_state(15, 0.3, 0.7), basis)
    assert abs(got - ipr_q(p, 2.0)) < 1e-12


def test_run_rstat_records(tmp_path):
    rows = run_rstat(0.84, 30.0, 60, cache_dir=str(tmp_path / "c"))
    assert len(rows) == 2
    for alpha, k, j, parity, mean_r, n_levels in rows:
        assert (alpha, k, j) == (0.84, 30.0, 60)
        assert parity in (1, -1)
        assert n_levels == (61 if parity == 1 else 60)
        assert 0.3 < mean_r < 0.7
    # warm path returns identical numbers
    rows2 = run_rstat(0.84, 30.0, 60, cache_dir=str(tmp_path / "c"))
    assert rows == rows2
