"""Command-line entry point: every experiment as a subcommand.

Grids are start:stop:step triples, probes are inline Q:P pairs or @file, and
the sweep subcommand can mirror itself to/from a flat key = value config
file (flags override the file; --print-config emits a file that parses back
to the same run).
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import csvio
from .classical import (chart_to_sphere, default_critical_seeds,
                        find_critical_points, poincare_section, trajectory)
from .errors import SpinScaleError
from .pipelines import mfa_by_probe, write_tau_csv
from .presets import PresetContext, run_preset
from .spectra import ModelParams
from .sweep import DEFAULT_BUDGET_FLOPS, SweepSpec, run_rstat, run_sweep

log = logging.getLogger(__name__)

CACHE_ENV = "SPINSCALE_CACHE"


def parse_grid(text: str, integer: bool = False):
    """start:stop:step, inclusive of stop when it lies on the grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid {text!r} is not start:stop:step")
    if integer:
        start, stop, step = (int(p) for p in parts)
        return list(range(start, stop + 1, step))
    start, stop, step = (float(p) for p in parts)
    return [round(v, 12) for v in np.arange(start, stop + step / 2.0, step)]

def parse_probes(text: str):
    """Inline 'Q:P,Q:P,...' or '@file' with one 'Q P' or 'Q,P' pair per line."""
    pairs = []
    if text.startswith("@"):
        with open(text[1:]) as fh:
            for line in fh:
                line = line.strip().replace(",", " ")
                if not line or line.startswith("#"):
                    continue
                cols = line.split()
                try:
                    pairs.append((float(cols[0]), float(cols[1])))
                except ValueError:
                    continue  # header line
        return pairs
    for chunk in text.split(","):
        q, p = chunk.split(":")
        pairs.append((float(q), float(p)))
    return pairs


@dataclass
class SweepConfig:
    """Flat, text-serializable form of one sweep run."""

    model: str = "HO"
    alpha: float = 0.84
    k: float = 0.0
    jgrid: str = "500:3000:500"
    probes: str = "0.0:0.0"
    q_grid: str = "2.0:2.0:1.0"
    out: str = "sweep.csv"
    cache_dir: str = ""
    workers: int = 1
    parity_mode: str = "full"
    budget_flops: float = DEFAULT_BUDGET_FLOPS

    def to_text(self) -> str:
        lines = [f"{f.name} = {getattr(self, f.name)}" for f in fields(self)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SweepConfig":
        values = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
        cfg = cls()
        for f in fields(cls):
            if f.name in values:
                setattr(cfg, f.name, f.type(values[f.name])
                        if f.type is not str else values[f.name])
        return cfg

    def to_spec(self) -> SweepSpec:
        cache = self.cache_dir or os.environ.get(CACHE_ENV) or None
        return SweepSpec(model=self.model, alpha=self.alpha, k=self.k,
                         j_grid=parse_grid(self.jgrid, integer=True),
                         probes=parse_probes(self.probes),
                         q_grid=parse_grid(self.q_grid),
                         out_path=self.out, cache_dir=cache,
                         workers=self.workers, parity_mode=self.parity_mode,
                         budget_flops=self.budget_flops)


def _add_sweep_flags(sp):
    sp.add_argument("--config", help="key = value config file; flags override it")
    sp.add_argument("--model", choices=("HO", "LMG", "QKT"))
    sp.add_argument("--alpha", type=float, help="rotation strength (default 0.84)")
    sp.add_argument("--k", type=float, help="torsion/kick strength (default 0)")
    sp.add_argument("--jgrid", help="J grid start:stop:step (default 500:3000:500)")
    sp.add_argument("--probes", help="inline Q:P,Q:P,... or @file (default 0.0:0.0)")
    sp.add_argument("--q-grid", dest="q_grid",
                    help="q grid start:stop:step (default 2.0:2.0:1.0)")
    sp.add_argument("--out", help="output CSV path (default sweep.csv)")
    sp.add_argument("--cache-dir", dest="cache_dir",
                    help=f"spectrum cache dir (default ${CACHE_ENV})")
    sp.add_argument("--workers", type=int, help="parallel J tasks (default 1)")
    sp.add_argument("--parity-mode", dest="parity_mode",
                    choices=("full", "even", "odd"),
                    help="project on the full space or one sector (default full)")
    sp.add_argument("--budget-flops", dest="budget_flops", type=float,
                    help=f"cost ceiling (default {DEFAULT_BUDGET_FLOPS:.0e})")
    sp.add_argument("--print-config", action="store_true",
                    help="print the resolved config and exit")


def _sweep_config(args) -> SweepConfig:
    cfg = (SweepConfig.from_text(open(args.config).read()) if args.config
           else SweepConfig())
    for f in fields(SweepConfig):
        override = getattr(args, f.name, None)
        if override is not None:
            setattr(cfg, f.name, override)
    return cfg


def cmd_sweep(args) -> int:
    cfg = _sweep_config(args)
    if args.print_config:
        print(cfg.to_text(), end="")
        return 0
    summary = run_sweep(cfg.to_spec())
    print(f"wrote {summary.n_records} records to {summary.out_path} "
          f"({summary.n_j_done}/{summary.n_j_done + len(summary.failures)} J done, "
          f"{summary.elapsed_s:.1f}s)")
    for j, msg in summary.failures:
        print(f"  J={j} failed: {msg}", file=sys.stderr)
    return 0 if not summary.failures else 1


def cmd_tau(args) -> int:
    out = args.out or os.path.splitext(args.results)[0] + "_tau.csv"
    write_tau_csv(args.results, out, q=args.q, window=args.ma_window)
    print(f"wrote {out}")
    return 0


def cmd_mfa(args) -> int:
    q_grid = parse_grid(args.q_grid) if args.q_grid else None
    window = tuple(float(v) for v in args.window.split(":")) if args.window else None
    results = [csvio.mfa_result_to_dict(meta, res)
               for meta, res in mfa_by_probe(args.results, q_grid, window,
                                             args.r2_threshold)]
    payload = {"input": args.results, "results": results}
    if args.out:
        csvio.dump_json(args.out, payload)
        print(f"wrote {args.out}")
    else:
        print(json.dumps(payload, indent=1, sort_keys=True))
    return 0


def cmd_rstat(args) -> int:
    ks = parse_grid(args.kgrid) if args.kgrid else [args.k]
    cache = args.cache_dir or os.environ.get(CACHE_ENV) or None
    rows = []
    for k in ks:
        rows.extend(run_rstat(args.alpha, k, args.j, cache_dir=cache))
        log.info("rstat k=%g done", k)
    csvio.write_rows(args.out, csvio.RSTAT_HEADER, rows)
    print(f"wrote {len(rows)} records to {args.out}")
    return 0


def cmd_classical(args) -> int:
    params = ModelParams(args.model, 1, args.alpha, args.k)
    if args.what == "trajectory":
        rows = []
        for q0, p0 in parse_probes(args.start):
            _, pts = trajectory(params, (q0, p0), t_end=args.t_end, dt=args.dt)
            for step in range(0, len(pts), args.stride):
                rows.append((args.model, args.alpha, args.k, q0, p0, step,
                             pts[step, 0], pts[step, 1]))
        csvio.write_rows(args.out, csvio.CLASSICAL_HEADER, rows)
    elif args.what == "poincare":
        if args.seeds == "grid":
            pts = [(q, p) for q in np.arange(-1.8, 1.81, 0.45)
                   for p in np.arange(-1.8, 1.81, 0.45) if q * q + p * p < 3.9]
        else:
            pts = parse_probes(args.seeds)
        seeds = [chart_to_sphere(q, p) for q, p in pts]
        clouds = poincare_section(params, seeds, args.n_iter)
        rows = [(args.model, args.alpha, args.k, q0, p0, 0, qq, pp)
                for (q0, p0), cloud in zip(pts, clouds) for qq, pp in cloud]
        csvio.write_rows(args.out, csvio.CLASSICAL_HEADER, rows)
    else:  # critical
        seeds = (default_critical_seeds() if args.seeds == "grid"
                 else parse_probes(args.seeds))
        crits = find_critical_points(params, seeds)
        print(json.dumps([{"Q": c.q, "P": c.p, "energy": c.energy,
                           "kind": c.kind} for c in crits], indent=1))
        return 0
    print(f"wrote {args.out}")
    return 0


def cmd_fig(args) -> int:
    ctx = PresetContext(out_dir=args.out_dir, jmax=args.jmax,
                        full_scale=args.full_scale,
                        cache_dir=args.cache_dir or os.environ.get(CACHE_ENV) or None,
                        workers=args.workers)
    paths = run_preset(args.fig_id, ctx)
    for p in paths:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spinscale",
        description="Finite-size scaling experiments for collective spin models")
    ap.add_argument("-v", "--verbose", action="store_true",
                    help="per-J progress log")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", help="run an IPR scaling sweep over a J grid")
    _add_sweep_flags(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("tau", help="finite-tau table from a sweep CSV")
    sp.add_argument("results", help="sweep CSV")
    sp.add_argument("--q", type=float, default=None,
                    help="restrict to one q (default: all)")
    sp.add_argument("--ma-window", dest="ma_window", type=int, default=5,
                    help="moving-average window (default 5)")
    sp.add_argument("--out", default=None, help="output CSV (default <input>_tau.csv)")
    sp.set_defaults(func=cmd_tau)

    sp = sub.add_parser("mfa", help="multifractal fit of a sweep CSV, JSON out")
    sp.add_argument("results", help="sweep CSV")
    sp.add_argument("--q-grid", dest="q_grid", default=None,
                    help="q grid a:b:step (default: every q in the file)")
    sp.add_argument("--window", default=None,
                    help="fit window in ln N, a:b (default: all points)")
    sp.add_argument("--r2-threshold", dest="r2_threshold", type=float,
                    default=0.995, help="power-law gate (default 0.995)")
    sp.add_argument("--out", default=None, help="JSON path (default: stdout)")
    sp.set_defaults(func=cmd_mfa)

    sp = sub.add_parser("rstat", help="mean spacing ratio per parity sector")
    sp.add_argument("--alpha", type=float, default=0.84)
    sp.add_argument("--k", type=float, default=None, help="single kick strength")
    sp.add_argument("--kgrid", default=None, help="k grid a:b:step")
    sp.add_argument("--j", type=int, required=True, help="total spin J")
    sp.add_argument("--cache-dir", dest="cache_dir", default=None)
    sp.add_argument("--out", required=True, help="output CSV")
    sp.set_defaults(func=cmd_rstat)

    sp = sub.add_parser("classical", help="trajectories, sections, critical points")
    sp.add_argument("what", choices=("trajectory", "poincare", "critical"))
    sp.add_argument("--model", choices=("HO", "LMG", "QKT"), default="QKT")
    sp.add_argument("--alpha", type=float, default=0.84)
    sp.add_argument("--k", type=float, default=0.0)
    sp.add_argument("--start", default="0.5:0.0",
                    help="trajectory starts, Q:P,... (default 0.5:0.0)")
    sp.add_argument("--t-end", dest="t_end", type=float, default=20.0)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--stride", type=int, default=10,
                    help="write every n-th trajectory step (default 10)")
    sp.add_argument("--seeds", default="grid",
                    help="'grid' or inline Q:P,... (default grid)")
    sp.add_argument("--n-iter", dest="n_iter", type=int, default=1000)
    sp.add_argument("--out", default="classical.csv")
    sp.set_defaults(func=cmd_classical)

    sp = sub.add_parser("fig", help="run a bundled figure-data preset")
    sp.add_argument("fig_id", help="fig2..fig11, appA..appC (or bare number)")
    sp.add_argument("--out-dir", dest="out_dir", default=".")
    sp.add_argument("--jmax", type=int, default=None,
                    help="cap the preset J grid (desk-scale default per preset)")
    sp.add_argument("--full-scale", dest="full_scale", action="store_true",
                    help="original grids; hours of dense solves for the big ones")
    sp.add_argument("--cache-dir", dest="cache_dir", default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_fig)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "rstat" and args.k is None and args.kgrid is None:
        print("error: rstat needs --k or --kgrid", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (SpinScaleError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
