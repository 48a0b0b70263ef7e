"""Command-line interface: ``qubitres <command> [--config FILE] [--out DIR] [--format csv|plot]``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ..entanglement import DisentanglementInputs, bound_terms, initial_state
from ..rates import lowest_order_rates, validity_horizon
from ..solvable import MemoryFunctions, deviation
from ..spectral import SpectralData
from .config import ConfigError, ExperimentConfig, SweepPoint, load_config
from .figures import figure_config, run_figure, summarize, sweep, trajectory
from .io import emit, write_table_csv

__all__ = ["main", "build_parser"]


def _json(obj) -> str:
    def default(o):
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        if isinstance(o, Path):
            return str(o)
        raise TypeError(type(o).__name__)

    def clean(o):
        if isinstance(o, float) and not math.isfinite(o):
            return str(o)
        if isinstance(o, dict):
            return {k: clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        return o

    return json.dumps(clean(obj), default=default, sort_keys=True)


def _cfg(args, base: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = load_config(args.config, base) if args.config else (base or ExperimentConfig())
    over = {}
    if args.out is not None:
        over["out_dir"] = Path(args.out)
    if args.format is not None:
        over["fmt"] = args.format
    return cfg.with_(**over) if over else cfg


def _single_point(cfg: ExperimentConfig) -> SweepPoint:
    c = cfg.couplings
    if c.lambda1 != c.mu1:
        raise ConfigError("the CLI trajectory commands use lambda = mu; set both equal")
    return SweepPoint(c.kappa1, c.nu1, c.lambda1)


def cmd_rates(args) -> int:
    cfg = _cfg(args)
    sd = cfg.spectral.build(cfg.system)
    r = lowest_order_rates(cfg.couplings, sd, cfg.system)
    k = cfg.couplings.kappa_max
    out = asdict(r)
    rates = {"gamma_th": r.gamma_th, **{f"gamma{j}_dec": g for j, g in r.decoherence().items()}}
    out["times"] = {name.replace("gamma", "tau"): (1.0 / g if g > 0 else math.inf)
                    for name, g in rates.items()}
    out["horizons"] = {f"C{j}": validity_horizon(g, k) for j, g in r.decoherence().items()}
    print(_json(out))
    return 0


def cmd_evolve(args, with_summary: bool = False) -> int:
    cfg = _cfg(args)
    ts = trajectory(cfg, _single_point(cfg))
    paths = emit([ts], cfg.out_dir, cfg.prefix, cfg.fmt)
    row = summarize(ts, cfg)
    out = {"files": [str(p) for p in paths]}
    out.update({k: v for k, v in row.items() if k.startswith("horizon_")})
    if with_summary:
        out.update(row)
    print(_json(out))
    return 0


def cmd_bounds(args) -> int:
    cfg = _cfg(args)
    sd = cfg.spectral.build(cfg.system)
    d = DisentanglementInputs.from_couplings(cfg.p, cfg.couplings, sd, cfg.C_A, cfg.C_B)
    ta, tb = bound_terms(d)
    print(_json({"t_A": max(ta), "t_B": min(tb), "terms_A": ta, "terms_B": tb}))
    return 0


def cmd_validate(args) -> int:
    cfg = _cfg(args)
    kappas = cfg.kappas or (0.02, 0.04, 0.08)
    sd = SpectralData.from_form_factors(cfg.system, cfg.spectral.f, cfg.spectral.g, cfg.spectral.u_c)
    mf = MemoryFunctions(cfg.spectral.f, cfg.system.beta)
    rho0 = initial_state(cfg.initial)
    grid = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, args.n_points - 1)])
    nu = cfg.couplings.nu1
    rows = []
    for k in kappas:
        rows.append({"kappa": k, "nu": nu, "deviation": deviation(rho0, grid, k, nu, mf, sd)})
    if len(rows) >= 2 and all(r["deviation"] > 0 for r in rows):
        slope = float(np.polyfit(np.log([r["kappa"] for r in rows]),
                                 np.log([r["deviation"] for r in rows]), 1)[0])
    else:
        slope = math.nan
    for r in rows:
        print(f"{r['kappa']:.6g}\t{r['nu']:.6g}\t{r['deviation']:.6e}")
    print(_json({"slope": slope, "rows": rows}))
    return 0


def cmd_figure(args) -> int:
    cfg = _cfg(args, figure_config(args.n))
    res = run_figure(args.n, cfg, workers=args.workers)
    prefix = f"fig{args.n}"
    paths = emit(res.series, cfg.out_dir, prefix, cfg.fmt, normalize=args.n in (3, 6))
    paths.append(write_table_csv(res.summary, cfg.out_dir / f"{prefix}_summary.csv"))
    for key, rows in res.extra.items():
        paths.append(write_table_csv(rows, cfg.out_dir / f"{prefix}_{key}.csv"))
    print(_json({"figure": args.n, "files": [str(p) for p in paths], "summary": res.summary}))
    return 0


def cmd_sweep(args) -> int:
    cfg = _cfg(args)
    rows, _ = sweep(cfg, workers=args.workers)
    path = write_table_csv(rows, cfg.out_dir / f"{cfg.prefix}_sweep.csv")
    print(_json({"file": str(path), "rows": rows}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI configuration file")
    common.add_argument("--out", type=Path, help="output directory (overrides [output] dir)")
    common.add_argument("--format", choices=("csv", "plot"), help="csv only, or csv plus plot script")

    p = argparse.ArgumentParser(prog="qubitres", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("rates", parents=[common], help="lowest-order rates and validity horizons")
    sub.add_parser("evolve", parents=[common], help="density-matrix trajectory to CSV")
    sub.add_parser("concurrence", parents=[common], help="trajectory plus concurrence summary")
    sub.add_parser("bounds", parents=[common], help="disentanglement-time bounds")
    v = sub.add_parser("validate", parents=[common], help="exact vs resonance deviation table")
    v.add_argument("--n-points", type=int, default=400)
    f = sub.add_parser("figure", parents=[common], help="reproduce a figure (1..6)")
    f.add_argument("n", type=int, choices=range(1, 7))
    f.add_argument("--workers", type=int, default=1)
    s = sub.add_parser("sweep", parents=[common], help="summary table over the [sweep] grid")
    s.add_argument("--workers", type=int, default=1)
    return p


_COMMANDS = {
    "rates": cmd_rates,
    "evolve": cmd_evolve,
    "concurrence": lambda a: cmd_evolve(a, with_summary=True),
    "bounds": cmd_bounds,
    "validate": cmd_validate,
    "figure": cmd_figure,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError, OSError, ArithmeticError, RuntimeError) as exc:
        print(_json({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
