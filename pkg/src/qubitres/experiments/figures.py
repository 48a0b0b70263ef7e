"""Figure protocols and parameter sweeps on top of the resonance propagator."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..entanglement import concurrence_checked, initial_state
from ..propagator import evolve_grid, resonance_data
from ..rates import lowest_order_rates, validity_horizon
from .config import ConfigError, ExperimentConfig, SweepPoint, TimeGrid

__all__ = [
    "TimeSeries",
    "FigureResult",
    "trajectory",
    "summarize",
    "sweep",
    "figure_config",
    "run_figure",
    "UNRELIABLE_FACTOR",
]

#: C_max below UNRELIABLE_FACTOR * kappa_max^2 is flagged as unreliable
UNRELIABLE_FACTOR = 10.0


@dataclass
class TimeSeries:
    label: str
    point: SweepPoint
    t: np.ndarray
    rescaled_t: np.ndarray
    rho: np.ndarray  # (T, 4, 4)
    concurrence: np.ndarray
    min_eig: np.ndarray
    artifacts: int = 0

    def __len__(self) -> int:
        return len(self.t)


@dataclass
class FigureResult:
    figure: int
    series: list[TimeSeries]
    summary: list[dict]
    extra: dict = field(default_factory=dict)


def trajectory(cfg: ExperimentConfig, point: SweepPoint, grid: TimeGrid | None = None) -> TimeSeries:
    """Propagate the configured initial state for one sweep point."""
    grid = grid or cfg.time
    c = point.couplings()
    sd = cfg.spectral.build(cfg.system)
    rd = resonance_data(c, sd, cfg.system)
    ts = grid.build(c)
    rho0 = initial_state(cfg.initial)
    rhos = evolve_grid(rho0, ts, rd)
    kmax = c.kappa_max if c.kappa_max > 0 else None
    checked = [concurrence_checked(r, kappa=kmax) for r in rhos]
    conc = np.array([c for c, _ in checked])
    n_art = int(sum(1 for _, n in checked if n))
    min_eig = np.linalg.eigvalsh(rhos)[:, 0]
    scale = grid.scale(c)
    return TimeSeries(point.label, point, ts, ts * scale, rhos, conc, min_eig, n_art)


def _revival(C: np.ndarray, t: np.ndarray, i_max: int) -> tuple[float, float]:
    """Largest concurrence after the first local minimum that follows the main peak."""
    j = i_max + 1
    while j < len(C) - 1 and not (C[j] <= C[j - 1] and C[j] < C[j + 1]):
        j += 1
    if j >= len(C) - 1:
        return math.nan, math.nan
    k = j + int(np.argmax(C[j:]))
    if C[k] <= C[j]:
        return math.nan, math.nan
    return float(C[k]), float(t[k])


def summarize(ts: TimeSeries, cfg: ExperimentConfig) -> dict:
    c = ts.point.couplings()
    i = int(np.argmax(ts.concurrence))
    cmax = float(ts.concurrence[i])
    rev_c, rev_t = _revival(ts.concurrence, ts.t, i)
    sd = cfg.spectral.build(cfg.system)
    rates = lowest_order_rates(c, sd, cfg.system)
    kmax = c.kappa_max
    row = {
        "label": ts.label,
        "kappa": ts.point.kappa,
        "nu": ts.point.nu,
        "lambda": ts.point.lam,
        "C_max": cmax,
        "t_max": float(ts.t[i]),
        "rescaled_t_max": float(ts.rescaled_t[i]),
        "revival_C": rev_c,
        "revival_t": rev_t,
        "revival_rescaled_t": rev_t * (ts.rescaled_t[-1] / ts.t[-1]) if not math.isnan(rev_t) else math.nan,
        "min_eig": float(ts.min_eig.min()),
        "artifacts": ts.artifacts,
        "unreliable": bool(kmax > 0 and cmax < UNRELIABLE_FACTOR * kmax * kmax),
    }
    for j, g in rates.decoherence().items():
        row[f"horizon_C{j}"] = validity_horizon(g, kmax)
    return row


def sweep(cfg: ExperimentConfig, workers: int = 1,
          keep_series: bool = False) -> tuple[list[dict], list[TimeSeries]]:
    """Summary rows for every sweep point, sorted by (kappa, nu, lambda)."""
    points = cfg.sweep_points()

    def one(p):
        ts = trajectory(cfg, p)
        return summarize(ts, cfg), (ts if keep_series else None)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(one, points))
    else:
        results = [one(p) for p in points]
    rows = [r for r, _ in results]
    series = [s for _, s in results if s is not None]
    return rows, series


# ------------------------------------------------------------ figure defaults

_FIG2B_RATIOS = tuple(round(0.1 * i, 10) for i in range(13))
_LAMBDAS_46 = (0.0, 0.0005, 0.001, 0.002, 0.005)
_LAMBDAS_5 = (0.0, 0.00025, 0.0005, 0.00075, 0.001, 0.0015, 0.002, 0.003)


def figure_config(n: int, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Default protocol of figure ``n`` (sweep values and time grid)."""
    cfg = base or ExperimentConfig()
    if n == 1:
        return cfg.with_(kappas=(0.01, 0.1, 1.0), nus=(0.0,), lambdas=(0.0,),
                         time=TimeGrid(t_end_scaled=4.0, rescale="kappa2"))
    if n == 2:
        return cfg.with_(kappas=(0.01,), nus=(0.0, 0.002, 0.004, 0.006, 0.008), lambdas=(0.0,),
                         time=TimeGrid(t_end_scaled=4.0, rescale="kappa2"))
    if n == 3:
        return cfg.with_(kappas=(0.01, 0.02, 0.05), nus=(0.005,), lambdas=(0.0,),
                         time=TimeGrid(t_end_scaled=4.0, rescale="kappa2_plus_nu2"))
    if n in (4, 6):
        return cfg.with_(kappas=(0.02,), nus=(0.0,), lambdas=_LAMBDAS_46,
                         time=TimeGrid(t_end_scaled=4.0, rescale="kappa2"))
    if n == 5:
        return cfg.with_(kappas=(0.02,), nus=(0.0, 0.005), lambdas=_LAMBDAS_5,
                         time=TimeGrid(t_end_scaled=4.0, rescale="kappa2"))
    raise ConfigError(f"figure must be 1..6, got {n}")


def _check_protocol(n: int, cfg: ExperimentConfig) -> None:
    pts = cfg.sweep_points()
    if n in (1, 2, 3) and any(p.lam != 0 for p in pts):
        raise ConfigError(f"figure {n} is for energy-conserving couplings only (lambda = 0)")
    if n == 1 and any(p.nu != 0 for p in pts):
        raise ConfigError("figure 1 needs nu = 0")
    if any(p.kappa <= 0 for p in pts):
        raise ConfigError(f"figure {n} needs kappa > 0")
    if n == 3 and any(p.kappa <= p.nu for p in pts):
        raise ConfigError("figure 3 compares kappa > nu")
    if n == 5 and 0.0 not in {p.lam for p in pts}:
        raise ConfigError("figure 5 needs lambda = 0 as reference for the time shift")


def _fig2b(cfg: ExperimentConfig, kappas=(0.01, 0.02), ratios=_FIG2B_RATIOS) -> list[dict]:
    rows = []
    for k in kappas:
        sub = cfg.with_(kappas=(k,), nus=tuple(r * k for r in ratios), lambdas=(0.0,))
        for row in sweep(sub)[0]:
            row["nu_over_kappa"] = row["nu"] / k
            rows.append(row)
    return rows


def run_figure(n: int, cfg: ExperimentConfig | None = None, workers: int = 1) -> FigureResult:
    """Series and summary for figure ``n``.

    With ``cfg=None`` the defaults of :func:`figure_config` are used; a
    supplied config is used as is after a protocol check.
    """
    cfg = figure_config(n) if cfg is None else cfg
    _check_protocol(n, cfg)
    rows, series = sweep(cfg, workers=workers, keep_series=True)
    extra: dict = {}
    if n == 2:
        extra["C_max_vs_nu"] = _fig2b(cfg.with_(time=cfg.time))
    if n == 5:
        ref = {r["nu"]: r["t_max"] for r in rows if r["lambda"] == 0.0}
        for r in rows:
            r["delta_t_max"] = r["t_max"] - ref[r["nu"]]
    return FigureResult(n, series, rows, extra)
