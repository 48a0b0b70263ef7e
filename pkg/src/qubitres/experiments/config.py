"""INI experiment configuration.

Sections and keys (all optional, defaults in brackets)::

    [system]        B1 [1.0]  B2 [1.25]  beta [1.0]
    [couplings]     lambda [0] mu [0] kappa [0] nu [0]
    [sweep]         kappa, nu, lambda: comma-separated lists; lambda sets lambda = mu
    [time]          t_start, t_end (absolute) or t_end_scaled (units of 1/kappa_eff^2),
                    n_points [2000], rescale [none | kappa2 | kappa2_plus_nu2]
    [initial_state] kind [braun | superposition | explicit], a1, a2, matrix (16 entries)
    [spectral]      mode [renormalized | raw], f_p, f_m, g_p, g_m, u_c
    [bounds]        p [0.5] C_A [1] C_B [1]
    [output]        dir [out], prefix [run], format [csv | plot]

Sweep values missing from [sweep] fall back to the single value in
[couplings].  Complex numbers use Python syntax, e.g. ``1+2j``.
"""
from __future__ import annotations

import configparser
import itertools
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..density import DensityMatrix4
from ..entanglement import BraunProduct, Explicit, InitialState, SuperpositionFamily
from ..rates import CouplingSet
from ..spectral import DEFAULT_CUTOFF, FormFactor, SpectralData
from ..system import SystemParams

__all__ = [
    "ConfigError",
    "TimeGrid",
    "SpectralSpec",
    "ExperimentConfig",
    "SweepPoint",
    "load_config",
    "parse_config",
]

RESCALE_MODES = ("none", "kappa2", "kappa2_plus_nu2")


class ConfigError(ValueError):
    """Inconsistent or malformed experiment configuration."""


@dataclass(frozen=True)
class TimeGrid:
    """Logarithmic below ``0.1/kappa^2``, linear above, with t = 0 prepended.

    ``t_end`` is absolute; if ``t_end_scaled`` is set it wins and is
    multiplied by ``1/scale`` where ``scale`` is the rescaling factor of the
    sweep point (``kappa^2`` unless ``rescale = kappa2_plus_nu2``).
    """

    n_points: int = 2000
    t_start: float | None = None
    t_end: float | None = None
    t_end_scaled: float | None = 4.0
    rescale: str = "kappa2"

    def __post_init__(self):
        if self.n_points < 2:
            raise ConfigError("n_points must be at least 2")
        if self.rescale not in RESCALE_MODES:
            raise ConfigError(f"rescale must be one of {RESCALE_MODES}")
        if self.t_end is None and self.t_end_scaled is None:
            raise ConfigError("either t_end or t_end_scaled is required")

    def scale(self, c: CouplingSet) -> float:
        if self.rescale == "kappa2_plus_nu2":
            return c.kappa1**2 + c.nu1**2
        if self.rescale == "kappa2":
            return c.kappa1**2 if c.kappa1 != 0 else c.kappa_max**2
        return 1.0

    def _k2(self, c: CouplingSet) -> float:
        k = c.kappa_max
        return k * k if k > 0 else 1.0

    def build(self, c: CouplingSet) -> np.ndarray:
        s = self.scale(c)
        if self.t_end_scaled is not None:
            if s <= 0:
                raise ConfigError("t_end_scaled needs a nonzero rescaling factor")
            t_end = self.t_end_scaled / (s if self.rescale != "none" else 1.0)
        else:
            t_end = float(self.t_end)
        k2 = self._k2(c)
        knee = 0.1 / k2
        t0 = self.t_start if self.t_start is not None else 1e-4 / k2
        if not 0 < t0 < t_end:
            raise ConfigError(f"need 0 < t_start < t_end, got {t0}, {t_end}")
        n = self.n_points - 1
        if knee <= t0 or knee >= t_end:
            body = np.geomspace(t0, t_end, n)
        else:
            n_log = max(2, n // 4)
            log = np.geomspace(t0, knee, n_log, endpoint=False)
            lin = np.linspace(knee, t_end, n - n_log)
            body = np.concatenate([log, lin])
        grid = np.concatenate([[0.0], body])
        if not np.all(np.diff(grid) > 0):
            raise ConfigError("time grid is not strictly increasing")
        return grid


@dataclass(frozen=True)
class SpectralSpec:
    mode: str = "renormalized"
    f: FormFactor = FormFactor(-0.5, 2)
    g: FormFactor = FormFactor(0.5, 2)
    u_c: float = DEFAULT_CUTOFF

    def __post_init__(self):
        if self.mode not in ("renormalized", "raw"):
            raise ConfigError("spectral mode must be 'renormalized' or 'raw'")

    def build(self, sys: SystemParams) -> SpectralData:
        if self.mode == "renormalized":
            return SpectralData.renormalized(sys)
        return SpectralData.from_form_factors(sys, self.f, self.g, self.u_c)


@dataclass(frozen=True)
class SweepPoint:
    """One (kappa, nu, lambda = mu) combination, sorted lexicographically."""

    kappa: float
    nu: float
    lam: float

    def couplings(self) -> CouplingSet:
        return CouplingSet.symmetric(lam=self.lam, mu=self.lam, kappa=self.kappa, nu=self.nu)

    @property
    def label(self) -> str:
        return f"kappa={self.kappa:g}_nu={self.nu:g}_lambda={self.lam:g}"


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemParams = SystemParams(1.0, 1.25, 1.0)
    couplings: CouplingSet = CouplingSet()
    kappas: tuple[float, ...] = ()
    nus: tuple[float, ...] = ()
    lambdas: tuple[float, ...] = ()
    time: TimeGrid = TimeGrid()
    initial: InitialState = BraunProduct()
    spectral: SpectralSpec = SpectralSpec()
    p: float = 0.5
    C_A: float = 1.0
    C_B: float = 1.0
    out_dir: Path = Path("out")
    prefix: str = "run"
    fmt: str = "csv"
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.fmt not in ("csv", "plot"):
            raise ConfigError("format must be 'csv' or 'plot'")
        for name in ("kappas", "nus", "lambdas"):
            if any(v < 0 for v in getattr(self, name)):
                raise ConfigError(f"{name} must be non-negative")

    def sweep_points(self) -> list[SweepPoint]:
        c = self.couplings
        ks = self.kappas or (c.kappa1,)
        ns = self.nus or (c.nu1,)
        ls = self.lambdas or (c.lambda1,)
        if not (ks and ns and ls):
            raise ConfigError("sweep ranges must be non-empty")
        pts = {SweepPoint(float(k), float(n), float(l)) for k, n, l in itertools.product(ks, ns, ls)}
        return sorted(pts, key=lambda p: (p.kappa, p.nu, p.lam))

    def with_(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


# ------------------------------------------------------------------ parsing

def _floats(s: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in s.replace(";", ",").split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad number list {s!r}") from exc


def _complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"bad complex number {s!r}") from exc


def _get(cp, sec, key, conv, default):
    if cp.has_option(sec, key):
        raw = cp.get(sec, key)
        try:
            return conv(raw)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[{sec}] {key} = {raw!r}: {exc}") from exc
    return default


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse INI text on top of ``base`` (default :class:`ExperimentConfig`)."""
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    cfg = base or ExperimentConfig()
    known = {"system", "couplings", "sweep", "time", "initial_state", "spectral", "bounds", "output"}
    unknown = set(cp.sections()) - known
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")

    s = cfg.system
    try:
        system = SystemParams(_get(cp, "system", "B1", float, s.B1),
                              _get(cp, "system", "B2", float, s.B2),
                              _get(cp, "system", "beta", float, s.beta))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    c = cfg.couplings
    lam = _get(cp, "couplings", "lambda", float, c.lambda1)
    mu = _get(cp, "couplings", "mu", float, c.mu1)
    kap = _get(cp, "couplings", "kappa", float, c.kappa1)
    nu = _get(cp, "couplings", "nu", float, c.nu1)
    couplings = CouplingSet.symmetric(lam=lam, mu=mu, kappa=kap, nu=nu)

    kappas = _get(cp, "sweep", "kappa", _floats, cfg.kappas)
    nus = _get(cp, "sweep", "nu", _floats, cfg.nus)
    lambdas = _get(cp, "sweep", "lambda", _floats, cfg.lambdas)
    for name, vals in (("kappa", kappas), ("nu", nus), ("lambda", lambdas)):
        if cp.has_option("sweep", name) and not vals:
            raise ConfigError(f"[sweep] {name} is empty")

    tg = cfg.time
    t_end = _get(cp, "time", "t_end", float, None)
    t_end_scaled = _get(cp, "time", "t_end_scaled", float, None)
    if t_end is None and t_end_scaled is None:
        t_end, t_end_scaled = tg.t_end, tg.t_end_scaled
    time = TimeGrid(
        n_points=_get(cp, "time", "n_points", int, tg.n_points),
        t_start=_get(cp, "time", "t_start", float, tg.t_start),
        t_end=t_end,
        t_end_scaled=t_end_scaled,
        rescale=_get(cp, "time", "rescale", str.strip, tg.rescale),
    )

    initial = cfg.initial
    if cp.has_section("initial_state"):
        kind = _get(cp, "initial_state", "kind", str.strip, "braun")
        if kind == "braun":
            initial = BraunProduct()
        elif kind == "superposition":
            initial = SuperpositionFamily(_get(cp, "initial_state", "a1", _complex, 1.0),
                                          _get(cp, "initial_state", "a2", _complex, 1.0))
        elif kind == "explicit":
            raw = cp.get("initial_state", "matrix", fallback="")
            vals = [_complex(x) for x in raw.replace(";", ",").split(",") if x.strip()]
            if len(vals) != 16:
                raise ConfigError("[initial_state] matrix needs 16 row-major entries")
            try:
                initial = Explicit(DensityMatrix4(np.array(vals).reshape(4, 4)))
            except ValueError as exc:
                raise ConfigError(f"[initial_state] matrix: {exc}") from exc
        else:
            raise ConfigError(f"unknown initial_state kind {kind!r}")

    sp = cfg.spectral
    try:
        f = FormFactor(_get(cp, "spectral", "f_p", float, sp.f.p),
                       _get(cp, "spectral", "f_m", int, sp.f.m))
        g = FormFactor(_get(cp, "spectral", "g_p", float, sp.g.p),
                       _get(cp, "spectral", "g_m", int, sp.g.m))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    spectral = SpectralSpec(_get(cp, "spectral", "mode", str.strip, sp.mode), f, g,
                            _get(cp, "spectral", "u_c", float, sp.u_c))

    return replace(
        cfg,
        system=system, couplings=couplings, kappas=kappas, nus=nus, lambdas=lambdas,
        time=time, initial=initial, spectral=spectral,
        p=_get(cp, "bounds", "p", float, cfg.p),
        C_A=_get(cp, "bounds", "C_A", float, cfg.C_A),
        C_B=_get(cp, "bounds", "C_B", float, cfg.C_B),
        out_dir=Path(_get(cp, "output", "dir", str.strip, str(cfg.out_dir))),
        prefix=_get(cp, "output", "prefix", str.strip, cfg.prefix),
        fmt=_get(cp, "output", "format", str.strip, cfg.fmt),
    )


def load_config(path: str | Path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return parse_config(text, base)
