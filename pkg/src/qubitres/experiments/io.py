"""CSV and plot-script emission."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .figures import TimeSeries

__all__ = ["COLUMNS", "ENTRY_ORDER", "emit", "write_series_csv", "read_series_csv",
           "write_table_csv", "write_plot_script"]

#: upper triangle row-major, then the diagonal (0-based index pairs)
ENTRY_ORDER: tuple[tuple[int, int], ...] = tuple(
    [(m, n) for m in range(4) for n in range(m + 1, 4)] + [(m, m) for m in range(4)]
)

COLUMNS: tuple[str, ...] = ("t", "rescaled_t") + tuple(
    f"{part}_rho{m + 1}{n + 1}" for m, n in ENTRY_ORDER for part in ("re", "im")
) + ("concurrence", "min_eig")

FMT = "%.17g"


def _fmt(x: float) -> str:
    return FMT % x


def _rows(ts: TimeSeries):
    for i in range(len(ts)):
        row = [ts.t[i], ts.rescaled_t[i]]
        for m, n in ENTRY_ORDER:
            z = ts.rho[i, m, n]
            row += [z.real, z.imag]
        row += [ts.concurrence[i], ts.min_eig[i]]
        yield [_fmt(float(v)) for v in row]


def _safe(label: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "._=-" else "_" for ch in label)


def write_series_csv(ts: TimeSeries | None, path: Path) -> Path:
    """One time series (or only the header when ``ts`` is None)."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(COLUMNS)
            if ts is not None:
                w.writerows(_rows(ts))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def read_series_csv(path: Path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = [[float(x) for x in row] for row in r]
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    return {h: arr[:, j] for j, h in enumerate(header)}


def write_table_csv(rows: Sequence[dict], path: Path) -> Path:
    """Summary table; columns are the union of keys in first-seen order."""
    path = Path(path)
    cols: list[str] = []
    for row in rows:
        for k in row:
            if k not in cols:
                cols.append(k)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for row in rows:
                out = []
                for k in cols:
                    v = row.get(k, "")
                    if isinstance(v, bool):
                        out.append(str(v).lower())
                    elif isinstance(v, (float, np.floating)):
                        out.append(_fmt(float(v)) if not math.isnan(v) else "nan")
                    else:
                        out.append(str(v))
                w.writerow(out)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


_PLOT_TEMPLATE = '''"""Plot concurrence series from CSV files written next to this script."""
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
SETS = {sets}
NORMALIZE = {normalize}


def load(name):
    with (HERE / name).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    x = [float(r["rescaled_t"]) for r in rows]
    c = [float(r["concurrence"]) for r in rows]
    return x, c


for title, files in SETS.items():
    fig, ax = plt.subplots()
    for name in files:
        x, c = load(name)
        if NORMALIZE and max(c) > 0:
            c = [v / max(c) for v in c]
        ax.plot(x, c, label=Path(name).stem)
    ax.set_xlabel("rescaled t")
    ax.set_ylabel("C / C_max" if NORMALIZE else "C")
    ax.set_title(title)
    ax.legend(fontsize="small")
    fig.savefig(HERE / (title + ".png"), dpi=120)
    plt.close(fig)
'''


def write_plot_script(sets: dict[str, list[str]], path: Path, normalize: bool = False) -> Path:
    """Script that renders one figure per entry of ``sets`` (title -> CSV file names)."""
    path = Path(path)
    text = _PLOT_TEMPLATE.format(sets=json.dumps(sets, indent=4, sort_keys=True),
                                 normalize=bool(normalize))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def emit(series: Iterable[TimeSeries], out_dir: Path, prefix: str = "run",
         fmt: str = "csv", normalize: bool = False) -> list[Path]:
    """Write one CSV per series; with ``fmt='plot'`` also a plot script.

    An empty series set produces a single header-only ``<prefix>.csv``.
    """
    if fmt not in ("csv", "plot"):
        raise ValueError(f"unknown format {fmt!r}")
    out_dir = Path(out_dir)
    series = list(series)
    written: list[Path] = []
    if not series:
        written.append(write_series_csv(None, out_dir / f"{prefix}.csv"))
    for ts in series:
        written.append(write_series_csv(ts, out_dir / f"{prefix}_{_safe(ts.label)}.csv"))
    if fmt == "plot":
        names = [p.name for p in written]
        written.append(write_plot_script({prefix: names}, out_dir / f"{prefix}_plot.py", normalize))
    return written
