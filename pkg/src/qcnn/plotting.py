"""Deterministic SVG line plots of rejection probabilities and differences."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .evaluation import EvalRow  # noqa: E402

LABELS = {
    "p_n": "network rejection probability",
    "p_s": "rule rejection probability",
    "delta_p": "difference in rejection probability",
    "delta_p_rel": "relative difference",
}

_STYLE = {
    "svg.hashsalt": "qcnn",
    "svg.fonttype": "none",
    "font.size": 9,
}


def _axis_rows(rows, axis):
    if axis == "sigma":
        return [r for r in rows if r.mu == 0.0], (lambda r: r.sigma), "sigma (SD units)"
    return [r for r in rows if r.sigma == 1.0], (lambda r: r.mu), "mu (SD units)"


def plot_series(rows: list[EvalRow], path, column: str, axis: str, series: str, title: str) -> Path:
    """One line per distinct value of ``series`` ("a" or "k") against ``axis``."""
    if column not in LABELS:
        raise ValueError(f"unknown column {column!r}")
    selected, xfn, xlabel = _axis_rows(rows, axis)
    if not selected:
        raise ValueError(f"no rows on the {axis} axis for {title}")
    groups = defaultdict(list)
    for r in selected:
        groups[getattr(r, series)].append(r)
    path = Path(path)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for key in sorted(groups):
            pts = sorted(groups[key], key=xfn)
            ax.plot([xfn(r) for r in pts], [getattr(r, column) for r in pts],
                    linewidth=1.0, label=f"{series}={key}")
        if column.startswith("delta"):
            ax.axhline(0.0, color="black", linewidth=0.5)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(LABELS[column])
        ax.set_title(title)
        ax.legend(fontsize=7, ncol=2)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


def emit_plots(rows: Iterable[EvalRow], out_dir, column: str = "p_n") -> list[Path]:
    """Plot vs sigma and vs mu for every (n, k), one series per a.

    With a single a per (n, k) the series collapse to one line, so a per-(a, n)
    family with one series per k is written as well.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("cannot plot an empty table")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    by_nk = defaultdict(list)
    by_an = defaultdict(list)
    for r in rows:
        by_nk[(r.n, r.k)].append(r)
        by_an[(r.a, r.n)].append(r)
    for (n, k), group in sorted(by_nk.items()):
        for axis in ("sigma", "mu"):
            if _axis_rows(group, axis)[0]:
                written.append(plot_series(group, out_dir / f"{column}_n{n}_k{k}_vs_{axis}.svg",
                                           column, axis, "a", f"n={n}, k={k}"))
    for (a, n), group in sorted(by_an.items()):
        for axis in ("sigma", "mu"):
            if _axis_rows(group, axis)[0]:
                written.append(plot_series(group, out_dir / f"{column}_a{a}_n{n}_vs_{axis}.svg",
                                           column, axis, "k", f"a={a}, n={n}"))
    return written
