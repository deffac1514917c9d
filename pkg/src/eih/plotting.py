"""Figure data for the CLI: tidy long-format CSV plus a matplotlib rendering.

Every figure is first built as rows ``(figure, series, x, y)``; the CSV and
the PNG are both written from those rows, so the picture never shows
anything the CSV does not contain.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path as FsPath

import numpy as np

CSV_HEADER = ["figure", "series", "x", "y"]


@dataclass
class FigureData:
    name: str
    xlabel: str
    ylabel: str
    title: str = ""
    logx: bool = False
    logy: bool = False
    series: dict[str, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    styles: dict[str, dict] = field(default_factory=dict)

    def add(self, name: str, x, y, **style) -> "FigureData":
        self.series[name] = (np.asarray(x, dtype=float).ravel(), np.asarray(y, dtype=float).ravel())
        if style:
            self.styles[name] = style
        return self

    def rows(self):
        for s, (xs, ys) in self.series.items():
            for x, y in zip(xs, ys):
                yield self.name, s, float(x), float(y)


def write_plot_csv(figures: list[FigureData], dest) -> None:
    own = isinstance(dest, (str, FsPath))
    fh = open(dest, "w", newline="", encoding="utf-8") if own else dest
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for fig in figures:
            for name, s, x, y in fig.rows():
                w.writerow([name, s, repr(x), repr(y)])
    finally:
        if own:
            fh.close()


def read_plot_csv(src) -> dict[str, dict[str, tuple[np.ndarray, np.ndarray]]]:
    out: dict[str, dict[str, list]] = {}
    with open(src, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            fig = out.setdefault(row["figure"], {})
            xs, ys = fig.setdefault(row["series"], ([], []))
            xs.append(float(row["x"]))
            ys.append(float(row["y"]))
    return {f: {s: (np.array(x), np.array(y)) for s, (x, y) in ss.items()} for f, ss in out.items()}


def render(figures: list[FigureData], dest) -> None:
    """One panel per figure, stacked vertically, saved to ``dest``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    n = len(figures)
    fig, axes = plt.subplots(n, 1, figsize=(6.4, 3.6 * n), squeeze=False)
    for ax, data in zip(axes[:, 0], figures):
        for name, (xs, ys) in data.series.items():
            style = {"lw": 1.2}
            if len(xs) <= 12:
                style["marker"] = "o"
            style.update(data.styles.get(name, {}))
            ax.plot(xs, ys, label=name, **style)
        if data.logx:
            ax.set_xscale("log")
        if data.logy:
            ax.set_yscale("log")
        ax.set_xlabel(data.xlabel)
        ax.set_ylabel(data.ylabel)
        if data.title:
            ax.set_title(data.title, fontsize=10)
        if 1 < len(data.series) <= 10:
            ax.legend(fontsize=8, frameon=False)
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(dest, dpi=120)
    plt.close(fig)
