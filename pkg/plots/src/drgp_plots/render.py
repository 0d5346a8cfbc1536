"""Figure construction from manifest-listed CSV data.

Three figure kinds exist, one four-panel figure per group:

* ``heatmap``: correlation matrices on a symmetric [-1, 1] diverging scale,
  so sign structure is visible at a glance;
* ``bands``: 95% marginal intervals, all panels sharing one vertical range
  so measures are comparable;
* ``paths``: overlaid sample paths, same shared vertical range.

Panels are ordered nominal/worst-case across columns and prior/posterior
down the rows, with matching labels.
"""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpec", "MissingColumnError", "build_specs", "render", "render_manifest"]

DPI = 150

PANEL_ORDER = (
    ("nominal", "prior", "Nominal prior"),
    ("worst", "prior", "Worst-case prior"),
    ("nominal", "posterior", "Nominal posterior"),
    ("worst", "posterior", "Worst-case posterior"),
)


class MissingColumnError(RuntimeError):
    """A CSV lacks a column the figure kind requires."""

    def __init__(self, path, column):
        super().__init__(f"{path}: missing required column {column!r}")
        self.column = column


@dataclass(frozen=True)
class FigureSpec:
    """One output figure: its kind, panel inputs and destination."""

    kind: str                      # heatmap | bands | paths
    group: str                     # shared-axis group id, also the file stem
    inputs: tuple                  # ((measure, stage, title, csv path), ...)
    output: Path
    titles: tuple = field(default=())


def _read_csv(path: Path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise MissingColumnError(path, "x")
    header = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return header, data


def _column(path: Path, header, data, name):
    if name not in header:
        raise MissingColumnError(path, name)
    return data[:, header.index(name)]


def build_specs(manifest_path, outdir) -> list:
    """Derive figure specs from a run manifest."""
    manifest_path = Path(manifest_path)
    outdir = Path(outdir)
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    base = manifest_path.parent

    kinds = {"correlation": "heatmap", "bands": "bands", "paths": "paths"}
    grouped: dict = {}
    for entry in manifest.get("files", []):
        kind = kinds.get(entry.get("kind"))
        if kind is None:
            continue
        group = entry.get("group", entry["kind"])
        grouped.setdefault((kind, group), {})[(entry["measure"], entry["stage"])] = (
            base / entry["path"]
        )

    specs = []
    for (kind, group), panels in sorted(grouped.items()):
        inputs = []
        titles = []
        for measure, stage, title in PANEL_ORDER:
            path = panels.get((measure, stage))
            if path is None:
                continue
            inputs.append((measure, stage, title, path))
            titles.append(title)
        specs.append(
            FigureSpec(
                kind=kind,
                group=group,
                inputs=tuple(inputs),
                output=outdir / f"{group}.png",
                titles=tuple(titles),
            )
        )
    return specs


def _heatmap_figure(spec: FigureSpec):
    fig, axes = plt.subplots(2, 2, figsize=(9.2, 8.0), constrained_layout=True)
    last = None
    for ax, (measure, stage, title, path) in zip(axes.ravel(), spec.inputs):
        header, data = _read_csv(path)
        if header[0] != "x":
            raise MissingColumnError(path, "x")
        coords = data[:, 0]
        matrix = data[:, 1:]
        extent = (coords[0], coords[-1], coords[0], coords[-1])
        last = ax.imshow(
            matrix, origin="lower", extent=extent, vmin=-1.0, vmax=1.0,
            cmap="RdBu_r", interpolation="nearest",
        )
        ax.set_title(title)
        ax.set_xlabel("x")
        ax.set_ylabel("x'")
    fig.colorbar(last, ax=axes.ravel().tolist(), shrink=0.85, label="correlation")
    return fig


def _bands_figure(spec: FigureSpec):
    fig, axes = plt.subplots(2, 2, figsize=(9.2, 6.4), constrained_layout=True)
    lo, hi = np.inf, -np.inf
    for ax, (measure, stage, title, path) in zip(axes.ravel(), spec.inputs):
        header, data = _read_csv(path)
        x = _column(path, header, data, "x")
        mean = _column(path, header, data, "mean")
        lower = _column(path, header, data, "lower")
        upper = _column(path, header, data, "upper")
        ax.fill_between(x, lower, upper, alpha=0.35, color="tab:blue", linewidth=0)
        ax.plot(x, mean, color="tab:blue", linewidth=1.2)
        ax.set_title(title)
        ax.set_xlabel("x")
        lo = min(lo, float(lower.min()))
        hi = max(hi, float(upper.max()))
    pad = 0.05 * (hi - lo) if hi > lo else 0.5
    for ax in axes.ravel():
        ax.set_ylim(lo - pad, hi + pad)
    return fig


def _paths_figure(spec: FigureSpec):
    fig, axes = plt.subplots(2, 2, figsize=(9.2, 6.4), constrained_layout=True)
    lo, hi = np.inf, -np.inf
    for ax, (measure, stage, title, path) in zip(axes.ravel(), spec.inputs):
        header, data = _read_csv(path)
        x = _column(path, header, data, "x")
        series = [name for name in header if name.startswith("path_")]
        if not series:
            raise MissingColumnError(path, "path_1")
        for name in series:
            y = _column(path, header, data, name)
            ax.plot(x, y, linewidth=1.0)
            lo = min(lo, float(y.min()))
            hi = max(hi, float(y.max()))
        ax.set_title(title)
        ax.set_xlabel("x")
    pad = 0.05 * (hi - lo) if hi > lo else 0.5
    for ax in axes.ravel():
        ax.set_ylim(lo - pad, hi + pad)
    return fig


_BUILDERS = {"heatmap": _heatmap_figure, "bands": _bands_figure, "paths": _paths_figure}


def build_figure(spec: FigureSpec):
    """Construct the matplotlib figure for a spec without saving it."""
    try:
        builder = _BUILDERS[spec.kind]
    except KeyError:
        raise ValueError(f"unknown figure kind {spec.kind!r}") from None
    return builder(spec)


def render(spec: FigureSpec) -> Path:
    """Render one spec to its output path."""
    fig = build_figure(spec)
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, dpi=DPI)
    plt.close(fig)
    return spec.output


def render_manifest(manifest_path, outdir) -> list:
    """Render every figure group found in a manifest; returns written paths."""
    specs = build_specs(manifest_path, outdir)
    return [render(spec) for spec in specs]
