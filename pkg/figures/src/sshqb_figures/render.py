"""Pure CSV -> image transforms for every recognized result kind.

Rendering never recomputes physics; it sorts rows by their grid
coordinates (so row order in the CSV is irrelevant), applies a fixed
style, and writes images without timestamps, making output bytes a pure
function of the input tables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schemas import FIGURE_KINDS, SchemaError, Table, kind_for_file, load_table

BASE_RC = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "svg.hashsalt": "sshqb-figures",
}

ENERGY_LABEL = "energy (units of the spin frequency)"
TIME_LABEL = "t (units of inverse spin frequency)"


@dataclass(frozen=True)
class FigureSpec:
    """One rendering job: which CSVs, which layout, where to write."""

    kind: str
    inputs: tuple
    output: Path
    title: str | None = None
    xlim: tuple | None = None
    ylim: tuple | None = None

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "output", Path(self.output))

    @classmethod
    def from_json(cls, path: str | Path) -> "FigureSpec":
        data = json.loads(Path(path).read_text())
        known = {"kind", "inputs", "output", "title", "xlim", "ylim"}
        unknown = set(data) - known
        if unknown:
            raise SchemaError(f"unknown spec keys {sorted(unknown)}")
        for key in ("xlim", "ylim"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        return cls(**data)


def _ordered(table: Table, *coords: str) -> dict:
    order = np.lexsort(tuple(table.columns[c] for c in reversed(coords)))
    return {name: values[order] for name, values in table.columns.items()}


def _occupation_names(table: Table) -> list[str]:
    return [name for name in table.header if name.startswith("O_")]


def _curve_label(table: Table) -> str:
    return table.path.parent.name or table.path.stem


def _render_dynamics(tables, axes):
    for table in tables:
        cols = _ordered(table, "t")
        axes[0].plot(cols["t"], cols["dE"], label=_curve_label(table))
        axes[1].plot(cols["t"], cols["ergotropy"], label=_curve_label(table))
    axes[0].set_ylabel(f"charged {ENERGY_LABEL}")
    axes[1].set_ylabel(f"ergotropy, {ENERGY_LABEL}")
    for ax in axes:
        ax.set_xlabel(TIME_LABEL)


def _render_sweep(tables, axes):
    coord = tables[0].header[0]
    for table in tables:
        cols = _ordered(table, coord)
        axes[0].plot(cols[coord], cols["dE_max"], marker=".", label=_curve_label(table))
        axes[1].plot(cols[coord], cols["ergotropy"], marker=".", label=_curve_label(table))
    axes[0].set_ylabel(f"peak charged {ENERGY_LABEL}")
    axes[1].set_ylabel(f"peak ergotropy, {ENERGY_LABEL}")
    for ax in axes:
        ax.set_xlabel(coord)


def _render_spectrum(tables, axes):
    table = tables[0]
    cols = _ordered(table, "J")
    for name in table.header[1:]:
        axes[0].plot(cols["J"], cols[name], color="tab:blue", alpha=0.6, linewidth=0.9)
    axes[0].set_xlabel("J")
    axes[0].set_ylabel(f"battery levels, {ENERGY_LABEL}")


def _render_order_params(tables, axes):
    for table in tables:
        cols = _ordered(table, "J")
        axes[0].plot(cols["J"], cols["M_z"], label=_curve_label(table))
        axes[1].plot(cols["J"], cols["xi_z"], label=_curve_label(table))
    axes[0].set_ylabel("M_z")
    axes[1].set_ylabel("xi_z")
    for ax in axes:
        ax.set_xlabel("J")


def _render_heatmap(tables, axes):
    axes = np.atleast_2d(axes.reshape(len(tables), 2))
    for row, table in enumerate(tables):
        cols = _ordered(table, "J", "delta")
        j_values = np.unique(cols["J"])
        d_values = np.unique(cols["delta"])
        shape = (j_values.size, d_values.size)
        if cols["J"].size != shape[0] * shape[1]:
            raise SchemaError(f"{table.path}: grid is not a full cross product")
        for col, name in enumerate(("dE_max", "ergotropy")):
            grid = cols[name].reshape(shape)
            mesh = axes[row, col].pcolormesh(d_values, j_values, grid, shading="nearest")
            axes[row, col].figure.colorbar(mesh, ax=axes[row, col])
            axes[row, col].set_xlabel("delta")
            axes[row, col].set_ylabel("J")
            axes[row, col].set_title(f"{name} [{_curve_label(table)}]", fontsize=9)


def _render_occupations(tables, axes):
    for ax, table in zip(axes, tables):
        cols = _ordered(table, "delta")
        for name in _occupation_names(table):
            ax.plot(cols["delta"], cols[name], marker=".", label=name)
        ax.set_xlabel("delta")
        ax.set_ylabel("spin occupation")
        ax.set_title(_curve_label(table), fontsize=9)
        ax.legend(fontsize=7)


def _render_capacity(tables, axes):
    for table in tables:
        cols = _ordered(table, "delta")
        axes[0].plot(cols["delta"], cols["R_eb"],
                     marker=".", label=f"R_eb [{_curve_label(table)}]")
        axes[0].plot(cols["delta"], cols["R_epb"],
                     marker=".", linestyle="--", label=f"R_epb [{_curve_label(table)}]")
    axes[0].set_xlabel("delta")
    axes[0].set_ylabel("capacity ratio")
    axes[0].legend(fontsize=7)


def _render_tau_scaling(tables, axes):
    table = tables[0]
    modes = sorted(set(table.columns["nc_mode"]))
    for mode in modes:
        mask = table.columns["nc_mode"] == mode
        n = table.columns["N"][mask]
        tau = table.columns["tau_c"][mask]
        order = np.argsort(n)
        axes[0].loglog(n[order], tau[order], marker="o", label=str(mode))
    axes[0].set_xlabel("N")
    axes[0].set_ylabel("charging time tau_c")
    axes[0].legend(fontsize=8)


_RENDERERS = {
    "dynamics": (_render_dynamics, 2),
    "sweep": (_render_sweep, 2),
    "sweep-delta": (_render_sweep, 2),
    "spectrum": (_render_spectrum, 1),
    "order-params": (_render_order_params, 2),
    "heatmap": (_render_heatmap, None),  # 2 panels per input table
    "occupations": (_render_occupations, None),  # 1 panel per input table
    "capacity": (_render_capacity, 1),
    "tau-scaling": (_render_tau_scaling, 1),
}


def render(spec: FigureSpec) -> Path:
    """Render one figure; returns the written image path."""
    if not spec.inputs:
        raise SchemaError("figure spec lists no input CSVs")
    tables = [load_table(path, spec.kind) for path in spec.inputs]
    renderer, n_axes = _RENDERERS[spec.kind]

    with plt.rc_context(BASE_RC):
        if spec.kind == "heatmap":
            fig, axes = plt.subplots(len(tables), 2,
                                     figsize=(8.0, 3.2 * len(tables)),
                                     constrained_layout=True, squeeze=False)
            axes = axes.reshape(len(tables) * 2)
        elif spec.kind == "occupations":
            fig, axes = plt.subplots(1, len(tables),
                                     figsize=(4.2 * len(tables), 3.4),
                                     constrained_layout=True, squeeze=False)
            axes = axes.ravel()
        else:
            fig, axes = plt.subplots(1, n_axes, figsize=(4.2 * n_axes, 3.4),
                                     constrained_layout=True, squeeze=False)
            axes = axes.ravel()
        try:
            renderer(tables, axes)
            if len(tables) > 1 and spec.kind in ("dynamics", "sweep",
                                                 "sweep-delta", "order-params"):
                for ax in axes:
                    ax.legend(fontsize=8)
            if spec.title:
                fig.suptitle(spec.title)
            for ax in axes:
                if spec.xlim:
                    ax.set_xlim(*spec.xlim)
                if spec.ylim:
                    ax.set_ylim(*spec.ylim)
            spec.output.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(spec.output, metadata=_scrubbed_metadata(spec.output))
        finally:
            plt.close(fig)
    return spec.output


def _scrubbed_metadata(path: Path) -> dict:
    # Date-like fields would break byte-level reproducibility.
    if path.suffix.lower() == ".svg":
        return {"Date": None}
    if path.suffix.lower() == ".png":
        return {"Software": "sshqb-figures"}
    return {}


@dataclass
class RenderIndex:
    """Outcome of rendering a whole results directory."""

    rendered: list = field(default_factory=list)   # (csv, image) pairs
    failures: list = field(default_factory=list)   # (csv, message) pairs
    unrecognized: list = field(default_factory=list)
    index_path: Path | None = None


def render_all(results_dir: str | Path, out_dir: str | Path | None = None) -> RenderIndex:
    """Render every recognized CSV below a results tree, plus an index page.

    Unrecognized CSVs are listed; a corrupt CSV is reported without
    stopping the remaining figures.
    """
    results_dir = Path(results_dir)
    out_dir = Path(out_dir) if out_dir is not None else results_dir / "figures"
    index = RenderIndex()

    for csv_path in sorted(results_dir.rglob("*.csv")):
        kind = kind_for_file(csv_path)
        if kind is None:
            index.unrecognized.append(csv_path)
            continue
        image = out_dir / f"{csv_path.parent.name}-{csv_path.stem}.png"
        try:
            render(FigureSpec(kind=kind, inputs=(csv_path,), output=image))
        except (SchemaError, OSError, ValueError) as exc:
            index.failures.append((csv_path, f"{type(exc).__name__}: {exc}"))
            continue
        index.rendered.append((csv_path, image))

    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["# Rendered figures", ""]
    for csv_path, image in index.rendered:
        manifest = csv_path.parent / "manifest.json"
        manifest_note = str(manifest) if manifest.exists() else "(no manifest)"
        lines.append(f"- [{image.name}]({image.name}) <- `{csv_path}` (manifest: {manifest_note})")
    if index.failures:
        lines += ["", "## Failures", ""]
        lines += [f"- `{csv}`: {msg}" for csv, msg in index.failures]
    if index.unrecognized:
        lines += ["", "## Unrecognized CSVs", ""]
        lines += [f"- `{csv}`" for csv in index.unrecognized]
    index.index_path = out_dir / "index.md"
    index.index_path.write_text("\n".join(lines) + "\n")
    return index
