"""CSV schema contracts shared with the simulator CLI.

Each figure kind accepts exactly one documented header layout; anything
else is rejected loudly so upstream schema drift cannot produce silently
wrong plots.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SchemaError(Exception):
    """CSV header or body does not match the documented contract."""


RECORD_TAIL = ["tau_c", "dE_max", "ergotropy", "E_G", "E_max",
               "R_eb", "R_epb", "M_z", "xi_z", "k_g"]

# figure kind -> (coordinate columns, fixed columns, variadic column prefix)
_SCHEMAS = {
    "dynamics": (["t"], ["E_B", "dE", "ergotropy", "norm_err", "n_exc", "e_total"], None),
    "sweep": (["J"], RECORD_TAIL, "O_"),
    "sweep-delta": (["delta"], RECORD_TAIL, "O_"),
    "spectrum": (["J"], [], "lam_"),
    "order-params": (["J"], ["M_z", "xi_z", "k_g", "E_G"], None),
    "heatmap": (["J", "delta"], RECORD_TAIL, "O_"),
    "occupations": (["delta"], [], "O_"),
    "capacity": (["delta"], ["R_eb", "R_epb"], None),
    "tau-scaling": (["nc_mode", "N", "n_c"], ["tau_c", "dE_max", "ergotropy"], None),
}

# simulator sub-command (= CSV stem) -> figure kind
KIND_BY_STEM = {
    "dynamics": "dynamics",
    "sweep-j": "sweep",
    "sweep-delta": "sweep-delta",
    "spectrum": "spectrum",
    "order-params": "order-params",
    "heatmap": "heatmap",
    "occupations": "occupations",
    "capacity": "capacity",
    "tau-scaling": "tau-scaling",
}

FIGURE_KINDS = tuple(_SCHEMAS)

_STRING_COLUMNS = {"nc_mode"}


@dataclass(frozen=True)
class Table:
    """One validated CSV: named columns plus the raw header order."""

    kind: str
    path: Path
    header: tuple[str, ...]
    columns: dict


def validate_header(kind: str, header: list[str]) -> None:
    if kind not in _SCHEMAS:
        raise SchemaError(f"unknown figure kind {kind!r}")
    coords, fixed, variadic = _SCHEMAS[kind]
    expected_prefix = coords + fixed
    if header[: len(expected_prefix)] != expected_prefix:
        raise SchemaError(
            f"{kind}: header must start with {expected_prefix}, got {header[: len(expected_prefix)]}")
    rest = header[len(expected_prefix):]
    if variadic is None:
        if rest:
            raise SchemaError(f"{kind}: unexpected trailing columns {rest}")
        return
    if not rest:
        raise SchemaError(f"{kind}: expected at least one {variadic}* column")
    for k, name in enumerate(rest):
        if name != f"{variadic}{k + (1 if variadic == 'O_' else 0)}":
            raise SchemaError(f"{kind}: unexpected column {name!r} at position {len(expected_prefix) + k}")


def read_csv(path: str | Path) -> tuple[str, list[str], list[list[str]]]:
    """Split a simulator CSV into (comment, header, string rows)."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise SchemaError(f"{path}: missing comment line")
    if len(lines) < 2:
        raise SchemaError(f"{path}: missing header line")
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:] if line.strip()]
    return lines[0], header, rows


def load_table(path: str | Path, kind: str) -> Table:
    """Read and validate one CSV; numeric columns become float arrays."""
    path = Path(path)
    _, header, rows = read_csv(path)
    validate_header(kind, header)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    for row in rows:
        if len(row) != len(header):
            raise SchemaError(f"{path}: row with {len(row)} cells, header has {len(header)}")
    columns = {}
    for k, name in enumerate(header):
        cells = [row[k] for row in rows]
        if name in _STRING_COLUMNS:
            columns[name] = np.array(cells)
        else:
            try:
                columns[name] = np.array([float(c) for c in cells])
            except ValueError as exc:
                raise SchemaError(f"{path}: non-numeric cell in column {name!r}: {exc}") from None
    return Table(kind, path, tuple(header), columns)


def kind_for_file(path: str | Path) -> str | None:
    return KIND_BY_STEM.get(Path(path).stem)
