"""Command-line front end: config resolution, dispatch, CSV + manifest output.

Every sub-command writes ``<command>.csv`` plus ``manifest.json`` into the
output directory.  CSV values carry 12 significant digits behind a single
``#`` metadata line, so outputs diff cleanly and reproduce bit-for-bit from
the manifest's config echo.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import COARSE_SCAN_DT, default_scan_window, trajectory
from .errors import SimulationError
from .hilbert import ModelParams
from .spectral import detect_ground_crossings, spectrum_vs_j
from .sweeps import (
    DEFAULT_DELTA_GRID,
    DEFAULT_HEATMAP_J_GRID,
    DEFAULT_J_GRID,
    grid_points,
    heatmap_j_delta,
    order_param_sweep,
    sweep_delta,
    sweep_hopping,
    tau_scaling,
)

CONSERVATION_TOL = 1e-9
MODE_AGREEMENT_TOL = 1e-9

COMMANDS = ("dynamics", "sweep-j", "spectrum", "order-params", "sweep-delta",
            "heatmap", "occupations", "capacity", "tau-scaling")

# Keys accepted in a config file; each maps 1:1 onto the CLI flag --<key>.
KEY_TYPES = {
    "N": int, "J": float, "delta": float, "nc": int, "g": float,
    "omega-a": float, "omega-c": float, "dt": float, "t-max": float,
    "mode": str, "out": str, "grid-j": str, "grid-delta": str,
    "levels": int, "n-list": str, "nc-modes": str,
}

DEFAULTS = {
    "N": 5, "J": 1.0, "delta": 0.0, "nc": None, "g": 1.0,
    "omega-a": 1.0, "omega-c": 1.0, "dt": COARSE_SCAN_DT, "t-max": None,
    "mode": "sector", "out": None, "grid-j": None, "grid-delta": None,
    "levels": None, "n-list": "2,3,4,5,6", "nc-modes": "scaled,fixed",
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings of one CLI invocation."""

    command: str
    params: ModelParams
    mode: str
    out_dir: Path
    dt: float
    t_max: float | None
    grid_j: tuple[float, float, float]
    grid_delta: tuple[float, float, float]
    levels: int | None
    n_list: tuple[int, ...]
    nc_modes: tuple[str, ...]
    echo: dict


def parse_config_file(path: str | Path) -> dict:
    """Flat ``key = value`` file; '#' starts a comment, unknown keys rejected."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in KEY_TYPES:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = KEY_TYPES[key](value)
    return values


def _parse_grid(spec: str) -> tuple[float, float, float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid spec must be LO:HI:STEP, got {spec!r}")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ValueError(f"bad grid spec {spec!r}")
    return lo, hi, step


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sshqb",
        description="Charging simulator for a cavity-coupled dimerized spin-chain battery")
    parser.add_argument("--version", action="version", version=f"sshqb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file; flags win")
    common.add_argument("--N", type=int, dest="N", help="number of spins")
    common.add_argument("--J", type=float, dest="J", help="hopping strength")
    common.add_argument("--delta", type=float, help="dimerization parameter in [-1, 1]")
    common.add_argument("--nc", type=int, help="initial cavity photon number (default 2N+1)")
    common.add_argument("--g", type=float, help="spin-cavity coupling")
    common.add_argument("--omega-a", type=float, help="spin frequency")
    common.add_argument("--omega-c", type=float, help="cavity frequency")
    common.add_argument("--dt", type=float, help="trajectory/scan sample step")
    common.add_argument("--t-max", type=float, help="trajectory/scan horizon")
    common.add_argument("--mode", choices=("sector", "full", "both"),
                        help="execution space (default sector)")
    common.add_argument("--out", help="output directory (default results/<command>)")
    common.add_argument("--grid-j", help="hopping grid LO:HI:STEP")
    common.add_argument("--grid-delta", help="dimerization grid LO:HI:STEP")
    common.add_argument("--levels", type=int, help="number of spectrum levels to keep")
    common.add_argument("--n-list", help="comma-separated chain lengths (tau-scaling)")
    common.add_argument("--nc-modes", help="photon-number modes: scaled,fixed (tau-scaling)")

    help_lines = {
        "dynamics": "time-resolved energy/ergotropy of one charging run",
        "sweep-j": "peak energy/ergotropy vs hopping strength",
        "spectrum": "battery spectrum vs hopping strength",
        "order-params": "ground-state ordering parameters vs hopping",
        "sweep-delta": "peak energy/ergotropy vs dimerization",
        "heatmap": "peak energy/ergotropy over the (J, delta) plane",
        "occupations": "per-spin occupations at the charging time vs dimerization",
        "capacity": "capacity ratios vs dimerization",
        "tau-scaling": "charging time vs chain length",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=help_lines[name])
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file and flags (flags win) into a RunConfig."""
    settings = dict(DEFAULTS)
    if args.config:
        settings.update(parse_config_file(args.config))
    for key in KEY_TYPES:
        flag_value = getattr(args, key.replace("-", "_"))
        if flag_value is not None:
            settings[key] = flag_value

    command = args.command
    params = ModelParams(
        n_spins=settings["N"],
        hopping=settings["J"],
        delta=settings["delta"],
        g=settings["g"],
        omega_a=settings["omega-a"],
        omega_c=settings["omega-c"],
        n_photons=settings["nc"],
    )
    if settings["levels"] is not None and settings["levels"] < 1:
        raise ValueError(f"levels must be >= 1, got {settings['levels']}")
    grid_j = _parse_grid(settings["grid-j"]) if settings["grid-j"] else (
        DEFAULT_HEATMAP_J_GRID if command == "heatmap" else DEFAULT_J_GRID)
    grid_delta = (_parse_grid(settings["grid-delta"]) if settings["grid-delta"]
                  else DEFAULT_DELTA_GRID)
    n_list = tuple(int(n) for n in str(settings["n-list"]).split(",") if n.strip())
    nc_modes = tuple(m.strip() for m in str(settings["nc-modes"]).split(",") if m.strip())
    out_dir = Path(settings["out"]) if settings["out"] else Path("results") / command

    echo = {
        "command": command,
        "N": params.n_spins, "J": params.hopping, "delta": params.delta,
        "nc": params.n_photons, "g": params.g,
        "omega-a": params.omega_a, "omega-c": params.omega_c,
        "dt": settings["dt"], "t-max": settings["t-max"],
        "mode": settings["mode"],
        "grid-j": ":".join(f"{v:g}" for v in grid_j),
        "grid-delta": ":".join(f"{v:g}" for v in grid_delta),
        "levels": settings["levels"], "n-list": ",".join(str(n) for n in n_list),
        "nc-modes": ",".join(nc_modes),
    }
    return RunConfig(command, params, settings["mode"], out_dir, settings["dt"],
                     settings["t-max"], grid_j, grid_delta, settings["levels"],
                     n_list, nc_modes, echo)


def params_hash(echo: dict) -> str:
    payload = {k: v for k, v in echo.items() if k != "out"}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def write_csv(path: Path, comment: str, header: list[str], rows) -> None:
    lines = [f"# {comment}", ",".join(header)]
    lines.extend(",".join(_format_cell(cell) for cell in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _record_header(coords: list[str], n_spins: int) -> list[str]:
    occ = [f"O_{i}" for i in range(1, n_spins + 1)]
    return coords + ["tau_c", "dE_max", "ergotropy", "E_G", "E_max",
                     "R_eb", "R_epb", "M_z", "xi_z", "k_g"] + occ


def _record_row(rec, coords: list[float]) -> list:
    return coords + [rec.tau_c, rec.de_max, rec.ergotropy, rec.e_ground, rec.e_top,
                     rec.r_eb, rec.r_epb, rec.m_z, rec.xi_z, rec.k_ground,
                     *rec.occupations]


def _conservation_of(records) -> dict:
    if not records:
        return {"max_norm_error": 0.0, "max_n_exc_drift": 0.0, "max_e_total_drift": 0.0}
    return {
        "max_norm_error": max(r.norm_error for r in records),
        "max_n_exc_drift": max(r.n_exc_drift for r in records),
        "max_e_total_drift": max(r.e_total_drift for r in records),
    }


def _compute(config: RunConfig, mode: str):
    """Run one command in one execution mode.

    Returns (header, rows, conservation summary, manifest extras).
    """
    params = config.params
    no_dynamics = {"max_norm_error": 0.0, "max_n_exc_drift": 0.0,
                   "max_e_total_drift": 0.0}

    if config.command == "dynamics":
        t_max = config.t_max if config.t_max is not None else default_scan_window(params)
        traj = trajectory(params, t_max, config.dt, mode)
        header = ["t", "E_B", "dE", "ergotropy", "norm_err", "n_exc", "e_total"]
        rows = list(zip(traj.times, traj.e_battery, traj.de, traj.ergotropy,
                        traj.norm_error, traj.n_exc, traj.e_total))
        conservation = {
            "max_norm_error": traj.max_norm_error,
            "max_n_exc_drift": traj.n_exc_drift,
            "max_e_total_drift": traj.e_total_drift,
        }
        return header, rows, conservation, {}

    scan = {"dt": config.dt, "t_max": config.t_max}

    if config.command == "sweep-j":
        records = sweep_hopping(params, grid_points(*config.grid_j), mode, **scan)
        header = _record_header(["J"], params.n_spins)
        rows = [_record_row(r, [r.hopping]) for r in records]
        return header, rows, _conservation_of(records), {}

    if config.command == "sweep-delta":
        records = sweep_delta(params, grid_points(*config.grid_delta), mode, **scan)
        header = _record_header(["delta"], params.n_spins)
        rows = [_record_row(r, [r.delta]) for r in records]
        return header, rows, _conservation_of(records), {}

    if config.command == "heatmap":
        records = heatmap_j_delta(params, grid_points(*config.grid_j),
                                  grid_points(*config.grid_delta), mode, **scan)
        header = _record_header(["J", "delta"], params.n_spins)
        rows = [_record_row(r, [r.hopping, r.delta]) for r in records]
        return header, rows, _conservation_of(records), {}

    if config.command == "occupations":
        records = sweep_delta(params, grid_points(*config.grid_delta), mode, **scan)
        header = ["delta"] + [f"O_{i}" for i in range(1, params.n_spins + 1)]
        rows = [[r.delta, *r.occupations] for r in records]
        return header, rows, _conservation_of(records), {}

    if config.command == "capacity":
        records = sweep_delta(params, grid_points(*config.grid_delta), mode, **scan)
        header = ["delta", "R_eb", "R_epb"]
        rows = [[r.delta, r.r_eb, r.r_epb] for r in records]
        return header, rows, _conservation_of(records), {}

    if config.command == "spectrum":
        table = spectrum_vs_j(params, grid_points(*config.grid_j), config.levels)
        n_levels = table.levels.shape[1]
        header = ["J"] + [f"lam_{k}" for k in range(n_levels)]
        rows = [[j, *row] for j, row in zip(table.j_values, table.levels)]
        return header, rows, no_dynamics, {}

    if config.command == "order-params":
        grid = grid_points(*config.grid_j)
        records = order_param_sweep(params, grid)
        header = ["J", "M_z", "xi_z", "k_g", "E_G"]
        rows = [[r.hopping, r.m_z, r.xi_z, r.k_ground, r.e_ground] for r in records]
        crossings = detect_ground_crossings(params, grid)
        return header, rows, no_dynamics, {"ground_crossings": crossings}

    if config.command == "tau-scaling":
        header = ["nc_mode", "N", "n_c", "tau_c", "dE_max", "ergotropy"]
        rows = []
        exponents = {}
        conservation = dict(no_dynamics)
        for nc_mode in config.nc_modes:
            result = tau_scaling(params, config.n_list, nc_mode, mode, **scan)
            exponents[nc_mode] = result.exponent
            for rec in result.records:
                rows.append([nc_mode, rec.n_spins, rec.n_photons,
                             rec.tau_c, rec.de_max, rec.ergotropy])
            summary = _conservation_of(result.records)
            for key in conservation:
                conservation[key] = max(conservation[key], summary[key])
        return header, rows, conservation, {"fitted_exponents": exponents}

    raise ValueError(f"unknown command {config.command!r}")


def _compare_rows(rows_a, rows_b) -> float:
    """Maximum absolute difference over all numeric cells of two row sets."""
    if len(rows_a) != len(rows_b):
        raise SimulationError("execution modes produced different row counts")
    worst = 0.0
    for row_a, row_b in zip(rows_a, rows_b):
        for cell_a, cell_b in zip(row_a, row_b):
            if isinstance(cell_a, str) or isinstance(cell_b, str):
                if cell_a != cell_b:
                    raise SimulationError("execution modes produced different labels")
                continue
            worst = max(worst, abs(float(cell_a) - float(cell_b)))
    return worst


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    config.out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "artifact": {"name": "sshqb", "version": __version__},
        "command": config.command,
        "config": config.echo,
        "params_hash": params_hash(config.echo),
        "timings_s": {},
        "warnings": [],
    }
    status = 0
    started = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if config.mode == "both":
                header, rows, conservation, extras = _compute(config, "sector")
                t_sector = time.perf_counter()
                _, rows_full, conservation_full, _ = _compute(config, "full")
                worst = _compare_rows(rows, rows_full)
                manifest["timings_s"]["sector"] = round(t_sector - started, 6)
                manifest["timings_s"]["full"] = round(time.perf_counter() - t_sector, 6)
                manifest["mode_comparison"] = {
                    "max_abs_difference": worst,
                    "tolerance": MODE_AGREEMENT_TOL,
                    "agreed": worst <= MODE_AGREEMENT_TOL,
                }
                for key in conservation:
                    conservation[key] = max(conservation[key], conservation_full[key])
                if worst > MODE_AGREEMENT_TOL:
                    manifest["error"] = "execution modes disagree beyond tolerance"
                    status = 1
            else:
                header, rows, conservation, extras = _compute(config, config.mode)
                manifest["timings_s"]["compute"] = round(time.perf_counter() - started, 6)
        manifest["warnings"] = sorted({str(w.message) for w in caught})
        manifest["conservation"] = dict(conservation,
                                        tolerance=CONSERVATION_TOL)
        manifest.update(extras)
        if max(conservation.values()) > CONSERVATION_TOL:
            manifest["error"] = "conservation diagnostics exceeded tolerance"
            status = 1

        write_started = time.perf_counter()
        csv_path = config.out_dir / f"{config.command}.csv"
        write_csv(csv_path, f"sshqb {config.command} params_hash={manifest['params_hash']}",
                  header, rows)
        manifest["timings_s"]["write"] = round(time.perf_counter() - write_started, 6)
        manifest["outputs"] = [csv_path.name]
    except SimulationError as exc:
        manifest["error"] = f"{type(exc).__name__}: {exc}"
        status = 1

    (config.out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    if status != 0:
        print(f"sshqb {config.command}: FAILED ({manifest.get('error', 'see manifest')})",
              file=sys.stderr)
    return status


def _glue_grid_values(argv: list[str]) -> list[str]:
    """Join grid flags with values like -1:1:0.1 so argparse accepts them."""
    glued = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if token in ("--grid-j", "--grid-delta") and i + 1 < len(argv) \
                and argv[i + 1].startswith("-") and ":" in argv[i + 1]:
            glued.append(f"{token}={argv[i + 1]}")
            skip = True
        else:
            glued.append(token)
    return glued


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_glue_grid_values(list(argv)))
    try:
        config = resolve_config(args)
    except (ValueError, OSError) as exc:
        parser.exit(2, f"sshqb: error: {exc}\n")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
