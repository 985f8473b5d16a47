import numpy as np
import pytest

RNG = np.random.default_rng(13)


def format_row(cells):
    out = []
    for cell in cells:
        out.append(cell if isinstance(cell, str) else f"{float(cell):.12g}")
    return ",".join(out)


def write_table(path, header, rows, comment="# sshqb test params_hash=deadbeef"):
    lines = [comment, ",".join(header)]
    lines += [format_row(row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


RECORD_TAIL = ["tau_c", "dE_max", "ergotropy", "E_G", "E_max",
               "R_eb", "R_epb", "M_z", "xi_z", "k_g"]


def record_row(coords, n_spins=3):
    body = [0.4, 2.0, 1.5, -1.0, 3.0, 0.5, 0.4, -0.6, 0.4, 1]
    occ = list(RNG.uniform(0, 1, n_spins))
    return list(coords) + body + occ


@pytest.fixture
def sample_tables(tmp_path):
    """One schema-valid CSV of every kind, keyed by simulator command name."""
    tables = {}
    tables["dynamics"] = write_table(
        tmp_path / "dynamics.csv",
        ["t", "E_B", "dE", "ergotropy", "norm_err", "n_exc", "e_total"],
        [[0.1 * k, np.sin(0.1 * k), abs(np.sin(0.1 * k)), 0.3, 1e-12, 11.0, 5.0]
         for k in range(20)])
    tables["sweep-j"] = write_table(
        tmp_path / "sweep-j.csv",
        ["J"] + RECORD_TAIL + ["O_1", "O_2", "O_3"],
        [record_row([0.5 * k]) for k in range(5)])
    tables["sweep-delta"] = write_table(
        tmp_path / "sweep-delta.csv",
        ["delta"] + RECORD_TAIL + ["O_1", "O_2", "O_3"],
        [record_row([-1.0 + 0.5 * k]) for k in range(5)])
    tables["heatmap"] = write_table(
        tmp_path / "heatmap.csv",
        ["J", "delta"] + RECORD_TAIL + ["O_1", "O_2", "O_3"],
        [record_row([j, d]) for j in (0.5, 1.0) for d in (-0.5, 0.0, 0.5)])
    tables["spectrum"] = write_table(
        tmp_path / "spectrum.csv",
        ["J", "lam_0", "lam_1", "lam_2"],
        [[0.2 * k, -k * 0.1, 0.5, 1.0 + 0.1 * k] for k in range(8)])
    tables["order-params"] = write_table(
        tmp_path / "order-params.csv",
        ["J", "M_z", "xi_z", "k_g", "E_G"],
        [[0.2 * k, -1.0 + 0.1 * k, 1.0 - 0.05 * k, k % 3, -0.2 * k] for k in range(8)])
    tables["occupations"] = write_table(
        tmp_path / "occupations.csv",
        ["delta", "O_1", "O_2", "O_3"],
        [[-1.0 + 0.4 * k, 0.3, 0.4, 0.5] for k in range(6)])
    tables["capacity"] = write_table(
        tmp_path / "capacity.csv",
        ["delta", "R_eb", "R_epb"],
        [[-1.0 + 0.4 * k, 0.9 - 0.05 * k, 0.8 - 0.05 * k] for k in range(6)])
    tables["tau-scaling"] = write_table(
        tmp_path / "tau-scaling.csv",
        ["nc_mode", "N", "n_c", "tau_c", "dE_max", "ergotropy"],
        [["scaled", n, 2 * n + 1, 1.0 / np.sqrt(n), 1.0, 0.8] for n in (2, 3, 4)]
        + [["fixed", n, 9, 1.2 / np.sqrt(n), 1.0, 0.8] for n in (2, 3, 4)])
    return tables
