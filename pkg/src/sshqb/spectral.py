"""Eigendecomposition, ground-state extraction and level-crossing detection."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGroundStateWarning, GridTooCoarseError
from .hilbert import ModelParams, check_hermitian, popcounts
from .model import battery_hamiltonian

DEGENERACY_TOL = 1e-9
CROSSING_ACCURACY = 1e-6


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class GroundState:
    """Lowest eigenpair of a battery Hamiltonian.

    ``excitations`` is the spin-excitation sector the ground vector lives in;
    ``degeneracy_gap`` is the distance to the next level, used to flag
    crossing points where the sector label is a convention.
    """

    energy: float
    vector: np.ndarray
    excitations: int
    degeneracy_gap: float


def eigensystem(h: np.ndarray) -> EigenSystem:
    """Full decomposition of a self-adjoint matrix (validated on entry)."""
    check_hermitian(h, what="eigensystem input")
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    return EigenSystem(eigenvalues, eigenvectors)


def _sector_indices(n_spins: int) -> list[np.ndarray]:
    pops = popcounts(n_spins)
    return [np.where(pops == k)[0] for k in range(n_spins + 1)]


def _sector_blocks(h_b: np.ndarray, n_spins: int):
    """Eigendecompose each spin-excitation block of a battery operator.

    Battery Hamiltonians built by the model module conserve the excitation
    number, so the block decomposition is exact; a coupling between blocks
    signals a foreign operator and is rejected.
    """
    pops = popcounts(n_spins)
    off_block = pops[:, None] != pops[None, :]
    leak = np.max(np.abs(h_b[off_block])) if off_block.any() else 0.0
    if leak > 1e-12:
        raise ValueError(
            f"operator does not conserve spin excitation number (max off-block {leak:.3e})")
    blocks = []
    for idx in _sector_indices(n_spins):
        vals, vecs = np.linalg.eigh(h_b[np.ix_(idx, idx)])
        blocks.append((idx, vals, vecs))
    return blocks


def sector_minima(h_b: np.ndarray, n_spins: int) -> np.ndarray:
    """Minimum eigenvalue of each spin-excitation block, index = excitations."""
    minima = np.empty(n_spins + 1)
    for k, idx in enumerate(_sector_indices(n_spins)):
        minima[k] = np.linalg.eigvalsh(h_b[np.ix_(idx, idx)])[0]
    return minima


def ground_state(h_b: np.ndarray, degeneracy_tol: float = DEGENERACY_TOL) -> GroundState:
    """Lowest eigenpair, resolved sector by sector.

    At a crossing (gap below tolerance) a warning is emitted and the vector
    is chosen deterministically: lowest spin-excitation sector first, then
    the block eigenvector whose dominant basis index is smallest.
    """
    dim = h_b.shape[0]
    n_spins = dim.bit_length() - 1
    if 1 << n_spins != dim:
        raise ValueError(f"battery operator dimension {dim} is not a power of two")

    blocks = _sector_blocks(h_b, n_spins)
    all_values = np.sort(np.concatenate([vals for _, vals, _ in blocks]))
    energy = all_values[0]
    gap = all_values[1] - all_values[0] if dim > 1 else np.inf

    chosen_k = min(k for k, (_, vals, _) in enumerate(blocks)
                   if vals[0] <= energy + degeneracy_tol)
    idx, vals, vecs = blocks[chosen_k]
    degenerate_cols = np.where(vals <= vals[0] + degeneracy_tol)[0]
    col = min(degenerate_cols, key=lambda c: int(np.argmax(np.abs(vecs[:, c]))))

    if gap < degeneracy_tol:
        warnings.warn(
            f"ground level degenerate within {degeneracy_tol:g} (gap {gap:.3e}); "
            f"selected sector k={chosen_k} by convention",
            DegenerateGroundStateWarning,
            stacklevel=2,
        )

    vector = np.zeros(dim)
    vector[idx] = vecs[:, col]
    return GroundState(float(vals[col]), vector, chosen_k, float(gap))


def battery_levels(h_b: np.ndarray) -> np.ndarray:
    """All eigenvalues of a battery operator, ascending."""
    check_hermitian(h_b, what="battery operator")
    return np.linalg.eigvalsh(h_b)


def e_max(h_b: np.ndarray) -> float:
    """Highest battery energy level (top of the charge window)."""
    return float(battery_levels(h_b)[-1])


@dataclass(frozen=True)
class SpectrumTable:
    """Ascending battery eigenvalues on a hopping grid (rows follow j_values)."""

    j_values: np.ndarray
    levels: np.ndarray  # shape (len(j_values), n_levels)


def spectrum_vs_j(params: ModelParams, j_grid, n_levels: int | None = None) -> SpectrumTable:
    j_values = np.asarray(list(j_grid), dtype=float)
    if j_values.size == 0:
        raise ValueError("empty hopping grid")
    rows = []
    for j in j_values:
        vals = battery_levels(battery_hamiltonian(params.replace(hopping=float(j))))
        rows.append(vals if n_levels is None else vals[:n_levels])
    return SpectrumTable(j_values, np.array(rows))


def _ground_sector_at(params: ModelParams, j: float) -> tuple[int, np.ndarray]:
    minima = sector_minima(battery_hamiltonian(params.replace(hopping=j)), params.n_spins)
    lowest = minima.min()
    k = int(np.flatnonzero(minima <= lowest + DEGENERACY_TOL)[0])
    return k, minima


def _bisect_crossing(params: ModelParams, j_lo: float, j_hi: float,
                     k_lo: int, k_hi: int, accuracy: float) -> float:
    """Locate where sector k_lo stops being lower than sector k_hi."""

    def diff(j: float) -> float:
        minima = sector_minima(battery_hamiltonian(params.replace(hopping=j)), params.n_spins)
        return minima[k_lo] - minima[k_hi]

    lo, hi = j_lo, j_hi
    while hi - lo > accuracy:
        mid = 0.5 * (lo + hi)
        if diff(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def detect_ground_crossings(params: ModelParams, j_grid,
                            accuracy: float = CROSSING_ACCURACY,
                            auto_refine: bool = True,
                            max_depth: int = 24) -> list[float]:
    """Hopping strengths where the ground level changes excitation sector.

    Scans the grid for changes of the ground sector and bisects each one to
    ``accuracy``.  An interval where the sector jumps by more than one is
    subdivided when ``auto_refine`` is set (the default) and rejected with
    GridTooCoarseError otherwise; a jump that survives subdivision down to
    ``accuracy`` is a genuine multi-sector degeneracy and yields one point.
    """
    j_values = sorted(float(j) for j in j_grid)
    if len(j_values) < 2:
        raise ValueError("need at least two grid points")
    sectors = [_ground_sector_at(params, j)[0] for j in j_values]

    crossings: list[float] = []

    def resolve(j_lo: float, j_hi: float, k_lo: int, k_hi: int, depth: int):
        if k_lo == k_hi:
            return
        if abs(k_hi - k_lo) == 1 or (j_hi - j_lo) <= accuracy or depth >= max_depth:
            crossings.append(_bisect_crossing(params, j_lo, j_hi, k_lo, k_hi, accuracy))
            return
        if not auto_refine:
            raise GridTooCoarseError(
                f"ground sector jumps {k_lo} -> {k_hi} across [{j_lo:g}, {j_hi:g}]; "
                "refine the hopping grid")
        mid = 0.5 * (j_lo + j_hi)
        k_mid = _ground_sector_at(params, mid)[0]
        resolve(j_lo, mid, k_lo, k_mid, depth + 1)
        resolve(mid, j_hi, k_mid, k_hi, depth + 1)

    for (j_lo, j_hi, k_lo, k_hi) in zip(j_values, j_values[1:], sectors, sectors[1:]):
        resolve(j_lo, j_hi, k_lo, k_hi, 0)
    return sorted(crossings)
