"""Derived physical quantities: stored energy, ergotropy, occupations,
ground-state ordering parameters and capacity ratios."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError, UndefinedCapacityError
from .hilbert import popcounts
from .spectral import GroundState, battery_levels

ERGOTROPY_CLAMP = 1e-9

# Magnetization can be quoted with Pauli (+-1) or spin-1/2 (+-1/2) z
# eigenvalues; the Pauli convention (all-ground chain -> M_z = -1) is the
# package default.
SZ_CONVENTIONS = {"pauli": 2.0, "spin-half": 1.0}


@dataclass(frozen=True)
class OrderingParams:
    """Ground-state magnetization moments; step at every ground-level crossing."""

    m_z: float
    xi_z: float


@dataclass(frozen=True)
class Capacities:
    """Charged energy and ergotropy normalized by the battery energy window."""

    r_eb: float
    r_epb: float


def battery_energy(rho_b: np.ndarray, h_b: np.ndarray) -> float:
    """tr[H_B rho_B]; a non-real trace signals a Hermiticity bug."""
    if rho_b.shape != h_b.shape:
        raise ValueError("rho_b and h_b dimensions differ")
    value = np.trace(rho_b @ h_b)
    if abs(value.imag) > 1e-10:
        raise InvalidStateError(f"energy has imaginary part {value.imag:.3e}")
    return float(value.real)


def charged_energy(e_b_t: float, e_ground: float) -> float:
    return e_b_t - e_ground


def ergotropy(rho_b: np.ndarray, h_b: np.ndarray) -> float:
    """Maximum unitarily extractable work.

    With rho populations r_n sorted descending and battery levels e_n
    ascending, the passive energy is sum_n r_n e_n and the ergotropy is
    tr[H_B rho] - sum_n r_n e_n.  Roundoff in [-1e-9, 0) is clamped to zero;
    anything lower is an error.
    """
    populations = np.linalg.eigvalsh(rho_b)  # ascending
    if populations[0] < -1e-8:
        raise InvalidStateError(f"density matrix eigenvalue {populations[0]:.3e} < 0")
    levels = battery_levels(h_b)
    passive_energy = float(populations[::-1] @ levels)
    value = battery_energy(rho_b, h_b) - passive_energy
    if value < -ERGOTROPY_CLAMP:
        raise InvalidStateError(f"ergotropy {value:.3e} below roundoff floor")
    return max(value, 0.0)


def occupations(rho_b: np.ndarray) -> np.ndarray:
    """Per-spin excitation probabilities O_i = <sigma_+^i sigma_-^i>."""
    dim = rho_b.shape[0]
    n_spins = dim.bit_length() - 1
    if 1 << n_spins != dim:
        raise ValueError(f"density matrix dimension {dim} is not a power of two")
    probs = np.diag(rho_b).real
    states = np.arange(dim)
    return np.array([
        probs[(states >> i) & 1 == 1].sum() for i in range(n_spins)
    ])


def ordering_params(ground: GroundState, n_spins: int,
                    convention: str = "pauli") -> OrderingParams:
    """M_z = <S_z>_g / N and xi_z = <S_z^2>_g / N^2 on the ground state.

    S_z = sum_i sigma_z^(i) is diagonal here, so both moments reduce to
    weighted sums over bitstring excitation counts.
    """
    try:
        scale = SZ_CONVENTIONS[convention]
    except KeyError:
        raise ValueError(f"unknown sigma_z convention {convention!r}") from None
    weights = np.abs(ground.vector) ** 2
    sz_values = scale * (popcounts(n_spins) - 0.5 * n_spins)
    s_z = float(weights @ sz_values)
    s_z2 = float(weights @ sz_values**2)
    return OrderingParams(s_z / n_spins, s_z2 / n_spins**2)


def capacities(de: float, erg: float, e_top: float, e_ground: float) -> Capacities:
    """R_eb = dE / (E_max - E_G) and R_epb = ergotropy / (E_max - E_G)."""
    window = e_top - e_ground
    if window <= 0.0:
        raise UndefinedCapacityError(
            f"battery energy window is {window:g}; capacities undefined")
    return Capacities(de / window, erg / window)
