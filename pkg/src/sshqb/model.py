"""Hamiltonian assembly: battery chain, cavity mode, rotating-wave coupling.

The battery is an open chain of two-level spins with alternating
nearest-neighbour hopping J(1 + delta) on odd-numbered bonds and
J(1 - delta) on even-numbered ones.  For an odd number of spins the two
bond types appear equally often; for an even number there is one more
(1 + delta) bond.
"""

from __future__ import annotations

import numpy as np

from .hilbert import (
    HilbertGeometry,
    ModelParams,
    cavity_annihilation,
    cavity_number,
    popcounts,
    spin_lowering,
)

# Alternative weak-bond convention: stop the even-bond sum at N - 2, which
# for odd N drops the final bond and breaks the odd-chain mirror symmetry.
# The symmetric bound (even bonds up to N - 1) is the default; the variant
# stays available for comparison.
LITERAL_WEAK_BOND_BOUND = False


def bond_pattern(n_spins: int, hopping: float, delta: float,
                 literal_weak_bound: bool = LITERAL_WEAK_BOND_BOUND) -> list[tuple[int, float]]:
    """Ordered (left site, strength) pairs for the open chain's bonds.

    Bond (i, i+1) has strength J(1 + delta) for odd i and J(1 - delta)
    for even i, sites numbered from 1.  N = 1 has no bonds.
    """
    bonds = []
    for i in range(1, n_spins):
        if i % 2 == 1:
            bonds.append((i, hopping * (1.0 + delta)))
        else:
            if literal_weak_bound and i > n_spins - 2:
                continue
            bonds.append((i, hopping * (1.0 - delta)))
    return bonds


def battery_hamiltonian(params: ModelParams,
                        literal_weak_bound: bool = LITERAL_WEAK_BOND_BOUND) -> np.ndarray:
    """H_B = omega_a * sum_i n_i - sum_bonds strength * (hop + h.c.)."""
    n = params.n_spins
    dim = 1 << n
    h = np.diag(params.omega_a * popcounts(n).astype(float))
    for site, strength in bond_pattern(n, params.hopping, params.delta, literal_weak_bound):
        hop = spin_lowering(site, n).T @ spin_lowering(site + 1, n)
        h -= strength * (hop + hop.T)
    assert h.shape == (dim, dim)
    return h


def cavity_hamiltonian(params: ModelParams, cavity_dim: int) -> np.ndarray:
    """H_A = omega_c * c^dag c (diagonal Fock energies)."""
    return params.omega_c * cavity_number(cavity_dim)


def interaction_hamiltonian(params: ModelParams, geometry: HilbertGeometry) -> np.ndarray:
    """H_I = g * sum_i (sigma_+^(i) c + h.c.), excitation preserving."""
    n = params.n_spins
    c = cavity_annihilation(geometry.cavity_dim)
    collective_raise = sum(spin_lowering(i, n).T for i in range(1, n + 1))
    term = params.g * np.kron(c, collective_raise)
    return term + term.T


def total_hamiltonian(params: ModelParams, geometry: HilbertGeometry,
                      literal_weak_bound: bool = LITERAL_WEAK_BOND_BOUND) -> np.ndarray:
    """H_S = H_A (x) 1 + 1 (x) H_B + H_I on the composite space."""
    h_a = cavity_hamiltonian(params, geometry.cavity_dim)
    h_b = battery_hamiltonian(params, literal_weak_bound)
    h = np.kron(h_a, np.eye(geometry.spin_dim))
    h += np.kron(np.eye(geometry.cavity_dim), h_b)
    h += interaction_hamiltonian(params, geometry)
    return h
