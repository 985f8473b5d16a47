"""Basis bookkeeping and elementary operators for the cavity x spin-chain space.

Conventions used by every module in this package:

* composite basis index = m * 2**n_spins + s  (cavity Fock index m is the
  major index, spin bitstring s the minor one),
* bit (i - 1) of s encodes spin i, bit value 1 = excited,
* all operators are dense numpy arrays; states are 1-D complex vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConservationError, InvalidStateError

HERMITICITY_TOL = 1e-12
NORM_TOL = 1e-10
SECTOR_LEAK_TOL = 1e-10


@dataclass(frozen=True)
class ModelParams:
    """Physical and numerical parameters of one charging-system instance.

    ``n_photons`` is the initial cavity Fock occupation; when omitted it
    defaults to 2*n_spins + 1, the smallest photon number that keeps the
    battery far from draining the source.
    """

    n_spins: int
    hopping: float = 1.0
    delta: float = 0.0
    g: float = 1.0
    omega_a: float = 1.0
    omega_c: float = 1.0
    n_photons: int | None = None

    def __post_init__(self):
        if int(self.n_spins) != self.n_spins or self.n_spins < 1:
            raise ValueError(f"n_spins must be an integer >= 1, got {self.n_spins}")
        if not -1.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [-1, 1], got {self.delta}")
        if self.omega_a <= 0:
            raise ValueError(f"omega_a must be positive, got {self.omega_a}")
        if self.n_photons is None:
            object.__setattr__(self, "n_photons", 2 * self.n_spins + 1)
        if int(self.n_photons) != self.n_photons or self.n_photons < 0:
            raise ValueError(f"n_photons must be an integer >= 0, got {self.n_photons}")

    def replace(self, **changes) -> "ModelParams":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class HilbertGeometry:
    """Dimensions of the battery, cavity and composite spaces.

    ``cavity_dim = n_photons + ground_excitations + 1`` makes the Fock
    truncation exact: total excitation is conserved and starts at
    n_photons + ground_excitations, so no higher Fock level is ever reached.
    """

    n_spins: int
    cavity_dim: int
    spin_dim: int = field(init=False)
    full_dim: int = field(init=False)

    def __post_init__(self):
        if self.cavity_dim < 1:
            raise ValueError("cavity_dim must be >= 1")
        object.__setattr__(self, "spin_dim", 1 << self.n_spins)
        object.__setattr__(self, "full_dim", self.cavity_dim * self.spin_dim)

    @classmethod
    def from_params(cls, params: ModelParams, ground_excitations: int = 0) -> "HilbertGeometry":
        return cls(params.n_spins, params.n_photons + ground_excitations + 1)


def popcounts(n_spins: int) -> np.ndarray:
    """Number of excited spins for every bitstring 0 .. 2**n_spins - 1."""
    states = np.arange(1 << n_spins, dtype=np.int64)
    counts = np.zeros_like(states)
    for i in range(n_spins):
        counts += (states >> i) & 1
    return counts


def spin_lowering(site: int, n_spins: int) -> np.ndarray:
    """Pauli lowering operator on one site, identity elsewhere (2^N x 2^N).

    ``site`` is 1-based; maps |...excited_site...> to |...ground_site...>.
    """
    if not 1 <= site <= n_spins:
        raise IndexError(f"site {site} out of range 1..{n_spins}")
    dim = 1 << n_spins
    bit = 1 << (site - 1)
    op = np.zeros((dim, dim))
    for s in range(dim):
        if s & bit:
            op[s & ~bit, s] = 1.0
    return op


def spin_raising(site: int, n_spins: int) -> np.ndarray:
    return spin_lowering(site, n_spins).T


def spin_number(site: int, n_spins: int) -> np.ndarray:
    """Diagonal occupation operator sigma_+ sigma_- for one site."""
    if not 1 <= site <= n_spins:
        raise IndexError(f"site {site} out of range 1..{n_spins}")
    bit = 1 << (site - 1)
    diag = (np.arange(1 << n_spins) & bit) != 0
    return np.diag(diag.astype(float))


def spin_excitation_number(n_spins: int) -> np.ndarray:
    """Total spin excitation operator (diagonal in the bitstring basis)."""
    return np.diag(popcounts(n_spins).astype(float))


def cavity_annihilation(cavity_dim: int) -> np.ndarray:
    """Ladder matrix with <m-1|c|m> = sqrt(m)."""
    if cavity_dim < 1:
        raise ValueError("cavity_dim must be >= 1")
    op = np.zeros((cavity_dim, cavity_dim))
    m = np.arange(1, cavity_dim)
    op[m - 1, m] = np.sqrt(m)
    return op


def cavity_number(cavity_dim: int) -> np.ndarray:
    return np.diag(np.arange(cavity_dim, dtype=float))


def embed(op_cavity: np.ndarray, op_spin: np.ndarray,
          geometry: HilbertGeometry | None = None) -> np.ndarray:
    """Kronecker embedding consistent with the cavity-major index ordering."""
    if op_cavity.shape[0] != op_cavity.shape[1] or op_spin.shape[0] != op_spin.shape[1]:
        raise ValueError("embed expects square operators")
    if geometry is not None:
        if op_cavity.shape[0] != geometry.cavity_dim:
            raise ValueError(
                f"cavity operator dim {op_cavity.shape[0]} != geometry {geometry.cavity_dim}")
        if op_spin.shape[0] != geometry.spin_dim:
            raise ValueError(
                f"spin operator dim {op_spin.shape[0]} != geometry {geometry.spin_dim}")
    return np.kron(op_cavity, op_spin)


def total_excitation_diag(geometry: HilbertGeometry) -> np.ndarray:
    """Diagonal of N_exc = c^dag c + sum_i sigma_+ sigma_- (it is diagonal)."""
    return np.add.outer(
        np.arange(geometry.cavity_dim, dtype=float),
        popcounts(geometry.n_spins).astype(float),
    ).ravel()


def check_hermitian(op: np.ndarray, tol: float = HERMITICITY_TOL, what: str = "operator"):
    dev = np.max(np.abs(op - op.conj().T))
    if dev > tol:
        raise InvalidStateError(f"{what} is not self-adjoint (max deviation {dev:.3e})")


def check_normalized(psi: np.ndarray, tol: float = NORM_TOL, what: str = "state"):
    err = abs(np.linalg.norm(psi) - 1.0)
    if err > tol:
        raise InvalidStateError(f"{what} is not normalized (|norm - 1| = {err:.3e})")


def check_density_matrix(rho: np.ndarray, what: str = "density matrix"):
    check_hermitian(rho, HERMITICITY_TOL, what)
    trace_err = abs(np.trace(rho).real - 1.0)
    if trace_err > NORM_TOL:
        raise InvalidStateError(f"{what} trace deviates from 1 by {trace_err:.3e}")
    lowest = np.linalg.eigvalsh(rho)[0]
    if lowest < -1e-10:
        raise InvalidStateError(f"{what} has negative eigenvalue {lowest:.3e}")


def partial_trace_cavity(psi: np.ndarray, geometry: HilbertGeometry) -> np.ndarray:
    """Reduced battery density matrix of a pure composite state.

    rho_B[s, s'] = sum_m psi[m, s] conj(psi[m, s']).
    """
    if psi.shape != (geometry.full_dim,):
        raise ValueError(f"state has dim {psi.shape}, geometry expects {geometry.full_dim}")
    check_normalized(psi)
    block = psi.reshape(geometry.cavity_dim, geometry.spin_dim)
    return block.T @ block.conj()


def sector_basis(total_excitation: int, n_spins: int, cavity_dim: int) -> np.ndarray:
    """Sorted composite indices with photon m + spin excitations k = total.

    Returns an empty array when no basis state carries that excitation count.
    """
    if total_excitation < 0:
        raise ValueError("total_excitation must be >= 0")
    spin_dim = 1 << n_spins
    k = popcounts(n_spins)
    m = total_excitation - k
    valid = (m >= 0) & (m < cavity_dim)
    indices = m[valid] * spin_dim + np.arange(spin_dim)[valid]
    return np.sort(indices)


def project_to_sector(obj: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Restrict a full-space vector or operator to the sector basis.

    Raises ConservationError when the object has weight or coupling outside
    the sector: any such leak means an excitation-conservation bug upstream.
    """
    if obj.ndim == 1:
        inside = np.zeros(obj.shape[0], dtype=bool)
        inside[indices] = True
        leak = np.linalg.norm(obj[~inside])
        if leak > SECTOR_LEAK_TOL:
            raise ConservationError(f"state carries norm {leak:.3e} outside the sector")
        return obj[indices].copy()
    if obj.ndim == 2:
        inside = np.zeros(obj.shape[0], dtype=bool)
        inside[indices] = True
        coupling = np.max(np.abs(obj[np.ix_(inside, ~inside)])) if (~inside).any() else 0.0
        if coupling > HERMITICITY_TOL:
            raise ConservationError(
                f"operator couples the sector to its complement (max element {coupling:.3e})")
        return obj[np.ix_(indices, indices)].copy()
    raise ValueError("expected a vector or a square matrix")


def embed_from_sector(obj: np.ndarray, indices: np.ndarray, full_dim: int) -> np.ndarray:
    """Extend a sector-space vector or operator back to the full space."""
    if obj.ndim == 1:
        out = np.zeros(full_dim, dtype=obj.dtype)
        out[indices] = obj
        return out
    if obj.ndim == 2:
        out = np.zeros((full_dim, full_dim), dtype=obj.dtype)
        out[np.ix_(indices, indices)] = obj
        return out
    raise ValueError("expected a vector or a square matrix")
