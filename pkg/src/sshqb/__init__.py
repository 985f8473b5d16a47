"""Exact-diagonalization simulator for cavity charging of a dimerized
(SSH) spin-chain quantum battery."""

from .errors import (
    ConservationError,
    DegenerateGroundStateWarning,
    GridTooCoarseError,
    InvalidStateError,
    SimulationError,
    UndefinedCapacityError,
    WindowTooShortError,
)
from .hilbert import HilbertGeometry, ModelParams
from .spectral import EigenSystem, GroundState
from .dynamics import ChargingResult, Trajectory

__version__ = "0.1.0"

__all__ = [
    "ChargingResult",
    "ConservationError",
    "DegenerateGroundStateWarning",
    "EigenSystem",
    "GridTooCoarseError",
    "GroundState",
    "HilbertGeometry",
    "InvalidStateError",
    "ModelParams",
    "SimulationError",
    "Trajectory",
    "UndefinedCapacityError",
    "WindowTooShortError",
    "__version__",
]
