"""Exception types shared across the package."""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class ConservationError(SimulationError):
    """A conserved quantity leaked outside its symmetry sector."""


class InvalidStateError(SimulationError):
    """A state vector or density matrix violates its invariants."""


class WindowTooShortError(SimulationError):
    """No charging peak was found inside the scan window."""


class GridTooCoarseError(SimulationError):
    """A parameter grid is too coarse to isolate individual level crossings."""


class UndefinedCapacityError(SimulationError):
    """Capacity ratios are undefined (battery has zero energy window)."""


class DegenerateGroundStateWarning(UserWarning):
    """Ground level is degenerate within tolerance; selection is by convention."""
