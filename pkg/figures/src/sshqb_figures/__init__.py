"""Figure rendering for the spin-chain battery simulator's CSV results."""

from .render import FigureSpec, RenderIndex, render, render_all
from .schemas import FIGURE_KINDS, SchemaError, Table, load_table

__version__ = "0.1.0"

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "RenderIndex",
    "SchemaError",
    "Table",
    "load_table",
    "render",
    "render_all",
    "__version__",
]
