"""Figure rendering for solver trace CSVs."""

from .figures import (KINDS, FigureSpec, Series, build_figure, build_series,
                      read_trace, render, suboptimality_series)

__version__ = "0.1.0"

__all__ = [
    "KINDS",
    "FigureSpec",
    "Series",
    "build_figure",
    "build_series",
    "read_trace",
    "render",
    "suboptimality_series",
]
