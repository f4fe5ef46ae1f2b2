"""Rendering layer for the iflab CSV tables.

Reads the '#'-metadata CSV schema emitted by the experiment CLI and draws
one figure per family; no statistic is recomputed here.
"""

from .families import FAMILIES, FigureJob, RenderResult, render
from .schema import SchemaError, Table, read_table

__version__ = "0.1.0"

__all__ = [
    "FAMILIES",
    "FigureJob",
    "RenderResult",
    "render",
    "SchemaError",
    "Table",
    "read_table",
]
