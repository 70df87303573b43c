"""Exact verification of computational claims about singular cubic threefolds."""

from __future__ import annotations

__version__ = "0.1.0"

from .cyclo import CycNum
from .mpoly import MPoly, RelationSet, VarTable, parse

__all__ = ["CycNum", "MPoly", "RelationSet", "VarTable", "parse", "__version__"]
