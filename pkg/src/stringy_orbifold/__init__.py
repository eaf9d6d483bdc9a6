"""Stringy and orbifold invariants of Gorenstein quotient singularities."""
from .ering import (
    EPoly,
    ERat,
    FiltrationSeries,
    L,
    epoly_parse,
    erat_eq,
    erat_parse,
    lefschetz_power,
    specialize,
    truncate_filtration,
)

__all__ = [
    "EPoly",
    "ERat",
    "FiltrationSeries",
    "L",
    "epoly_parse",
    "erat_eq",
    "erat_parse",
    "lefschetz_power",
    "specialize",
    "truncate_filtration",
]
__version__ = "0.1.0"
