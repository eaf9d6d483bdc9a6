"""Symbolic variety classes and their Hodge characteristics."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Any, Union

from .ering import ONE, ZERO, EPoly, L, epoly_parse, lefschetz_power
from .errors import ParseError


def _check_dim(n: int) -> None:
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"dimension must be a nonnegative integer, got {n!r}")


@dataclass(frozen=True)
class Point:
    pass


@dataclass(frozen=True)
class Affine:
    n: int

    def __post_init__(self):
        _check_dim(self.n)


@dataclass(frozen=True)
class Torus:
    n: int

    def __post_init__(self):
        _check_dim(self.n)


@dataclass(frozen=True)
class Proj:
    n: int

    def __post_init__(self):
        _check_dim(self.n)


@dataclass(frozen=True)
class Product:
    parts: tuple["ClassExpr", ...]


@dataclass(frozen=True)
class DisjointUnion:
    parts: tuple["ClassExpr", ...]


@dataclass(frozen=True)
class AffineQuotient:
    """``A^n / G``; ``group`` is a display marker only."""

    n: int
    group: str = ""

    def __post_init__(self):
        _check_dim(self.n)


@dataclass(frozen=True)
class Custom:
    label: str
    epoly: EPoly


ClassExpr = Union[Point, Affine, Torus, Proj, Product, DisjointUnion, AffineQuotient, Custom]


def hodge_characteristic(c: ClassExpr) -> EPoly:
    if isinstance(c, Point):
        return ONE
    if isinstance(c, (Affine, AffineQuotient)):
        # H_c of A^n/G is the G-invariant part of H_c(A^n), which is all of it
        return lefschetz_power(c.n)
    if isinstance(c, Torus):
        return (L - 1) ** c.n
    if isinstance(c, Proj):
        return sum((lefschetz_power(i) for i in range(c.n + 1)), ZERO)
    if isinstance(c, Product):
        return reduce(lambda acc, part: acc * hodge_characteristic(part), c.parts, ONE)
    if isinstance(c, DisjointUnion):
        return sum((hodge_characteristic(part) for part in c.parts), ZERO)
    if isinstance(c, Custom):
        return c.epoly
    raise TypeError(f"not a class expression: {c!r}")


def scissor_check(whole: ClassExpr, open_part: ClassExpr, closed_part: ClassExpr) -> bool:
    """Check ``{X} = {X - Y} + {Y}`` on Hodge characteristics."""
    return hodge_characteristic(whole) == (
        hodge_characteristic(open_part) + hodge_characteristic(closed_part)
    )


# -- JSON ---------------------------------------------------------------------

_DIM_KINDS = {"affine": Affine, "torus": Torus, "proj": Proj}


def class_from_json(obj: dict[str, Any]) -> ClassExpr:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError(f"class expression needs a 'kind': {obj!r}")
    kind = obj["kind"]
    try:
        if kind == "point":
            return Point()
        if kind in _DIM_KINDS:
            return _DIM_KINDS[kind](obj["n"])
        if kind == "affine_quotient":
            return AffineQuotient(obj["n"], str(obj.get("group", "")))
        if kind == "product":
            return Product(tuple(class_from_json(p) for p in obj["parts"]))
        if kind == "disjoint_union":
            return DisjointUnion(tuple(class_from_json(p) for p in obj["parts"]))
        if kind == "custom":
            return Custom(str(obj["label"]), epoly_parse(obj["epoly"]))
    except KeyError as exc:
        raise ParseError(f"class expression of kind {kind!r} is missing {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from exc
    raise ParseError(f"unknown class kind {kind!r}")


def class_to_json(c: ClassExpr) -> dict[str, Any]:
    if isinstance(c, Point):
        return {"kind": "point"}
    if isinstance(c, AffineQuotient):
        return {"kind": "affine_quotient", "n": c.n, "group": c.group}
    for kind, cls in _DIM_KINDS.items():
        if type(c) is cls:
            return {"kind": kind, "n": c.n}
    if isinstance(c, Product):
        return {"kind": "product", "parts": [class_to_json(p) for p in c.parts]}
    if isinstance(c, DisjointUnion):
        return {"kind": "disjoint_union", "parts": [class_to_json(p) for p in c.parts]}
    if isinstance(c, Custom):
        return {"kind": "custom", "label": c.label, "epoly": str(c.epoly)}
    raise TypeError(f"not a class expression: {c!r}")


# Decompositions shipped for consistency checks: (whole, open part, closed part).
def catalogue_decompositions(max_dim: int = 5) -> list[tuple[ClassExpr, ClassExpr, ClassExpr]]:
    out: list[tuple[ClassExpr, ClassExpr, ClassExpr]] = []
    for n in range(1, max_dim + 1):
        # P^n = A^n + P^(n-1)
        out.append((Proj(n), Affine(n), Proj(n - 1)))
        # A^n = (A^(n-1) x G_m) + A^(n-1)   (last coordinate nonzero / zero)
        out.append((Affine(n), Product((Affine(n - 1), Torus(1))), Affine(n - 1)))
        # G_m^n x A^1 = G_m^(n+1) + G_m^n
        out.append((Product((Torus(n), Affine(1))), Torus(n + 1), Torus(n)))
    out.append((Proj(0), Point(), DisjointUnion(())))
    return out
