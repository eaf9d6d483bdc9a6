"""Twisted sectors of abelian diagonal quotient stacks ``[A^d / G]``.

``G`` is given by generators ``(order l_k, weights w_k)``: the k-th generator
multiplies coordinate ``j`` by ``exp(2 pi i w_kj / l_k)``.  For such actions
every group element is its own conjugacy class and its fixed locus is a
coordinate subspace, so the inertia stack splits into one sector per element
and each sector's coarse space is ``A^(fixed_dim) / G``.

Eigenvalue exponents use the normalization ``1 <= a_j <= l`` (``a_j = l``
marks a fixed direction); ``age`` is only offered as a derived value.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Any, Iterable, Sequence, Union

from .ering import ZERO, EPoly, ERat, epoly_parse, erat_eq, lefschetz_power, specialize
from .errors import InvalidModelError, ParseError, PreconditionError
from .stringy import SncModel, gorenstein_volume, validate_snc


@dataclass(frozen=True)
class Generator:
    order: int
    weights: tuple[int, ...]


@dataclass(frozen=True)
class AbelianAction:
    dim: int
    generators: tuple[Generator, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        gens = []
        for g in self.generators:
            if not isinstance(g, Generator):
                g = Generator(int(g[0]), tuple(g[1]))
            if g.order < 1:
                raise ValueError(f"generator order must be >= 1, got {g.order}")
            if len(g.weights) != self.dim:
                raise ValueError(f"generator has {len(g.weights)} weights, expected {self.dim}")
            gens.append(Generator(g.order, tuple(int(w) % g.order for w in g.weights)))
        object.__setattr__(self, "generators", tuple(gens))

    @classmethod
    def cyclic(cls, order: int, weights: Sequence[int]) -> AbelianAction:
        return cls(len(weights), (Generator(order, tuple(weights)),))

    @property
    def order(self) -> int:
        """Number of group tuples (``prod l_k``)."""
        return math.prod(g.order for g in self.generators)

    def elements(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*(range(g.order) for g in self.generators))

    def identity(self) -> tuple[int, ...]:
        return tuple(0 for _ in self.generators)

    def inverse(self, g: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((-e) % gen.order for e, gen in zip(g, self.generators))


def element_exponents(a: AbelianAction, g: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Order ``l`` of ``g`` and exponents ``a_j`` in ``[1, l]`` with eigenvalues ``zeta_l^a_j``."""
    g = tuple(g)
    if len(g) != len(a.generators) or any(
        not 0 <= e < gen.order for e, gen in zip(g, a.generators)
    ):
        raise ValueError(f"group element {g} out of range")
    big = reduce(math.lcm, (gen.order for gen in a.generators), 1)
    raw = [
        sum(e * gen.weights[j] * (big // gen.order) for e, gen in zip(g, a.generators)) % big
        for j in range(a.dim)
    ]
    l = big // math.gcd(big, *raw)
    step = big // l
    return l, tuple((c // step) or l for c in raw)


def shift_number(l: int, exponents: Sequence[int]) -> Fraction:
    """``d - (1/l) * sum a_j``."""
    if l < 1 or any(not 1 <= x <= l for x in exponents):
        raise ValueError(f"exponents {tuple(exponents)} violate 1 <= a_j <= {l}")
    return len(exponents) - Fraction(sum(exponents), l)


@dataclass(frozen=True)
class Sector:
    element: tuple[int, ...]
    order: int
    exponents: tuple[int, ...]
    fixed_dim: int
    shift: Fraction
    coarse_class: ERat

    @property
    def age(self) -> Fraction:
        """``(1/l) * sum (a_j mod l)``; equals the shift of the inverse element."""
        return Fraction(sum(x % self.order for x in self.exponents), self.order)

    def to_dict(self) -> dict[str, Any]:
        return {
            "element": list(self.element),
            "order": self.order,
            "exponents": list(self.exponents),
            "fixed_dim": self.fixed_dim,
            "shift": _fmt_rational(self.shift),
            "age": _fmt_rational(self.age),
            "coarse_class": str(self.coarse_class),
        }


def _fmt_rational(x: Fraction) -> int | str:
    return int(x) if x.denominator == 1 else str(x)


def _sector(a: AbelianAction, g: tuple[int, ...]) -> Sector:
    l, exps = element_exponents(a, g)
    fixed = sum(1 for x in exps if x == l)
    return Sector(g, l, exps, fixed, shift_number(l, exps), ERat(lefschetz_power(fixed)))


def sectors(a: AbelianAction) -> list[Sector]:
    """One sector per group element, in lexicographic element order."""
    return [_sector(a, g) for g in a.elements()]


def is_gorenstein(a: AbelianAction) -> bool:
    """Every element has determinant 1, i.e. ``sum a_j = 0 mod l``."""
    for g in a.elements():
        l, exps = element_exponents(a, g)
        if sum(exps) % l:
            return False
    return True


def has_reflections(a: AbelianAction) -> bool:
    """Some non-identity element fixes a hyperplane."""
    ident = a.identity()
    return any(s.fixed_dim == a.dim - 1 for s in sectors(a) if s.element != ident)


def trivially_acting_elements(a: AbelianAction) -> list[tuple[int, ...]]:
    """Non-identity tuples acting as the identity (non-effective presentation)."""
    ident = a.identity()
    return [g for g in a.elements() if g != ident and element_exponents(a, g)[0] == 1]


# -- user-supplied sectors ------------------------------------------------------


@dataclass(frozen=True)
class SpecSector:
    """One sector of a :class:`SectorSpec`: its coarse space data and shift."""

    label: str
    shift: Fraction
    epoly: EPoly | None = None
    hodge: tuple[tuple[int, int, int], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "shift", Fraction(self.shift))
        if self.shift < 0:
            raise ValueError(f"sector {self.label}: shift must be nonnegative")
        if (self.epoly is None) == (self.hodge is None):
            raise ValueError(f"sector {self.label}: give exactly one of epoly or hodge")
        if self.hodge is not None:
            rows = tuple(tuple(int(x) for x in row) for row in self.hodge)
            if any(len(r) != 3 or r[2] < 0 for r in rows):
                raise ValueError(f"sector {self.label}: hodge rows are (p, q, h) with h >= 0")
            object.__setattr__(self, "hodge", rows)

    def coarse_epoly(self) -> EPoly:
        if self.epoly is not None:
            return self.epoly
        # pure cohomology of a complete variety: h^{p,q} sits in degree p + q
        return EPoly({(p, q): (-1) ** ((p + q) % 2) * h for p, q, h in self.hodge if h})

    def hodge_table(self) -> dict[tuple[int, int], int]:
        if self.hodge is not None:
            table: dict[tuple[int, int], int] = {}
            for p, q, h in self.hodge:
                table[(p, q)] = table.get((p, q), 0) + h
            return {k: v for k, v in table.items() if v}
        table = {}
        for (p, q), c in self.epoly.terms.items():
            if p != q or p.denominator != 1 or c < 0:
                raise ValueError(
                    f"sector {self.label}: E-polynomial {self.epoly} does not determine "
                    "Hodge numbers; supply an explicit hodge table"
                )
            table[(int(p), int(p))] = c
        return table


@dataclass(frozen=True)
class SectorSpec:
    sectors: tuple[SpecSector, ...]


SectorLike = Union[Sector, SpecSector]


def orbifold_e(ss: Iterable[SectorLike] | SectorSpec) -> ERat:
    """``sum_Y L^s(Y) * {coarse space of Y}``."""
    if isinstance(ss, SectorSpec):
        ss = ss.sectors
    total = ERat(ZERO)
    for s in ss:
        coarse = s.coarse_class if isinstance(s, Sector) else ERat(s.coarse_epoly())
        total = total + ERat(lefschetz_power(s.shift)) * coarse
    return total


@dataclass
class OrbifoldHodge:
    hodge: dict[tuple[Fraction, Fraction], int]
    betti: dict[Fraction, int]
    euler_from_betti: int | None
    euler_from_e: Fraction

    @property
    def consistent(self) -> bool:
        return self.euler_from_betti is None or self.euler_from_betti == self.euler_from_e

    def to_dict(self) -> dict[str, Any]:
        return {
            "hodge": [
                [_fmt_rational(p), _fmt_rational(q), h] for (p, q), h in sorted(self.hodge.items())
            ],
            "betti": [[_fmt_rational(i), b] for i, b in sorted(self.betti.items())],
            "euler_from_betti": self.euler_from_betti,
            "euler_from_e": _fmt_rational(self.euler_from_e),
            "consistent": self.consistent,
        }


def orbifold_hodge(ss: SectorSpec) -> OrbifoldHodge:
    """Orbifold Hodge numbers ``h^{p,q}_orb = sum_Y h^{p-s, q-s}(coarse Y)``."""
    hodge: dict[tuple[Fraction, Fraction], int] = {}
    for s in ss.sectors:
        for (p, q), h in s.hodge_table().items():
            key = (p + s.shift, q + s.shift)
            hodge[key] = hodge.get(key, 0) + h
    betti: dict[Fraction, int] = {}
    for (p, q), h in hodge.items():
        betti[p + q] = betti.get(p + q, 0) + h
    # the sign (-1)^i only matches L^s at u = v = 1 when every shift is integral
    if all(s.shift.denominator == 1 for s in ss.sectors):
        euler = sum((-1) ** (int(i) % 2) * b for i, b in betti.items())
    else:
        euler = None
    return OrbifoldHodge(dict(sorted(hodge.items())), dict(sorted(betti.items())), euler,
                         specialize(orbifold_e(ss), 1, 1))


# -- main theorem ---------------------------------------------------------------


@dataclass
class TheoremReport:
    stringy: ERat
    orbifold: ERat
    equal: bool
    sectors: list[Sector]

    def to_dict(self) -> dict[str, Any]:
        return {
            "stringy": str(self.stringy),
            "orbifold": str(self.orbifold),
            "equal": self.equal,
            "sectors": [s.to_dict() for s in self.sectors],
        }


def check_theorem_preconditions(a: AbelianAction) -> list[str]:
    problems = []
    if not is_gorenstein(a):
        problems.append("action is not Gorenstein (some element has determinant != 1)")
    if has_reflections(a):
        problems.append("action contains reflections")
    return problems


def verify_main_theorem(a: AbelianAction, resolution: SncModel) -> TheoremReport:
    """Compare the Gorenstein volume of a resolution of ``A^d/G`` with the
    orbifold E-function of ``[A^d/G]``."""
    problems = check_theorem_preconditions(a)
    if not resolution.is_integral():
        problems.append("resolution has non-integral discrepancies")
    if resolution.ambient_dim != a.dim:
        problems.append(
            f"resolution has dimension {resolution.ambient_dim}, action has {a.dim}"
        )
    if problems:
        raise PreconditionError("; ".join(problems))
    violations = validate_snc(resolution)
    if violations:
        raise InvalidModelError(violations)
    secs = sectors(a)
    lhs = gorenstein_volume(resolution)
    rhs = orbifold_e(secs)
    return TheoremReport(lhs, rhs, erat_eq(lhs, rhs), secs)


# -- JSON ---------------------------------------------------------------------


def action_from_json(obj: dict[str, Any]) -> AbelianAction:
    try:
        gens = tuple(
            Generator(int(g["order"]), tuple(int(w) for w in g["weights"]))
            for g in obj["generators"]
        )
        return AbelianAction(int(obj["dim"]), gens)
    except KeyError as exc:
        raise ParseError(f"action is missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed action: {exc}") from exc


def action_to_json(a: AbelianAction) -> dict[str, Any]:
    return {
        "dim": a.dim,
        "generators": [{"order": g.order, "weights": list(g.weights)} for g in a.generators],
    }


def sector_spec_from_json(obj: dict[str, Any]) -> SectorSpec:
    out = []
    try:
        for entry in obj["sectors"]:
            label = str(entry.get("label", f"sector{len(out)}"))
            shift = Fraction(entry.get("shift", 0))
            if "hodge" in entry:
                out.append(SpecSector(label, shift, hodge=tuple(map(tuple, entry["hodge"]))))
            elif "epoly" in entry:
                out.append(SpecSector(label, shift, epoly=epoly_parse(str(entry["epoly"]))))
            else:
                raise ParseError(f"sector {label} needs 'epoly' or 'hodge'")
    except KeyError as exc:
        raise ParseError(f"sector spec is missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed sector spec: {exc}") from exc
    return SectorSpec(tuple(out))
