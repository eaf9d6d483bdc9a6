"""Stringy volumes from resolution data with simple normal crossing divisors.

A resolution ``Z -> X`` is described by an :class:`SncModel`: the class of
``Z``, the divisors ``E_i`` with their multiplicities ``d_i`` (for the
Gorenstein volume: the coefficients of the relative canonical divisor) and
the classes of the open strata ``E_J°``.  Strata classes are inputs; nothing
here computes them from equations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Mapping

from .classes import class_from_json, hodge_characteristic
from .ering import ZERO, EPoly, ERat, L, epoly_parse, erat_eq, lefschetz_power
from .errors import InvalidModelError, ParseError


@dataclass(frozen=True)
class Divisor:
    label: str
    mult: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mult", Fraction(self.mult))


@dataclass(frozen=True)
class SncModel:
    ambient_dim: int
    total_class: EPoly
    divisors: tuple[Divisor, ...]
    strata: Mapping[frozenset[str], EPoly] = field(hash=False)

    @classmethod
    def build(cls, ambient_dim: int, total_class, divisors, strata) -> SncModel:
        """Convenience constructor accepting strings and plain sequences.

        ``divisors`` is a sequence of ``(label, mult)``; ``strata`` maps an
        iterable of labels to a class (EPoly or expression string).
        """

        def as_poly(x):
            return epoly_parse(x) if isinstance(x, str) else x

        divs = tuple(Divisor(lbl, Fraction(m)) for lbl, m in divisors)
        st: dict[frozenset[str], EPoly] = {}
        for key, value in dict(strata).items():
            j = frozenset([key] if isinstance(key, str) else key)
            st[j] = st.get(j, ZERO) + as_poly(value)
        return cls(ambient_dim, as_poly(total_class), divs, st)

    @property
    def labels(self) -> list[str]:
        return [d.label for d in self.divisors]

    def mult(self, label: str) -> Fraction:
        for d in self.divisors:
            if d.label == label:
                return d.mult
        raise KeyError(label)

    def is_integral(self) -> bool:
        return all(d.mult.denominator == 1 for d in self.divisors)

    def max_degree(self) -> Fraction:
        degrees = [self.total_class.degree()] + [c.degree() for c in self.strata.values()]
        return max(degrees)


def _fmt_j(j: frozenset[str]) -> str:
    return "{" + ", ".join(sorted(j)) + "}"


def validate_snc(m: SncModel) -> list[str]:
    """Consistency problems of a model; empty when it is usable."""
    violations = []
    labels = m.labels
    if len(set(labels)) != len(labels):
        violations.append(f"duplicate divisor labels: {labels}")
    known = set(labels)
    for j in m.strata:
        unknown = sorted(j - known)
        if unknown:
            violations.append(f"stratum {_fmt_j(j)} uses unknown divisor labels {unknown}")
    for d in m.divisors:
        if d.mult < 0:
            violations.append(f"divisor {d.label} has negative multiplicity {d.mult}")
    cover = sum(m.strata.values(), ZERO)
    if cover != m.total_class:
        violations.append(
            f"cover identity fails: sum of strata = {cover} but total_class = {m.total_class}"
        )
    return violations


def _require_valid(m: SncModel) -> None:
    violations = validate_snc(m)
    if violations:
        raise InvalidModelError(violations)


def batyrev_integral(m: SncModel) -> ERat:
    """``sum_J {E_J°} prod_{i in J} (L - 1)/(L^(d_i + 1) - 1)``."""
    _require_valid(m)
    result = ERat(ZERO)
    for j, cls in sorted(m.strata.items(), key=lambda kv: sorted(kv[0])):
        term = ERat(cls)
        for label in sorted(j):
            d = m.mult(label)
            if d != 0:
                term = term * ERat(L - 1, [d + 1])
        result = result + term
    return result


def gorenstein_volume(m: SncModel) -> ERat:
    """Gorenstein volume of the arc space of ``X`` from a resolution.

    ``m`` must carry the discrepancy coefficients of ``K_{Z/X}`` as
    multiplicities; the value is then the integral of ``L^(-ord K_{Z/X})``
    over the arcs of ``Z``, which is :func:`batyrev_integral`.
    """
    return batyrev_integral(m)


def _compositions(weights: list[int], total: int) -> Iterator[tuple[int, ...]]:
    """All ``(n_1, ..., n_r)`` with ``n_i >= 1`` and ``sum w_i n_i = total``."""
    if not weights:
        if total == 0:
            yield ()
        return
    w, rest = weights[0], weights[1:]
    floor_rest = sum(rest)
    n = 1
    while w * n + floor_rest <= total:
        for tail in _compositions(rest, total - w * n):
            yield (n,) + tail
        n += 1


def ord_level_volume(m: SncModel, n: int) -> ERat:
    """Volume of the arcs with ``ord I_E = n``.

    Divisors of multiplicity 0 do not move the contact order; their strata
    are counted at the level fixed by the remaining divisors.
    """
    _require_valid(m)
    if n < 0:
        raise ValueError("level must be nonnegative")
    for d in m.divisors:
        if d.mult.denominator != 1:
            raise ValueError(f"contact levels need integral multiplicities; {d.label} has {d.mult}")
    result = ZERO
    for j, cls in m.strata.items():
        weights = [int(m.mult(lbl)) for lbl in sorted(j) if m.mult(lbl) != 0]
        inner = ZERO
        for ns in _compositions(weights, n):
            inner = inner + lefschetz_power(-sum(ns))
        if inner:
            result = result + cls * (L - 1) ** len(weights) * inner
    return ERat(result)


def level_bound(m: SncModel, level: int) -> int:
    """Level count ``N(m)`` after which re-summed level volumes agree with
    :func:`batyrev_integral` modulo terms of L-degree below ``-level``.

    ``ambient_dim * (level + max degree of the class data)``, clamped at 0.
    Every level-``n`` term has degree at most ``max_degree - n``, so any
    ``N >= level + max_degree`` is enough; the ambient factor is slack.
    """
    top = m.max_degree()
    return max(0, math.ceil(m.ambient_dim * (level + top)))


def resummed_levels(m: SncModel, max_level: int) -> ERat:
    """``sum_{n <= max_level} ord_level_volume(m, n) * L^-n``."""
    total = ZERO
    for n in range(max_level + 1):
        total = total + ord_level_volume(m, n).numerator * lefschetz_power(-n)
    return ERat(total)


@dataclass
class KEquivalenceReport:
    first: ERat
    second: ERat
    equal: bool

    def to_dict(self) -> dict[str, Any]:
        return {"first": str(self.first), "second": str(self.second), "equal": self.equal}


def verify_kequivalence(first: SncModel, second: SncModel) -> KEquivalenceReport:
    """Compare the Gorenstein volumes of two resolutions."""
    problems = [f"first: {v}" for v in validate_snc(first)]
    problems += [f"second: {v}" for v in validate_snc(second)]
    if problems:
        raise InvalidModelError(problems)
    a, b = gorenstein_volume(first), gorenstein_volume(second)
    return KEquivalenceReport(a, b, erat_eq(a, b))


def closed_form_model(value: EPoly, ambient_dim: int) -> SncModel:
    """A model with no divisors whose volume is ``value``."""
    return SncModel(ambient_dim, value, (), {frozenset(): value})


# -- JSON ---------------------------------------------------------------------


def _class_value(x) -> EPoly:
    if isinstance(x, str):
        return epoly_parse(x)
    if isinstance(x, int):
        return EPoly(x)
    if isinstance(x, dict):
        return hodge_characteristic(class_from_json(x))
    raise ParseError(f"cannot read a class from {x!r}")


def model_from_json(obj: dict[str, Any]) -> SncModel:
    try:
        divisors = tuple(Divisor(str(d["label"]), Fraction(d["mult"])) for d in obj["divisors"])
        known = {d.label for d in divisors}
        strata: dict[frozenset[str], EPoly] = {}
        for entry in obj["strata"]:
            j = frozenset(str(x) for x in entry["J"])
            unknown = sorted(j - known)
            if unknown:
                raise ParseError(f"stratum refers to unknown divisor labels {unknown}")
            strata[j] = strata.get(j, ZERO) + _class_value(entry["class"])
        return SncModel(int(obj["ambient_dim"]), _class_value(obj["total_class"]), divisors, strata)
    except KeyError as exc:
        raise ParseError(f"SNC model is missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed SNC model: {exc}") from exc


def _fmt_mult(x: Fraction) -> int | str:
    return int(x) if x.denominator == 1 else str(x)


def model_to_json(m: SncModel) -> dict[str, Any]:
    order = {lbl: i for i, lbl in enumerate(m.labels)}
    strata = sorted(m.strata.items(), key=lambda kv: (len(kv[0]), sorted(order[x] for x in kv[0])))
    return {
        "ambient_dim": m.ambient_dim,
        "total_class": str(m.total_class),
        "divisors": [{"label": d.label, "mult": _fmt_mult(d.mult)} for d in m.divisors],
        "strata": [
            {"J": sorted(j, key=order.__getitem__), "class": str(c)} for j, c in strata
        ],
    }
