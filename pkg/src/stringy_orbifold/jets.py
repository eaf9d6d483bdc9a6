"""Truncated jet schemes of affine varieties and finite-field point counts.

The n-jets of ``X = V(f_1, ..., f_r) in A^d`` are cut out by substituting
``x_i -> sum_{j<=n} x_{i,j} t^j`` into each ``f`` and taking the coefficients
of ``t^0, ..., t^n``.  Counting their ``F_p``-points by exhaustive search is
the desk-scale probe for the structural claims about jets: truncation maps of
smooth varieties are ``A^d``-bundles, and twisted jets of ``[A^d / mu_l]``
gain ``d`` free parameters per level.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import _expr
from .errors import CapExceededError, ParseError

DEFAULT_MAX_POINTS = 10**8
_CHUNK_ROWS = 1 << 20

Monomial = tuple[int, ...]


class IntPoly:
    """Sparse integer polynomial in a fixed number of variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[Monomial, int] | None = None):
        self.nvars = nvars
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def constant(cls, nvars: int, c: int) -> IntPoly:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> IntPoly:
        return cls(nvars, {tuple(int(j == i) for j in range(nvars)): 1})

    def _lift(self, other) -> IntPoly:
        if isinstance(other, IntPoly):
            return other
        if isinstance(other, int):
            return IntPoly.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other) -> IntPoly:
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return IntPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> IntPoly:
        return IntPoly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> IntPoly:
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> IntPoly:
        return (-self) + other

    def __mul__(self, other) -> IntPoly:
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return IntPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> IntPoly:
        result = IntPoly.constant(self.nvars, 1)
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> set[int]:
        return {i for m in self.terms for i, e in enumerate(m) if e}

    def evaluate(self, point: Sequence[int], modulus: int | None = None) -> int:
        total = 0
        for m, c in self.terms.items():
            term = c
            for x, e in zip(point, m):
                if e:
                    term *= x**e
            total += term
        return total % modulus if modulus else total

    def format(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), reverse=True):
            factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e]
            mono = "*".join(factors)
            mag = abs(c)
            if not mono:
                body = str(mag)
            else:
                body = mono if mag == 1 else f"{mag}*{mono}"
            if parts:
                parts.append((" - " if c < 0 else " + ") + body)
            else:
                parts.append(("-" if c < 0 else "") + body)
        return "".join(parts)


@dataclass(frozen=True)
class PolySystem:
    vars: tuple[str, ...]
    polys: tuple[IntPoly, ...]

    def __post_init__(self):
        if not self.vars:
            raise ValueError("a polynomial system needs at least one variable")

    @property
    def num_vars(self) -> int:
        return len(self.vars)

    @classmethod
    def parse(cls, vars: Sequence[str], polys: Sequence[str]) -> PolySystem:
        vars = tuple(vars)
        if len(set(vars)) != len(vars):
            raise ParseError(f"duplicate variable names in {list(vars)}")
        return cls(vars, tuple(parse_poly(text, vars) for text in polys))

    @classmethod
    def affine_space(cls, d: int) -> PolySystem:
        return cls(tuple(f"x{i + 1}" for i in range(d)), ())


def parse_poly(text: str, vars: Sequence[str]) -> IntPoly:
    index = {name: i for i, name in enumerate(vars)}
    nvars = len(vars)

    def name(s: str, pos: int) -> IntPoly:
        if s not in index:
            raise ParseError(f"unknown variable {s!r}; declared {list(vars)}", pos)
        return IntPoly.variable(nvars, index[s])

    def power(value: IntPoly, e: Fraction, pos: int) -> IntPoly:
        if e.denominator != 1 or e < 0:
            raise ParseError("polynomial exponents must be nonnegative integers", pos)
        return value ** int(e)

    algebra = _expr.Algebra(lambda n: IntPoly.constant(nvars, n), name, power)
    return _expr.parse(text, algebra)


@dataclass(frozen=True)
class JetSystem:
    base: PolySystem
    level: int
    var_names: tuple[str, ...]
    # (index of base polynomial, power of t, coefficient polynomial)
    equations: tuple[tuple[int, int, IntPoly], ...]

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    def jet_var(self, i: int, j: int) -> int:
        """Column of ``x_{i,j}``: ordering x_{1,0}, x_{1,1}, ..., x_{d,n}."""
        return i * (self.level + 1) + j

    @property
    def polys(self) -> list[IntPoly]:
        return [eq for _, _, eq in self.equations]


def _truncated_mul(a: list[IntPoly], b: list[IntPoly]) -> list[IntPoly]:
    n = len(a)
    out = [IntPoly(a[0].nvars) for _ in range(n)]
    for i, ai in enumerate(a):
        if ai.is_zero():
            continue
        for j in range(n - i):
            if not b[j].is_zero():
                out[i + j] = out[i + j] + ai * b[j]
    return out


def substitute_series(poly: IntPoly, series: list[list[IntPoly]], nvars: int, n: int) -> list[IntPoly]:
    """Coefficients of t^0..t^n of ``poly(series)`` mod t^(n+1)."""
    total = [IntPoly(nvars) for _ in range(n + 1)]
    for mono, c in poly.terms.items():
        acc = [IntPoly.constant(nvars, c)] + [IntPoly(nvars) for _ in range(n)]
        for i, e in enumerate(mono):
            for _ in range(e):
                acc = _truncated_mul(acc, series[i])
        total = [t + x for t, x in zip(total, acc)]
    return total


def jet_equations(sys: PolySystem, n: int) -> JetSystem:
    if n < 0:
        raise ValueError("jet level must be nonnegative")
    d = sys.num_vars
    nvars = d * (n + 1)
    names = tuple(f"{v}_{j}" for v in sys.vars for j in range(n + 1))
    series = [[IntPoly.variable(nvars, i * (n + 1) + j) for j in range(n + 1)] for i in range(d)]
    equations = []
    for k, f in enumerate(sys.polys):
        for power, coeff in enumerate(substitute_series(f, series, nvars, n)):
            equations.append((k, power, coeff))
    return JetSystem(sys, n, names, tuple(equations))


def _check_field(q: int) -> None:
    if q < 2 or any(q % p == 0 for p in range(2, math.isqrt(q) + 1)):
        raise ValueError(f"q = {q} is not prime; only prime fields are supported")


def _check_cap(q: int, nvars: int, max_points: int) -> None:
    if q**nvars > max_points:
        raise CapExceededError(
            f"search space {q}^{nvars} = {q**nvars} exceeds the cap of {max_points} points"
        )


def count_solutions(polys: Sequence[IntPoly], nvars: int, p: int) -> int:
    """Exact number of common zeros in ``F_p^nvars``.

    Variables are bound in index order and each equation is tested as soon as
    its last variable is bound; surviving partial assignments are kept as
    numpy rows and processed in bounded chunks.  Variables that occur in no
    equation contribute a factor ``p`` each.
    """
    eqs = []
    for f in polys:
        reduced = {m: c % p for m, c in f.terms.items() if c % p}
        if not reduced:
            continue
        if all(not any(m) for m in reduced):
            return 0  # nonzero constant
        eqs.append(reduced)
    used = sorted({i for f in eqs for m in f for i, e in enumerate(m) if e})
    col = {v: k for k, v in enumerate(used)}
    free = nvars - len(used)

    # compiled equation: list of (coeff, [(column, power table)])
    checks: list[list] = [[] for _ in used]
    for f in eqs:
        compiled = []
        last = 0
        for m, c in f.items():
            factors = []
            for i, e in enumerate(m):
                if e:
                    table = np.array([pow(x, e, p) for x in range(p)], dtype=np.int64)
                    factors.append((col[i], table))
                    last = max(last, col[i])
            compiled.append((c, factors))
        checks[last].append(compiled)

    values = np.arange(p, dtype=np.int8)

    def satisfied(rows: np.ndarray, compiled) -> np.ndarray:
        acc = np.zeros(len(rows), dtype=np.int64)
        for c, factors in compiled:
            term = np.full(len(rows), c, dtype=np.int64)
            for k, table in factors:
                term = (term * table[rows[:, k]]) % p
            acc = (acc + term) % p
        return acc == 0

    def extend(rows: np.ndarray, k: int) -> int:
        if k == len(used):
            return len(rows)
        if len(rows) * p > _CHUNK_ROWS and len(rows) > 1:
            step = max(1, _CHUNK_ROWS // p)
            return sum(extend(rows[i:i + step], k) for i in range(0, len(rows), step))
        grown = np.empty((len(rows) * p, k + 1), dtype=np.int8)
        grown[:, :k] = np.repeat(rows, p, axis=0)
        grown[:, k] = np.tile(values, len(rows))
        for compiled in checks[k]:
            grown = grown[satisfied(grown, compiled)]
            if not len(grown):
                return 0
        return extend(grown, k + 1)

    return extend(np.zeros((1, 0), dtype=np.int8), 0) * p**free


def count_jets(sys: PolySystem, n: int, q: int, max_points: int = DEFAULT_MAX_POINTS) -> int:
    """Number of ``F_q``-points of the n-jet scheme of ``sys``."""
    _check_field(q)
    _check_cap(q, sys.num_vars * (n + 1), max_points)
    jet = jet_equations(sys, n)
    return count_solutions(jet.polys, jet.num_vars, q)


def max_level_under_cap(num_vars: int, q: int, max_points: int = DEFAULT_MAX_POINTS) -> int:
    """Largest level ``n`` with ``q^(num_vars (n+1)) <= max_points`` (or -1)."""
    n = -1
    while q ** (num_vars * (n + 2)) <= max_points:
        n += 1
    return n


@dataclass
class BundleReport:
    q: int
    dim: int
    counts: list[int]
    ratio_ok: list[bool]

    @property
    def all_ok(self) -> bool:
        return all(self.ratio_ok)

    @property
    def first_failure(self) -> int | None:
        """Smallest ``k`` with ``c_{k+1} != q^dim c_k``."""
        for k, ok in enumerate(self.ratio_ok):
            if not ok:
                return k
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "dim": self.dim,
            "counts": self.counts,
            "ratio_ok": self.ratio_ok,
            "all_ok": self.all_ok,
            "first_failure": self.first_failure,
        }


def check_smooth_bundle(
    sys: PolySystem, dim: int, n_max: int, q: int, max_points: int = DEFAULT_MAX_POINTS
) -> BundleReport:
    """Counts ``c_0..c_{n_max}`` and the checks ``c_{k+1} = q^dim * c_k``."""
    counts = [count_jets(sys, k, q, max_points) for k in range(n_max + 1)]
    ok = [counts[k + 1] == q**dim * counts[k] for k in range(n_max)]
    return BundleReport(q, dim, counts, ok)


@dataclass(frozen=True)
class TwistedJetFamily:
    """Twisted n-jets of ``[A^d / mu_l]`` over the sector with exponents ``a``.

    Coordinate ``i`` is a series ``r_0 t^a_i + r_1 t^(a_i + l) + ...`` in the
    uniformizer of the l-fold cover, truncated after ``n + 1`` parameters.
    """

    dim: int
    order: int
    exponents: tuple[int, ...]
    level: int

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(self.exponents))
        if len(self.exponents) != self.dim:
            raise ValueError("need one exponent per coordinate")
        if any(not 1 <= a <= self.order for a in self.exponents):
            raise ValueError(f"exponents must satisfy 1 <= a_j <= {self.order}")
        if self.level < 0:
            raise ValueError("level must be nonnegative")

    @property
    def cover_degree(self) -> int:
        """Truncation degree in the cover uniformizer: ``(n+1) l - 1``."""
        return (self.level + 1) * self.order - 1

    def support(self, i: int) -> list[int]:
        """Powers of t allowed in coordinate ``i`` (congruent to ``a_i`` mod l)."""
        a, l = self.exponents[i], self.order
        return [e for e in range(self.cover_degree + 1) if e % l == a % l]


def twisted_jet_count(fam: TwistedJetFamily, q: int, max_points: int = DEFAULT_MAX_POINTS) -> int:
    """Number of ``F_q``-valued truncated twisted jets in the family.

    Enumerates every parameter tuple, builds the coefficient vector of the
    truncated series and counts distinct vectors coordinate by coordinate.
    """
    _check_field(q)
    _check_cap(q, fam.dim * (fam.level + 1), max_points)
    total = 1
    width = fam.cover_degree + 1
    for i in range(fam.dim):
        support = fam.support(i)
        if len(support) != fam.level + 1:
            raise AssertionError(f"coordinate {i} has {len(support)} slots, expected {fam.level + 1}")
        seen = set()
        for params in itertools.product(range(q), repeat=len(support)):
            vec = [0] * width
            for e, r in zip(support, params):
                vec[e] = r
            seen.add(tuple(vec))
        total *= len(seen)
    return total


# -- JSON ---------------------------------------------------------------------


def system_from_json(obj: dict[str, Any]) -> PolySystem:
    try:
        return PolySystem.parse([str(v) for v in obj["vars"]], [str(p) for p in obj.get("polys", [])])
    except KeyError as exc:
        raise ParseError(f"polynomial system is missing key {exc}") from exc
