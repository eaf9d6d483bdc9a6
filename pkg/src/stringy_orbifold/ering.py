"""Exact arithmetic for Hodge-characteristic values.

``EPoly`` is a Laurent polynomial in two variables ``u`` and ``v`` with
integer coefficients.  Exponents are rationals on a common lattice
``(1/N)Z``; ``N`` (the *scale*) is kept minimal, so it is 1 for anything
built from integral data.  The Lefschetz class is ``L = u*v``.

``ERat`` is an ``EPoly`` divided by a product of factors ``L^k - 1``.  That
family is closed under everything the stringy and orbifold formulas need and
lets equality be decided by cross-multiplication, without polynomial GCDs.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Mapping, Union

from . import _expr
from .errors import ParseError, PoleError

Rational = Union[int, Fraction]


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _iroot(n: int, k: int) -> int | None:
    """Exact integer k-th root of n >= 0, or None."""
    if n < 2:
        return n
    r = round(n ** (1.0 / k)) if n.bit_length() < 1000 else 1 << (n.bit_length() // k)
    # Newton refinement, then fix-up around the float guess
    while True:
        nr = ((k - 1) * r + n // r ** (k - 1)) // k
        if abs(nr - r) <= 1:
            break
        r = nr
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    return None


def rational_power(base: Fraction, exp: Fraction) -> Fraction:
    """``base ** exp`` as an exact rational; ValueError if irrational."""
    base, exp = Fraction(base), Fraction(exp)
    if base == 0:
        if exp < 0:
            raise PoleError("zero raised to a negative power")
        return Fraction(0) if exp > 0 else Fraction(1)
    if exp.denominator == 1:
        return base ** int(exp)
    n = exp.denominator
    sign = 1
    if base < 0:
        if n % 2 == 0:
            raise ValueError(f"even root of negative number {base}")
        sign = -1
        base = -base
    num = _iroot(base.numerator, n)
    den = _iroot(base.denominator, n)
    if num is None or den is None:
        raise ValueError(f"{base}^(1/{n}) is not rational")
    return (sign * Fraction(num, den)) ** exp.numerator


class EPoly:
    """Integer Laurent polynomial in ``u``, ``v`` with rational exponents.

    Build one from a mapping ``{(p, q): coeff}``; exponents may be ints or
    Fractions.  Values are immutable and hashable.
    """

    __slots__ = ("_terms", "_scale", "_hash")

    def __init__(self, terms: Mapping[tuple[Rational, Rational], int] | int = 0):
        if isinstance(terms, int):
            terms = {(0, 0): terms}
        scale = 1
        for p, q in terms:
            if not (type(p) is int and type(q) is int):
                scale = _lcm(scale, _lcm(Fraction(p).denominator, Fraction(q).denominator))
        scaled: dict[tuple[int, int], int] = {}
        for (p, q), c in terms.items():
            if not isinstance(c, int):
                raise TypeError(f"coefficients must be integers, got {c!r}")
            key = (p, q) if scale == 1 else (int(Fraction(p) * scale), int(Fraction(q) * scale))
            key = (int(key[0]), int(key[1]))
            scaled[key] = scaled.get(key, 0) + c
        self._set(scaled, scale)

    def _set(self, scaled: dict[tuple[int, int], int], scale: int) -> None:
        scaled = {k: c for k, c in scaled.items() if c}
        g = scale
        for p, q in scaled:
            g = math.gcd(g, math.gcd(p, q))
            if g == 1:
                break
        if g > 1:
            scaled = {(p // g, q // g): c for (p, q), c in scaled.items()}
            scale //= g
        if not scaled:
            scale = 1
        self._terms = scaled
        self._scale = scale
        self._hash = None

    @classmethod
    def _from_scaled(cls, scaled: dict[tuple[int, int], int], scale: int) -> EPoly:
        obj = cls.__new__(cls)
        obj._set(scaled, scale)
        return obj

    # -- inspection -------------------------------------------------------

    @property
    def scale(self) -> int:
        """Common denominator of all exponents (1 for integral exponents)."""
        return self._scale

    @property
    def terms(self) -> dict[tuple[Fraction, Fraction], int]:
        n = self._scale
        return {
            (Fraction(p, n), Fraction(q, n)): self._terms[(p, q)]
            for p, q in sorted(self._terms, reverse=True)
        }

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_integral(self) -> bool:
        return self._scale == 1

    def is_lefschetz_polynomial(self) -> bool:
        """True when every monomial is a power of ``L`` (p == q)."""
        return all(p == q for p, q in self._terms)

    def degree(self) -> Fraction:
        """Largest ``(p+q)/2`` over the terms; the L-degree.  Zero for 0."""
        if not self._terms:
            return Fraction(0)
        return Fraction(max(p + q for p, q in self._terms), 2 * self._scale)

    def low_degree(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        return Fraction(min(p + q for p, q in self._terms), 2 * self._scale)

    def coefficient(self, p: Rational, q: Rational) -> int:
        p, q = Fraction(p) * self._scale, Fraction(q) * self._scale
        if p.denominator != 1 or q.denominator != 1:
            return 0
        return self._terms.get((int(p), int(q)), 0)

    # -- ring operations --------------------------------------------------

    def _aligned(self, other: EPoly) -> tuple[dict, dict, int]:
        n = _lcm(self._scale, other._scale)
        a, b = n // self._scale, n // other._scale
        left = self._terms if a == 1 else {(p * a, q * a): c for (p, q), c in self._terms.items()}
        right = other._terms if b == 1 else {(p * b, q * b): c for (p, q), c in other._terms.items()}
        return left, right, n

    def __add__(self, other) -> EPoly:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        left, right, n = self._aligned(other)
        out = dict(left)
        for k, c in right.items():
            out[k] = out.get(k, 0) + c
        return EPoly._from_scaled(out, n)

    __radd__ = __add__

    def __neg__(self) -> EPoly:
        return EPoly._from_scaled({k: -c for k, c in self._terms.items()}, self._scale)

    def __sub__(self, other) -> EPoly:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> EPoly:
        return (-self) + other

    def __mul__(self, other) -> EPoly:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        left, right, n = self._aligned(other)
        out: dict[tuple[int, int], int] = {}
        for (p1, q1), c1 in left.items():
            for (p2, q2), c2 in right.items():
                k = (p1 + p2, q1 + q2)
                out[k] = out.get(k, 0) + c1 * c2
        return EPoly._from_scaled(out, n)

    __rmul__ = __mul__

    def __pow__(self, e) -> EPoly:
        e = Fraction(e)
        if e.denominator == 1 and e >= 0:
            result, base, k = EPoly(1), self, int(e)
            while k:
                if k & 1:
                    result = result * base
                base = base * base
                k >>= 1
            return result
        if not self.is_monomial():
            raise ValueError("only monomials take negative or fractional powers")
        ((p, q), c), = self._terms.items()
        if c not in (1, -1) or (c == -1 and e.denominator != 1):
            raise ValueError(f"cannot raise {self} to the power {e}")
        sign = -1 if c == -1 and int(e) % 2 else 1
        n = self._scale
        return EPoly({(Fraction(p, n) * e, Fraction(q, n) * e): sign})

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._scale == other._scale and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._scale, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- division by L^k - 1 -----------------------------------------------

    def divide_lefschetz_factor(self, k: Rational) -> EPoly | None:
        """Exact quotient by ``L^k - 1`` or None when it does not divide."""
        k = Fraction(k)
        if k == 0:
            raise ZeroDivisionError("L^0 - 1 is zero")
        if sum(self._terms.values()):
            return None  # L^k - 1 vanishes at u = v = 1
        n = _lcm(self._scale, k.denominator)
        a = n // self._scale
        kk = int(k * n)
        # u^p v^q = u^(p-q) L^q: group by the off-diagonal shift and q mod k
        groups: dict[tuple[int, int], dict[int, int]] = {}
        for (p, q), c in self._terms.items():
            p, q = p * a, q * a
            j, r = divmod(q, kk)
            groups.setdefault((p - q, r), {})[j] = c
        out: dict[tuple[int, int], int] = {}
        for (shift, r), coeffs in groups.items():
            if sum(coeffs.values()) != 0:
                return None
            lo, hi = min(coeffs), max(coeffs)
            running = 0
            # (y - 1) * sum b_j y^j with b_j = sum_{i > j} c_i
            for j in range(hi - 1, lo - 1, -1):
                running += coeffs.get(j + 1, 0)
                if running:
                    q = r + j * kk
                    out[(q + shift, q)] = running
        return EPoly._from_scaled(out, n)

    # -- evaluation and printing -----------------------------------------

    def specialize(self, u0: Rational, v0: Rational) -> Fraction:
        u0, v0 = Fraction(u0), Fraction(v0)
        n = self._scale
        total = Fraction(0)
        for (p, q), c in self._terms.items():
            g = math.gcd(n, math.gcd(p, q))
            pp, qq, nn = p // g, q // g, n // g
            if (u0 == 0 and pp < 0) or (v0 == 0 and qq < 0):
                raise PoleError(f"monomial u^{Fraction(p, n)} v^{Fraction(q, n)} has a pole")
            inner = (u0**pp if pp else Fraction(1)) * (v0**qq if qq else Fraction(1))
            try:
                total += c * rational_power(inner, Fraction(1, nn))
            except ValueError as exc:
                raise ValueError(
                    f"exponents on lattice 1/{n} are not compatible with (u, v) = ({u0}, {v0})"
                ) from exc
        return total

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (p, q), c in self.terms.items():
            mono = _format_monomial(p, q)
            mag = abs(c)
            if mono == "1":
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"EPoly({str(self)!r})"


def _format_exponent(e: Fraction) -> str:
    if e.denominator == 1:
        return str(e.numerator)
    return f"({e.numerator}/{e.denominator})"


def _format_power(var: str, e: Fraction) -> str:
    return var if e == 1 else f"{var}^{_format_exponent(e)}"


def _format_monomial(p: Fraction, q: Fraction) -> str:
    if p == q:
        return "1" if p == 0 else _format_power("L", p)
    factors = [_format_power(var, e) for var, e in (("u", p), ("v", q)) if e != 0]
    return "*".join(factors)


def _coerce(x) -> EPoly:
    if isinstance(x, EPoly):
        return x
    if isinstance(x, int):
        return EPoly(x)
    return NotImplemented


ONE = EPoly(1)
ZERO = EPoly(0)
L = EPoly({(1, 1): 1})
U = EPoly({(1, 0): 1})
V = EPoly({(0, 1): 1})


@lru_cache(maxsize=1024)
def lefschetz_power(e: Rational) -> EPoly:
    """The monomial ``L^e = u^e v^e``."""
    e = Fraction(e)
    return EPoly._from_scaled({(e.numerator, e.numerator): 1}, e.denominator)


@lru_cache(maxsize=1024)
def lefschetz_factor(k: Rational) -> EPoly:
    """The polynomial ``L^k - 1``."""
    k = Fraction(k)
    return EPoly._from_scaled({(k.numerator, k.numerator): 1, (0, 0): -1}, k.denominator)


def factor_lefschetz_product(poly: EPoly) -> tuple[int, Fraction, list[Fraction]] | None:
    """Write ``poly`` as ``sign * L^e * prod(L^k - 1)``, or return None."""
    if poly.is_zero() or not poly.is_lefschetz_polynomial():
        return None
    e0 = poly.low_degree()
    rest = poly * lefschetz_power(-e0)
    ks: list[Fraction] = []
    while not (rest.is_monomial() and rest.degree() == 0):
        k = min(p for (p, _q) in rest.terms if p > 0)
        quotient = rest.divide_lefschetz_factor(k)
        if quotient is None:
            return None
        ks.append(k)
        rest = quotient
    sign = rest.coefficient(0, 0)
    if sign not in (1, -1):
        return None
    return sign, e0, sorted(ks)


class ERat:
    """``numerator / prod(L^k - 1 for k in factors)``.

    Equality (``==``) is the exact cross-multiplied test of :func:`erat_eq`,
    so ERat values are deliberately unhashable.
    """

    __slots__ = ("numerator", "factors")

    def __init__(self, numerator: EPoly | int, factors: Iterable[Rational] = ()):
        numerator = _coerce(numerator)
        if numerator is NotImplemented:
            raise TypeError("numerator must be an EPoly or int")
        fs = tuple(sorted(Fraction(k) for k in factors))
        if any(k == 0 for k in fs):
            raise ValueError("denominator factor L^0 - 1 is zero")
        if numerator.is_zero():
            fs = ()
        self.numerator = numerator
        self.factors = fs

    # -- structure --------------------------------------------------------

    def denominator(self) -> EPoly:
        return reduce(lambda acc, k: acc * lefschetz_factor(k), self.factors, ONE)

    def is_polynomial(self) -> bool:
        return not self.factors

    def as_epoly(self) -> EPoly:
        r = self.reduced()
        if r.factors:
            raise ValueError(f"{self} is not a polynomial")
        return r.numerator

    @property
    def scale(self) -> int:
        return reduce(_lcm, (k.denominator for k in self.factors), self.numerator.scale)

    def reduced(self) -> ERat:
        """Cancel every denominator factor that divides the numerator exactly."""
        num = self.numerator
        kept = []
        for k in self.factors:
            q = num.divide_lefschetz_factor(k)
            if q is None:
                kept.append(k)
            else:
                num = q
        return ERat(num, kept)

    def series_degree(self) -> Fraction:
        """Upper bound on the L-degree of every term in the expansion."""
        return self.numerator.degree() - sum(self.factors, Fraction(0))

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other) -> ERat:
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        ca, cb = Counter(self.factors), Counter(other.factors)
        union = ca | cb
        num_a = self.numerator
        for k, m in (union - ca).items():
            num_a = num_a * lefschetz_factor(k) ** m
        num_b = other.numerator
        for k, m in (union - cb).items():
            num_b = num_b * lefschetz_factor(k) ** m
        return ERat(num_a + num_b, union.elements()).reduced()

    __radd__ = __add__

    def __neg__(self) -> ERat:
        return ERat(-self.numerator, self.factors)

    def __sub__(self, other) -> ERat:
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> ERat:
        return (-self) + other

    def __mul__(self, other) -> ERat:
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return ERat(self.numerator * other.numerator, self.factors + other.factors).reduced()

    __rmul__ = __mul__

    def inverse(self) -> ERat:
        if self.numerator.is_monomial():
            (_pq, c), = self.numerator.terms.items()
            if c in (1, -1):
                return ERat(self.numerator ** -1 * self.denominator())
        split = factor_lefschetz_product(self.numerator)
        if split is None:
            raise ValueError(
                f"cannot invert {self}: numerator is not ±L^e times a product of (L^k - 1)"
            )
        sign, e, ks = split
        num = sign * lefschetz_power(-e) * self.denominator()
        return ERat(num, ks).reduced()

    def __truediv__(self, other) -> ERat:
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> ERat:
        return _coerce_rat(other) * self.inverse()

    def __pow__(self, e: int) -> ERat:
        if not isinstance(e, int):
            raise TypeError("ERat powers must be integers")
        if e < 0:
            return self.inverse() ** (-e)
        return ERat(self.numerator**e, self.factors * e)

    def __eq__(self, other) -> bool:
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return erat_eq(self, other)

    __hash__ = None  # type: ignore[assignment]

    # -- evaluation and printing -----------------------------------------

    def specialize(self, u0: Rational, v0: Rational) -> Fraction:
        return specialize(self, u0, v0)

    def __str__(self) -> str:
        if not self.factors:
            return str(self.numerator)
        num = str(self.numerator)
        if not self.numerator.is_monomial():
            num = f"({num})"
        dens = [f"({lefschetz_factor(k)})" for k in self.factors]
        den = dens[0] if len(dens) == 1 else "(" + "*".join(dens) + ")"
        return f"{num}/{den}"

    def __repr__(self) -> str:
        return f"ERat({str(self)!r})"


def _coerce_rat(x) -> ERat:
    if isinstance(x, ERat):
        return x
    p = _coerce(x)
    if p is NotImplemented:
        return NotImplemented
    return ERat(p)


def erat_eq(a: ERat | EPoly, b: ERat | EPoly) -> bool:
    """Exact equality: ``num(a) * den(b) == num(b) * den(a)``."""
    a, b = _coerce_rat(a), _coerce_rat(b)
    if a.factors == b.factors:
        return a.numerator == b.numerator
    return a.numerator * b.denominator() == b.numerator * a.denominator()


# -- filtration truncation ------------------------------------------------


@dataclass(frozen=True)
class FiltrationSeries:
    """Expansion of an ERat in powers of ``L^-1``, cut off below degree ``-level``.

    A monomial ``u^p v^q`` survives when ``(p + q)/2 >= -level``.
    """

    level: int
    poly: EPoly

    def by_degree(self) -> dict[Fraction, EPoly]:
        """Terms grouped by L-degree ``(p+q)/2``, highest first."""
        out: dict[Fraction, dict] = {}
        for (p, q), c in self.poly.terms.items():
            out.setdefault((p + q) / 2, {})[(p, q)] = c
        return {d: EPoly(out[d]) for d in sorted(out, reverse=True)}

    def __str__(self) -> str:
        return str(self.poly)


def _drop_below(poly: EPoly, level: int) -> EPoly:
    cutoff = -Fraction(level)
    return EPoly({pq: c for pq, c in poly.terms.items() if (pq[0] + pq[1]) / 2 >= cutoff})


def truncate_filtration(x: ERat | EPoly, m: int) -> FiltrationSeries:
    """Expand ``x`` via ``1/(L^k - 1) = L^-k + L^-2k + ...`` keeping degree >= -m."""
    x = _coerce_rat(x)
    if x is NotImplemented:
        raise TypeError("expected an ERat or EPoly")
    if any(k <= 0 for k in x.factors):
        raise ValueError("truncation needs every denominator factor L^k - 1 to have k > 0")
    result = _drop_below(x.numerator, m)
    for k in x.factors:
        if result.is_zero():
            break
        top = result.degree()
        # series terms only lower the degree, so truncating as we go is exact
        jmax = math.floor((top + m) / k)
        series = EPoly({(-j * k, -j * k): 1 for j in range(1, jmax + 1)}) if jmax >= 1 else ZERO
        result = _drop_below(result * series, m)
    return FiltrationSeries(m, result)


# -- specialization --------------------------------------------------------


def specialize(x: ERat | EPoly, u0: Rational, v0: Rational) -> Fraction:
    """Evaluate at ``(u, v) = (u0, v0)`` exactly."""
    x = _coerce_rat(x)
    u0, v0 = Fraction(u0), Fraction(v0)
    den = Fraction(1)
    lv = u0 * v0
    for k in x.factors:
        try:
            value = rational_power(lv, k) - 1
        except ValueError as exc:
            raise ValueError(f"L^{k} is irrational at L = {lv}") from exc
        if value == 0:
            raise PoleError(f"pole: factor {lefschetz_factor(k)} vanishes at (u, v) = ({u0}, {v0})")
        den *= value
    return x.numerator.specialize(u0, v0) / den


# -- parsing ----------------------------------------------------------------


def _rat_name(name: str, pos: int) -> ERat:
    atoms = {"u": U, "v": V, "L": L}
    if name not in atoms:
        raise ParseError(f"unknown variable {name!r}; expected u, v or L", pos)
    return ERat(atoms[name])


def _rat_power(value: ERat, e: Fraction, pos: int) -> ERat:
    try:
        if e.denominator == 1:
            return value ** int(e)
        poly = value.as_epoly()
        return ERat(poly**e)
    except ValueError as exc:
        raise ParseError(str(exc), pos) from exc


def _rat_divide(a: ERat, b: ERat, pos: int) -> ERat:
    try:
        return a / b
    except ValueError as exc:
        raise ParseError(
            "denominator must be a monomial in L times a product of (L^k - 1) factors", pos
        ) from exc


_RAT_ALGEBRA = _expr.Algebra(
    integer=lambda n: ERat(EPoly(n)),
    name=_rat_name,
    power=_rat_power,
    divide=_rat_divide,
)


def erat_parse(text: str) -> ERat:
    """Parse an expression that may divide by products of ``(L^k - 1)``."""
    return _expr.parse(text, _RAT_ALGEBRA).reduced()


def epoly_parse(text: str) -> EPoly:
    """Parse a polynomial expression in ``u``, ``v`` and ``L = u*v``."""
    value = erat_parse(text)
    if value.factors:
        raise ParseError(f"{text!r} is not a polynomial (denominator {value.denominator()})", 0)
    return value.numerator
