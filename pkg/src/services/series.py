"""
Series Module
This module provides exact truncated formal power series with rational
coefficients: one-variable series on an exponent grid of step 1 or 1/2, and
two-variable series truncated in t with exact polynomial coefficients in z.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Sequence

from src.services.errors import SeriesError


logger = logging.getLogger(__name__)

Number = int | Fraction


def _frac(value: Number) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise SeriesError(f"non-rational coefficient {value!r}")


def _convolve(a: Sequence, b: Sequence, count: int) -> list:
    out = [0] * count
    for i, ai in enumerate(a):
        if i >= count:
            break
        if not ai:
            continue
        lim = min(len(b), count - i)
        for j in range(lim):
            bj = b[j]
            if bj:
                out[i + j] += ai * bj
    return out


def _inverse_unit(c: Sequence, count: int) -> list:
    c0 = c[0]
    if not c0:
        raise SeriesError("division by a series without unit part")
    inv0 = Fraction(1) / c0
    out = [inv0]
    for n in range(1, count):
        acc = 0
        for k in range(1, min(n, len(c) - 1) + 1):
            ck = c[k]
            if ck:
                acc += ck * out[n - k]
        out.append(-acc * inv0)
    return out


class Series1:
    """
    Truncated Laurent-bounded power series in one variable.

    The exponent of the coefficient stored at grid index ``k`` is ``k/step``.
    Coefficients are exact for every exponent up to ``order/step``.

    Attributes:
        step (int): 1 for integer exponents, 2 for the half-integer grid.
        low (int): Grid index of the first stored coefficient.
        coeffs (tuple[Fraction, ...]): Coefficients from ``low`` upwards.
        order (int): Largest grid index known exactly.
        floor (int): Smallest grid index a result may start at.
    """

    __slots__ = ("step", "low", "coeffs", "order", "floor")

    def __init__(
        self,
        coeffs: Iterable[Number],
        order: int,
        step: int = 1,
        low: int = 0,
        floor: int | None = None,
    ):
        if step not in (1, 2):
            raise SeriesError(f"grid step must be 1 or 1/2, got 1/{step}")
        values = [_frac(c) for c in coeffs]
        values = values[: max(order - low + 1, 0)]
        start = 0
        while start < len(values) and values[start] == 0:
            start += 1
        end = len(values)
        while end > start and values[end - 1] == 0:
            end -= 1
        self.step = step
        self.order = order
        self.coeffs = tuple(values[start:end])
        self.low = low + start if self.coeffs else order + 1
        base = min(0, low) if floor is None else floor
        if self.coeffs and self.low < base:
            raise SeriesError(
                f"Laurent tail below declared floor: index {self.low} < {base}"
            )
        self.floor = base

    # constructors

    @classmethod
    def zero(cls, order: int, step: int = 1) -> Series1:
        return cls((), order, step)

    @classmethod
    def constant(cls, value: Number, order: int, step: int = 1) -> Series1:
        return cls((value,), order, step)

    @classmethod
    def monomial(
        cls, value: Number, index: int, order: int, step: int = 1, floor: int | None = None
    ) -> Series1:
        return cls((value,), order, step, low=index, floor=floor)

    @classmethod
    def variable(cls, order: int, step: int = 1) -> Series1:
        """The series ``t`` on the requested grid, known to exponent ``order``."""
        return cls.monomial(1, step, order * step, step)

    @classmethod
    def half_variable(cls, order: int) -> Series1:
        """The series ``u = t^(1/2)``; ``order`` is a grid index."""
        return cls.monomial(1, 1, order, 2)

    # basic queries

    @property
    def trunc_order(self) -> Fraction:
        return Fraction(self.order, self.step)

    @property
    def valuation(self) -> int:
        return self.low

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, index: int) -> Fraction:
        if index > self.order:
            raise SeriesError(f"index {index} beyond truncation order {self.order}")
        k = index - self.low
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def coefficient(self, exponent: Number) -> Fraction:
        index = _frac(exponent) * self.step
        if index.denominator != 1:
            raise SeriesError(f"exponent {exponent} is not on the grid")
        return self[int(index)]

    def dense(self, start: int = 0) -> list[Fraction]:
        return [self[k] for k in range(start, self.order + 1)]

    def terms(self) -> list[tuple[Fraction, Fraction]]:
        return [
            (Fraction(self.low + k, self.step), c)
            for k, c in enumerate(self.coeffs)
            if c
        ]

    def __repr__(self) -> str:
        shown = " + ".join(f"({c})t^{e}" for e, c in self.terms()[:6]) or "0"
        return f"Series1({shown} + O(t^{self.trunc_order + Fraction(1, self.step)}))"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Series1):
            return NotImplemented
        return (
            self.step == other.step
            and self.order == other.order
            and self.low == other.low
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.step, self.order, self.low, self.coeffs))

    # grid management

    def _rebuild(self, coeffs, order, low, step=None, floor=None) -> Series1:
        return Series1(
            coeffs,
            order,
            step or self.step,
            low=low,
            floor=self.floor if floor is None else floor,
        )

    def with_floor(self, floor: int) -> Series1:
        return self._rebuild(self.coeffs, self.order, self.low, floor=min(floor, 0))

    def truncate(self, order: int) -> Series1:
        if order > self.order:
            raise SeriesError(f"cannot raise truncation order {self.order} to {order}")
        return self._rebuild(self.coeffs, order, self.low)

    def extend(self, order: int) -> Series1:
        """Declare unknown coefficients as zero up to ``order`` (used inside Newton)."""
        return self._rebuild(self.coeffs, order, self.low)

    def promote(self, step: int = 2) -> Series1:
        if step == self.step:
            return self
        if self.step != 1 or step != 2:
            raise SeriesError("only promotion from the integer grid to the half grid")
        spread: list[Fraction] = []
        for c in self.coeffs:
            spread.extend((c, Fraction(0)))
        return Series1(
            spread, self.order * 2, 2, low=self.low * 2, floor=self.floor * 2
        )

    def demote(self) -> Series1:
        """Return to the integer grid; odd half-grid coefficients must vanish."""
        if self.step == 1:
            return self
        if any(self[k] for k in range(self.low, self.order + 1) if k % 2):
            raise SeriesError("series has half-integer exponents")
        lo = self.low + (self.low % 2)
        values = [self[k] for k in range(lo, self.order + 1, 2)]
        return Series1(
            values, self.order // 2, 1, low=lo // 2, floor=-((-self.floor) // 2)
        )

    def shift(self, index: int) -> Series1:
        """Multiply by the grid monomial of the given index."""
        return self._rebuild(
            self.coeffs,
            self.order + index,
            self.low + index,
            floor=min(self.floor + min(index, 0), 0),
        )

    def flip_half(self) -> Series1:
        """Substitute ``u -> -u`` on the half grid."""
        if self.step != 2:
            raise SeriesError("flip_half requires the half grid")
        values = [c if (self.low + k) % 2 == 0 else -c for k, c in enumerate(self.coeffs)]
        return self._rebuild(values, self.order, self.low)

    def odd_part_vanishes(self) -> bool:
        return all(c == 0 for k, c in enumerate(self.coeffs) if (self.low + k) % 2)

    # arithmetic

    @staticmethod
    def _align(a: Series1, b: Series1) -> tuple[Series1, Series1]:
        if a.step == b.step:
            return a, b
        return a.promote(2), b.promote(2)

    def _coerce(self, other) -> Series1 | None:
        if isinstance(other, Series1):
            return other
        if isinstance(other, (int, Fraction)):
            return None
        raise SeriesError(f"cannot combine Series1 with {type(other).__name__}")

    def __neg__(self) -> Series1:
        return self._rebuild([-c for c in self.coeffs], self.order, self.low)

    def __add__(self, other) -> Series1:
        b = self._coerce(other)
        if b is None:
            value = _frac(other)
            if self.order < 0:
                return self
            dense = {self.low + k: c for k, c in enumerate(self.coeffs)}
            dense[0] = dense.get(0, Fraction(0)) + value
            lo = min(dense)
            return self._rebuild(
                [dense.get(k, 0) for k in range(lo, max(dense) + 1)], self.order, lo
            )
        a, b = self._align(self, b)
        order = min(a.order, b.order)
        lo = min(a.low, b.low)
        values = [a[k] + b[k] if k <= order else 0 for k in range(lo, order + 1)]
        return Series1(values, order, a.step, low=lo, floor=min(a.floor, b.floor))

    __radd__ = __add__

    def __sub__(self, other) -> Series1:
        return self + (-other)

    def __rsub__(self, other) -> Series1:
        return (-self) + other

    def __mul__(self, other) -> Series1:
        b = self._coerce(other)
        if b is None:
            value = _frac(other)
            return self._rebuild([c * value for c in self.coeffs], self.order, self.low)
        a, b = self._align(self, b)
        va = a.low if a.coeffs else 0
        vb = b.low if b.coeffs else 0
        order = min(a.order + min(vb, 0), b.order + min(va, 0))
        floor = min(a.floor, b.floor)
        if not a.coeffs or not b.coeffs:
            return Series1((), order, a.step, floor=floor)
        lo = a.low + b.low
        count = order - lo + 1
        if count <= 0:
            return Series1((), order, a.step, floor=floor)
        values = _convolve(a.coeffs, b.coeffs, count)
        return Series1(values, order, a.step, low=lo, floor=floor)

    __rmul__ = __mul__

    def inverse(self) -> Series1:
        if not self.coeffs:
            raise SeriesError("division by a series that vanishes to truncation order")
        v = self.low
        unit_order = self.order - v
        values = _inverse_unit(self.coeffs, unit_order + 1)
        return Series1(values, unit_order - v, self.step, low=-v, floor=min(self.floor, -v))

    def __truediv__(self, other) -> Series1:
        b = self._coerce(other)
        if b is None:
            value = _frac(other)
            if value == 0:
                raise SeriesError("division by zero")
            return self * (1 / value)
        a, b = self._align(self, b)
        if not b.coeffs:
            raise SeriesError("division by a series that vanishes to truncation order")
        vb = b.low
        va = a.low if a.coeffs else a.order + 1
        order = min(a.order - vb, b.order - 2 * vb + va)
        floor = min(a.floor, b.floor)
        if not a.coeffs:
            return Series1((), order, a.step, floor=floor)
        low = va - vb
        count = order - low + 1
        if count <= 0:
            return Series1((), order, a.step, floor=floor)
        values = _convolve(a.coeffs, _inverse_unit(b.coeffs, count), count)
        if low < floor and any(values[: floor - low]):
            raise SeriesError(
                f"quotient leaves the declared Laurent floor ({low} < {floor})"
            )
        return Series1(values, order, a.step, low=low, floor=floor)

    def __rtruediv__(self, other) -> Series1:
        value = _frac(other)
        return Series1.constant(value, self.order, self.step) / self

    def __pow__(self, exponent: int) -> Series1:
        if not isinstance(exponent, int):
            raise SeriesError("only integer powers are supported")
        if exponent < 0:
            return (self ** (-exponent)).inverse()
        result = Series1.constant(1, self.order, self.step).with_floor(self.floor)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def derivative(self) -> Series1:
        """Derivative with respect to ``t``."""
        values = [
            c * Fraction(self.low + k, self.step) for k, c in enumerate(self.coeffs)
        ]
        return Series1(
            values,
            self.order - self.step,
            self.step,
            low=self.low - self.step,
            floor=min(self.floor - self.step, 0),
        )

    def compose_scale(self, factor: Number) -> Series1:
        """Substitute ``t -> factor * t`` (integer grid only)."""
        if self.step != 1:
            raise SeriesError("scaling substitution requires the integer grid")
        value = _frac(factor)
        return self._rebuild(
            [c * value ** (self.low + k) for k, c in enumerate(self.coeffs)],
            self.order,
            self.low,
        )

    def agrees_with(self, other: Series1, order: Number | None = None) -> bool:
        """Coefficient equality up to the common (or requested) exponent."""
        a, b = self._align(self, other)
        top = min(a.order, b.order)
        if order is not None:
            wanted = _frac(order) * a.step
            if wanted > top:
                return False
            top = int(wanted)
        lo = min(a.low, b.low, 0)
        return all(a[k] == b[k] for k in range(lo, top + 1))

    # serialization

    def to_json(self) -> dict:
        return {
            "grid_step": f"1/{self.step}" if self.step == 2 else "1",
            "trunc_order": str(self.trunc_order),
            "terms": [
                [str(e.numerator), str(e.denominator), str(c.numerator), str(c.denominator)]
                for e, c in self.terms()
            ],
        }

    @classmethod
    def from_json(cls, payload: dict) -> Series1:
        step = 2 if payload["grid_step"] == "1/2" else 1
        order = Fraction(payload["trunc_order"]) * step
        terms = {
            int(Fraction(int(en), int(ed)) * step): Fraction(int(cn), int(cd))
            for en, ed, cn, cd in payload["terms"]
        }
        if not terms:
            return cls.zero(int(order), step)
        lo = min(terms)
        values = [terms.get(k, 0) for k in range(lo, max(terms) + 1)]
        return cls(values, int(order), step, low=lo)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["exponent", "coefficient"])
        for k in range(min(self.low, 0), self.order + 1):
            writer.writerow([str(Fraction(k, self.step)), str(self[k])])
        return buffer.getvalue()


def sqrt_series(f: Series1) -> Series1:
    """
    Square root with the positive leading coefficient.

    Args:
        f (Series1): Series with even valuation and a rational square leading coefficient.

    Returns:
        Series1: The root ``g`` with ``g*g == f`` to truncation order.
    """
    if f.is_zero():
        raise SeriesError("square root of a vanishing series")
    v = f.low
    if v % 2:
        raise SeriesError("square root of a series with odd valuation")
    c0 = f.coeffs[0]
    if c0 < 0:
        raise SeriesError("negative leading coefficient has no rational square root")
    rn, rd = math.isqrt(c0.numerator), math.isqrt(c0.denominator)
    if rn * rn != c0.numerator or rd * rd != c0.denominator:
        raise SeriesError(f"leading coefficient {c0} is not a rational square")
    s0 = Fraction(rn, rd)
    count = f.order - v + 1
    unit = list(f.coeffs) + [Fraction(0)] * max(count - len(f.coeffs), 0)
    out = [s0]
    for n in range(1, count):
        acc = unit[n]
        for k in range(1, n):
            acc -= out[k] * out[n - k]
        out.append(acc / (2 * s0))
    return Series1(out, f.order - v // 2, f.step, low=v // 2, floor=min(f.floor, 0))


def log_series(f: Series1) -> Series1:
    if f.low != 0 or f[0] != 1:
        raise SeriesError("logarithm requires constant term 1")
    count = f.order + 1
    fc = f.dense()
    out = [Fraction(0)] * count
    for n in range(1, count):
        acc = n * fc[n]
        for k in range(1, n):
            if out[k] and fc[n - k]:
                acc -= k * out[k] * fc[n - k]
        out[n] = acc / n
    return Series1(out, f.order, f.step)


def exp_series(g: Series1) -> Series1:
    if g.coeffs and g.low <= 0 and g[0] != 0:
        raise SeriesError("exponential requires a vanishing constant term")
    if g.coeffs and g.low < 0:
        raise SeriesError("exponential of a Laurent series")
    count = g.order + 1
    gc = g.dense()
    out = [Fraction(1)] + [Fraction(0)] * (count - 1)
    for n in range(1, count):
        acc = Fraction(0)
        for k in range(1, n + 1):
            if gc[k]:
                acc += k * gc[k] * out[n - k]
        out[n] = acc / n
    return Series1(out, g.order, g.step)


def cycle_sum(x: Series1) -> Series1:
    """Compute ``sum_{k>=1} x^k / k`` for a series without constant term."""
    if x.coeffs and x.low <= 0:
        raise SeriesError("cycle sum requires positive valuation")
    total = Series1.zero(x.order, x.step)
    power = x
    k = 1
    while power.coeffs:
        total = total + power * Fraction(1, k)
        k += 1
        power = power * x
    return total


def evaluate_polynomial(coefficients: Sequence[Series1 | Number], x: Series1) -> Series1:
    """Horner evaluation of ``sum_k coefficients[k] * x^k``."""
    result: Series1 | None = None
    for c in reversed(coefficients):
        if result is None:
            result = c if isinstance(c, Series1) else Series1.constant(c, x.order, x.step)
        else:
            result = result * x + c
    if result is None:
        raise SeriesError("empty polynomial")
    return result


def newton_solve(
    coefficients: Sequence[Series1 | Number], init: Series1, order: int | None = None
) -> Series1:
    """
    Solve ``sum_k A_k X^k = 0`` for the power series ``X`` starting from ``init``.

    Args:
        coefficients (Sequence[Series1 | Number]): The coefficients ``A_k`` of the polynomial in ``X``.
        init (Series1): Initial term; must satisfy the equation at order 0.
        order (int | None): Target grid index; defaults to the coefficients' common order.

    Returns:
        Series1: The unique solution continuing ``init``.
    """
    series_coeffs = [c for c in coefficients if isinstance(c, Series1)]
    if not series_coeffs:
        raise SeriesError("Newton solve needs at least one series coefficient")
    step = max(c.step for c in series_coeffs + [init])
    target = min(c.promote(step).order if c.step != step else c.order for c in series_coeffs)
    if order is not None:
        if order > target:
            raise SeriesError(f"coefficients are only known to index {target}")
        target = order
    coeffs = [c.promote(step) if isinstance(c, Series1) else c for c in coefficients]
    derived = [
        (k * c if isinstance(c, Series1) else k * _frac(c)) for k, c in enumerate(coeffs)
    ][1:]

    def at(prec: int, c):
        return c.truncate(prec) if isinstance(c, Series1) else c

    x = init.promote(step)
    known = 0
    if x.coeffs and x.low < 0:
        raise SeriesError("Newton solve expects a power-series initial term")
    residual0 = evaluate_polynomial([at(0, c) for c in coeffs], x.truncate(0))
    if residual0[0] != 0:
        raise SeriesError("initial term does not solve the equation at order 0")
    steps = 0
    while known < target:
        prec = min(2 * known + 1, target)
        xp = x.extend(prec) if x.order < prec else x.truncate(prec)
        value = evaluate_polynomial([at(prec, c) for c in coeffs], xp)
        slope = evaluate_polynomial([at(prec, c) for c in derived], xp)
        if slope.is_zero() or slope.low != 0:
            raise SeriesError("singular Newton step: derivative is not a unit")
        x = xp - value / slope
        known = prec
        steps += 1
        if steps > 4 * max(target, 1).bit_length() + 8:
            raise SeriesError("Newton iteration did not converge")
    residual = evaluate_polynomial([at(target, c) for c in coeffs], x.truncate(target))
    if not residual.is_zero():
        raise SeriesError("Newton iteration did not converge")
    logger.debug("newton_solve reached index %d in %d steps", target, steps)
    return x.truncate(target)


# two-variable series

Poly = tuple[Fraction, ...]


def ptrim(p: Iterable[Number]) -> Poly:
    values = [_frac(c) for c in p]
    while values and values[-1] == 0:
        values.pop()
    return tuple(values)


def padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    return ptrim([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])


def pneg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def pscale(a: Poly, c: Number) -> Poly:
    return ptrim([x * c for x in a])


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    return ptrim(_convolve(a, b, len(a) + len(b) - 1))


def peval(a: Poly, z: Number) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * z + c
    return acc


class Series2:
    """
    Series in ``t`` truncated at ``order`` whose coefficients are exact polynomials in ``z``.

    Attributes:
        coeffs (tuple[Poly, ...]): Coefficient polynomial of ``t^n`` at position ``n``.
        order (int): Largest power of ``t`` known exactly.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable[Iterable[Number]], order: int):
        values = [ptrim(p) for p in coeffs][: order + 1]
        while values and not values[-1]:
            values.pop()
        self.coeffs: tuple[Poly, ...] = tuple(values)
        self.order = order

    @classmethod
    def constant(cls, value: Number, order: int) -> Series2:
        return cls([(value,)], order)

    @classmethod
    def t(cls, order: int) -> Series2:
        return cls([(), (1,)], order)

    @classmethod
    def z(cls, order: int, value: Number | None = None) -> Series2:
        """The variable ``z``, or the constant ``value`` when one is given."""
        return cls([(value,) if value is not None else (0, 1)], order)

    @classmethod
    def from_series1(cls, s: Series1) -> Series2:
        if s.step != 1 or (s.coeffs and s.low < 0):
            raise SeriesError("only integer-grid power series embed in two variables")
        return cls([(c,) for c in s.dense()], s.order)

    def __getitem__(self, n: int) -> Poly:
        if n > self.order:
            raise SeriesError(f"index {n} beyond truncation order {self.order}")
        return self.coeffs[n] if n < len(self.coeffs) else ()

    def coefficient(self, n: int, k: int) -> Fraction:
        p = self[n]
        return p[k] if k < len(p) else Fraction(0)

    def degree(self, n: int) -> int:
        return len(self[n]) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Series2):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    def __repr__(self) -> str:
        return f"Series2({list(self.coeffs)[:4]}... + O(t^{self.order + 1}))"

    def truncate(self, order: int) -> Series2:
        if order > self.order:
            raise SeriesError(f"cannot raise truncation order {self.order} to {order}")
        return Series2(self.coeffs, order)

    def extend(self, order: int) -> Series2:
        return Series2(self.coeffs, order)

    def _coerce(self, other) -> Series2:
        if isinstance(other, Series2):
            return other
        if isinstance(other, (int, Fraction)):
            return Series2.constant(other, self.order)
        raise SeriesError(f"cannot combine Series2 with {type(other).__name__}")

    def __neg__(self) -> Series2:
        return Series2([pneg(p) for p in self.coeffs], self.order)

    def __add__(self, other) -> Series2:
        b = self._coerce(other)
        order = min(self.order, b.order)
        return Series2([padd(self[n], b[n]) for n in range(order + 1)], order)

    __radd__ = __add__

    def __sub__(self, other) -> Series2:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Series2:
        return self._coerce(other) - self

    def __mul__(self, other) -> Series2:
        if isinstance(other, (int, Fraction)):
            return Series2([pscale(p, other) for p in self.coeffs], self.order)
        b = self._coerce(other)
        order = min(self.order, b.order)
        out: list[Poly] = [()] * (order + 1)
        for i, p in enumerate(self.coeffs[: order + 1]):
            if not p:
                continue
            for j, q in enumerate(b.coeffs[: order + 1 - i]):
                if q:
                    out[i + j] = padd(out[i + j], pmul(p, q))
        return Series2(out, order)

    __rmul__ = __mul__

    def inverse(self) -> Series2:
        lead = self[0]
        if len(lead) != 1:
            raise SeriesError(
                "two-variable division needs a nonzero constant leading coefficient"
            )
        inv0 = Fraction(1) / lead[0]
        out: list[Poly] = [(inv0,)]
        for n in range(1, self.order + 1):
            acc: Poly = ()
            for k in range(1, n + 1):
                if k < len(self.coeffs) and self.coeffs[k] and out[n - k]:
                    acc = padd(acc, pmul(self.coeffs[k], out[n - k]))
            out.append(pscale(acc, -inv0))
        return Series2(out, self.order)

    def __truediv__(self, other) -> Series2:
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / _frac(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> Series2:
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> Series2:
        if exponent < 0:
            return (self ** (-exponent)).inverse()
        result = Series2.constant(1, self.order)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def shift_t(self, k: int) -> Series2:
        """Multiply by ``t^k`` keeping the truncation order."""
        return Series2([()] * k + list(self.coeffs), self.order)

    def at_z(self, value: Number) -> Series1:
        return Series1([peval(p, _frac(value)) for p in self.coeffs], self.order)

    def as_series1(self) -> Series1:
        if any(len(p) > 1 for p in self.coeffs):
            raise SeriesError("series depends on z")
        return Series1([p[0] if p else 0 for p in self.coeffs], self.order)

    def agrees_with(self, other: Series2, order: int | None = None) -> bool:
        top = min(self.order, other.order) if order is None else order
        if top > min(self.order, other.order):
            return False
        return all(self[n] == other[n] for n in range(top + 1))

    def first_difference(self, other: Series2) -> int:
        top = min(self.order, other.order)
        for n in range(top + 1):
            if self[n] != other[n]:
                return n
        return top + 1

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["t_exponent", "z_exponent", "coefficient"])
        for n in range(self.order + 1):
            for k, c in enumerate(self[n]):
                if c:
                    writer.writerow([n, k, str(c)])
        return buffer.getvalue()

    def to_json(self) -> dict:
        return {
            "trunc_order_t": self.order,
            "terms": [
                [n, [[str(c.numerator), str(c.denominator)] for c in p]]
                for n, p in enumerate(self.coeffs)
                if p
            ],
        }


@dataclass(frozen=True)
class Parametrization:
    """
    Relations ``t = y * t_unit(y, a)`` and ``z = a * z_unit(y, a)``.

    Both cofactors must have constant term 1 at ``y = 0``.
    """

    t_unit: Callable[[Series2, Series2], Series2]
    z_unit: Callable[[Series2, Series2], Series2]


def invert_2param(
    parametrization: Parametrization, order: int, z_value: Number | None = None
) -> tuple[Series2, Series2]:
    """
    Invert a two-parameter parametrization as series ``y(t, z)`` and ``alpha(t, z)``.

    Args:
        parametrization (Parametrization): The unit cofactors of ``t`` and ``z``.
        order (int): Truncation order in ``t``.
        z_value (Number | None): Specialize ``z`` to a rational value.

    Returns:
        tuple[Series2, Series2]: ``(y, alpha)`` with ``y = t + O(t^2)`` and ``alpha = z + O(t)``.
    """
    z = Series2.z(order, z_value)
    y = Series2([], order)
    alpha = z
    for k in range(1, order + 2):
        prec = min(k, order)
        t = Series2.t(prec)
        yk, ak = y.extend(prec) if y.order < prec else y.truncate(prec), alpha.truncate(prec)
        zk = z.truncate(prec)
        new_y = t / parametrization.t_unit(yk, ak)
        new_alpha = zk / parametrization.z_unit(yk, ak)
        if k > 1:
            gained = min(new_y.first_difference(yk), new_alpha.first_difference(ak))
            if gained < min(k - 1, prec):
                raise SeriesError(
                    f"parametrization inversion stalled at t-order {gained} on pass {k}"
                )
        y, alpha = new_y.extend(order), new_alpha.extend(order)
    y, alpha = y.truncate(order), alpha.truncate(order)
    t = Series2.t(order)
    if not (y * parametrization.t_unit(y, alpha) - t).is_zero():
        raise SeriesError("inverted series do not reproduce t")
    if not (alpha * parametrization.z_unit(y, alpha) - z).is_zero():
        raise SeriesError("inverted series do not reproduce z")
    return y, alpha
