"""
Truncated formal power series in q with exact rational coefficients.

A ``PowerSeries`` of order N carries the coefficients of q^0, ..., q^N.
Binary operations between series of different orders silently truncate
to the smaller order; the result records the order it is valid to.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]


class NonUnitSeriesError(ValueError):
    """Raised when inverting a series whose constant term vanishes."""


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _common_denominator(coeffs: Sequence[Fraction]) -> tuple[list[int], int]:
    den = 1
    for c in coeffs:
        if c.denominator != 1:
            den = lcm(den, c.denominator)
    return [c.numerator * (den // c.denominator) for c in coeffs], den


@dataclass(frozen=True)
class PowerSeries:
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a power series needs at least the constant coefficient")

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, order: int | None = None) -> "PowerSeries":
        values = [as_fraction(c) for c in coeffs]
        if order is None:
            order = len(values) - 1
        if order < 0:
            raise ValueError("order must be a natural number")
        values = values[: order + 1]
        values.extend([Fraction(0)] * (order + 1 - len(values)))
        return cls(tuple(values))

    @classmethod
    def from_ints(cls, values: Sequence[int], scale: Fraction = Fraction(1)) -> "PowerSeries":
        if scale == 1:
            return cls(tuple(Fraction(v) for v in values))
        return cls(tuple(scale * v for v in values))

    @classmethod
    def zero(cls, order: int) -> "PowerSeries":
        return cls.from_coeffs([], order)

    @classmethod
    def one(cls, order: int) -> "PowerSeries":
        return cls.from_coeffs([1], order)

    @classmethod
    def constant(cls, c, order: int) -> "PowerSeries":
        return cls.from_coeffs([c], order)

    @classmethod
    def monomial(cls, k: int, order: int, c=1) -> "PowerSeries":
        values = [0] * (order + 1)
        if k <= order:
            values[k] = c
        return cls.from_coeffs(values, order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"PowerSeries({self.to_text()}, order={self.order})"

    def to_text(self, var: str = "q") -> str:
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if k and abs(c) == 1:
                parts.append(("-" if c < 0 else "+") + mono)
            else:
                body = str(abs(c)) + ("*" + mono if mono else "")
                parts.append(("-" if c < 0 else "+") + body)
        if not parts:
            return "0"
        text = " ".join(parts)
        return text[1:] if text.startswith("+") else text

    def truncate(self, order: int) -> "PowerSeries":
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {order}")
        return PowerSeries(self.coeffs[: order + 1])

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, or None for the zero series."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    # -- comparison at an explicit order -------------------------------

    def first_mismatch(self, other: "PowerSeries", order: int | None = None) -> int | None:
        n = min(self.order, other.order) if order is None else order
        if n > self.order or n > other.order:
            raise ValueError(f"comparison at order {n} exceeds a series order")
        for k in range(n + 1):
            if self.coeffs[k] != other.coeffs[k]:
                return k
        return None

    def agrees_with(self, other: "PowerSeries", order: int | None = None) -> bool:
        return self.first_mismatch(other, order) is None

    # -- ring operations -------------------------------------------------

    def _coerce(self, other) -> "PowerSeries":
        if isinstance(other, PowerSeries):
            return other
        return PowerSeries.constant(as_fraction(other), self.order)

    def __add__(self, other) -> "PowerSeries":
        other = self._coerce(other)
        n = min(self.order, other.order)
        return PowerSeries(tuple(a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> "PowerSeries":
        return PowerSeries(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "PowerSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PowerSeries":
        return self._coerce(other) - self

    def scale(self, c) -> "PowerSeries":
        c = as_fraction(c)
        return PowerSeries(tuple(c * a for a in self.coeffs))

    def __mul__(self, other) -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return self.scale(other)
        return ps_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "PowerSeries":
        return ps_int_pow(self, e)

    def inverse(self) -> "PowerSeries":
        return ps_inv(self)

    def q_derivative(self) -> "PowerSeries":
        return q_derivative(self)

    # -- serialization ---------------------------------------------------

    def to_json(self) -> str:
        return json.dumps([format_fraction(c) for c in self.coeffs])

    @classmethod
    def from_json(cls, text: str) -> "PowerSeries":
        data = json.loads(text)
        if not isinstance(data, list):
            raise ValueError("expected a JSON array of exact rationals")
        return cls.from_coeffs(data)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "numerator", "denominator"])
        for k, c in enumerate(self.coeffs):
            writer.writerow([k, c.numerator, c.denominator])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PowerSeries":
        rows = list(csv.DictReader(io.StringIO(text)))
        values: dict[int, Fraction] = {}
        for row in rows:
            values[int(row["k"])] = Fraction(int(row["numerator"]), int(row["denominator"]))
        if sorted(values) != list(range(len(values))):
            raise ValueError("CSV rows must cover k = 0..N exactly once")
        return cls(tuple(values[k] for k in range(len(values))))


def ps_add(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    return a + b


def ps_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Truncated Cauchy product; exact, done over a common integer denominator."""
    n = min(a.order, b.order)
    va, vb = a.valuation(), b.valuation()
    if va is None or vb is None or va + vb > n:
        return PowerSeries.zero(n)
    xa, da = _common_denominator(a.coeffs[: n + 1])
    xb, db = _common_denominator(b.coeffs[: n + 1])
    out = [0] * (n + 1)
    for i in range(va, n - vb + 1):
        ai = xa[i]
        if not ai:
            continue
        for j in range(vb, n - i + 1):
            bj = xb[j]
            if bj:
                out[i + j] += ai * bj
    den = da * db
    return PowerSeries(tuple(Fraction(v, den) for v in out))


def ps_inv(a: PowerSeries) -> PowerSeries:
    c0 = a.coeffs[0]
    if c0 == 0:
        raise NonUnitSeriesError("non-unit series: constant coefficient is zero")
    n = a.order
    inv0 = 1 / c0
    out = [inv0]
    for k in range(1, n + 1):
        acc = sum((a.coeffs[i] * out[k - i] for i in range(1, k + 1) if a.coeffs[i]), Fraction(0))
        out.append(-acc * inv0)
    return PowerSeries(tuple(out))


def ps_int_pow(a: PowerSeries, e: int) -> PowerSeries:
    if e < 0:
        return ps_int_pow(ps_inv(a), -e)
    result = PowerSeries.one(a.order)
    base = a
    while e:
        if e & 1:
            result = ps_mul(result, base)
        e >>= 1
        if e:
            base = ps_mul(base, base)
    return result


def q_derivative(a: PowerSeries) -> PowerSeries:
    """The operator q d/dq: c_k -> k c_k."""
    return PowerSeries(tuple(k * c for k, c in enumerate(a.coeffs)))


def euler_product(order: int) -> PowerSeries:
    """(q;q)_infinity = prod_{i>=1} (1 - q^i) truncated at ``order``."""
    values = [0] * (order + 1)
    values[0] = 1
    for i in range(1, order + 1):
        for n in range(order, i - 1, -1):
            values[n] -= values[n - i]
    return PowerSeries.from_ints(values)


def divide_one_minus(values: list, m: int, times: int = 1, start: int = 0) -> list:
    """Multiply a coefficient list in place by (1 - q^m)^(-times).

    Works on plain ints or Fractions.  ``start`` may be set to the valuation of
    ``values`` to skip the known-zero prefix.
    """
    n = len(values)
    for _ in range(times):
        for k in range(start + m, n):
            values[k] += values[k - m]
    return values
