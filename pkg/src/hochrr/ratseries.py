"""Exact rationals and truncated univariate power series.

Coefficients are :class:`fractions.Fraction` throughout.  A series carries its
own truncation order ``N`` and holds exactly ``N + 1`` coefficients; binary
operations on series of different orders work at the smaller order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Sequence

ExactScalar = Fraction


class NonInvertibleConstantTerm(ArithmeticError):
    pass


class DomainViolation(ValueError):
    pass


def exact(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not exact scalars")
    return Fraction(value)


def format_scalar(value: Fraction) -> str:
    value = exact(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class FormalSeries:
    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("a series needs at least the constant coefficient")
        object.__setattr__(
            self, "coefficients", tuple(exact(c) for c in self.coefficients))

    @classmethod
    def from_list(cls, coeffs: Iterable, order: int) -> "FormalSeries":
        coeffs = [exact(c) for c in coeffs][: order + 1]
        coeffs += [Fraction(0)] * (order + 1 - len(coeffs))
        return cls(tuple(coeffs))

    @classmethod
    def variable(cls, order: int) -> "FormalSeries":
        return cls.from_list([0, 1], order)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, n: int) -> Fraction:
        return self.coefficients[n]

    def truncate(self, order: int) -> "FormalSeries":
        return FormalSeries.from_list(self.coefficients, order)

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        n = min(self.order, other.order)
        return FormalSeries(tuple(self[k] + other[k] for k in range(n + 1)))

    def __neg__(self) -> "FormalSeries":
        return FormalSeries(tuple(-c for c in self.coefficients))

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return self + (-other)

    def scale(self, s) -> "FormalSeries":
        s = exact(s)
        return FormalSeries(tuple(s * c for c in self.coefficients))

    def __mul__(self, other: "FormalSeries") -> "FormalSeries":
        return series_arith("mul", self, other)

    def __truediv__(self, other: "FormalSeries") -> "FormalSeries":
        return series_arith("div", self, other)

    def __str__(self) -> str:
        return "[" + ", ".join(format_scalar(c) for c in self.coefficients) + "]"


def _mul(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    n = min(a.order, b.order)
    out = [Fraction(0)] * (n + 1)
    for i in range(n + 1):
        if a[i]:
            for j in range(n + 1 - i):
                out[i + j] += a[i] * b[j]
    return FormalSeries(tuple(out))


def _div(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    if b[0] == 0:
        raise NonInvertibleConstantTerm("divisor has zero constant term")
    n = min(a.order, b.order)
    q = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        s = a[k] - sum(q[j] * b[k - j] for j in range(k))
        q[k] = s / b[0]
    return FormalSeries(tuple(q))


def _derivative(a: FormalSeries) -> list[Fraction]:
    return [k * a[k] for k in range(1, a.order + 1)]


def _log(a: FormalSeries) -> FormalSeries:
    if a[0] != 1:
        raise DomainViolation("log needs constant term 1")
    # log(a)' = a'/a
    n = a.order
    da = FormalSeries.from_list(_derivative(a), n)
    q = _div(da, a)
    out = [Fraction(0)] + [q[k - 1] / k for k in range(1, n + 1)]
    return FormalSeries(tuple(out))


def _exp(a: FormalSeries) -> FormalSeries:
    if a[0] != 0:
        raise DomainViolation("exp needs constant term 0")
    # e' = a' e, solved coefficientwise
    n = a.order
    e = [Fraction(1)] + [Fraction(0)] * n
    for k in range(1, n + 1):
        e[k] = sum(j * a[j] * e[k - j] for j in range(1, k + 1)) / k
    return FormalSeries(tuple(e))


def _compose(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    if b[0] != 0:
        raise DomainViolation("inner series of compose needs constant term 0")
    n = min(a.order, b.order)
    out = FormalSeries.from_list([0], n)
    power = FormalSeries.from_list([1], n)
    for k in range(n + 1):
        if a[k]:
            out = out + power.scale(a[k])
        power = _mul(power, b)
    return out


def series_arith(op: str, a: FormalSeries, b: FormalSeries | None = None) -> FormalSeries:
    """Dispatch ``mul | div | exp | log | compose`` on truncated series."""
    if op in ("mul", "div", "compose") and b is None:
        raise TypeError(f"{op} needs two operands")
    if op == "mul":
        return _mul(a, b)
    if op == "div":
        return _div(a, b)
    if op == "exp":
        return _exp(a)
    if op == "log":
        return _log(a)
    if op == "compose":
        return _compose(a, b)
    raise ValueError(f"unknown series operation {op!r}")


def exp_minus_one_over_z(order: int) -> FormalSeries:
    """(e^z - 1)/z = sum z^n/(n+1)!"""
    return FormalSeries(tuple(Fraction(1, factorial(n + 1)) for n in range(order + 1)))


def l_series(order: int) -> FormalSeries:
    return _div(FormalSeries.from_list([1], order), exp_minus_one_over_z(order))


def l_coefficients(order: int) -> list[Fraction]:
    """Coefficients l_0..l_N of z/(e^z - 1)."""
    if order < 0:
        raise ValueError("order must be >= 0")
    return list(l_series(order).coefficients)


def t_coefficients(order: int) -> list[Fraction]:
    """Coefficients t_1..t_N of log(z/(e^z - 1)); t_0 = 0 is dropped."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return list(_log(l_series(order)).coefficients[1:])


def bernoulli_numbers(order: int) -> list[Fraction]:
    """B_0..B_N from sum_{k<=n} C(n+1, k) B_k = 0 (B_1 = -1/2)."""
    b = [Fraction(1)]
    for n in range(1, order + 1):
        b.append(-sum(comb(n + 1, k) * b[k] for k in range(n)) / (n + 1))
    return b


def evaluate(a: Sequence, z) -> Fraction:
    z = exact(z)
    total = Fraction(0)
    for c in reversed(list(a)):
        total = total * z + exact(c)
    return total
