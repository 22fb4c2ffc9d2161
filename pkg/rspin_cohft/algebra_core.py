"""
Exact scalars, truncated power series, series matrices and partitions.

Rationals are :class:`fractions.Fraction`. Polynomials are sympy ``PolyElement``
values over ``QQ`` in one of the rings declared below; ``as_fraction`` moves a
sympy coefficient back into the ``Fraction`` world.
"""

import logging
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Any, Union

import sympy
from sympy import QQ, ring
from sympy.utilities.iterables import partitions

from rspin_cohft.errors import NotInvertibleError, PreconditionError

log = logging.getLogger(__name__)

Rational = Fraction
Partition = tuple[int, ...]
Scalar = Union[int, Fraction]

# P_m(r, a) lives here
RA_RING, R_VAR, A_VAR = ring("r,a", QQ)
# Q_m(a)
A_RING, A_ONLY = ring("a", QQ)
# Bernoulli B_m(x)
X_RING, X_VAR = ring("x", QQ)


def as_fraction(value: Any) -> Fraction:
    """Convert an int, Fraction, sympy Rational or QQ element to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        num, den = value.numerator, value.denominator
        if callable(num):
            num, den = num(), den()
        return Fraction(int(num), int(den))
    if isinstance(value, sympy.Basic):
        rat = sympy.Rational(value)
        return Fraction(int(rat.p), int(rat.q))
    msg = f"Cannot convert {value!r} to an exact rational"
    raise PreconditionError(msg)


def rational_str(value: Scalar) -> str:
    return str(Fraction(value))


def parse_rational(text: str) -> Fraction:
    return Fraction(text)


@dataclass(frozen=True)
class Series:
    """
    Truncated univariate power series. ``coeffs[i]`` is the T^i coefficient,
    the truncation order is ``len(coeffs) - 1``. Products, inverse, exp and log
    truncate like sympy's ``rs_mul``, ``rs_series_inversion``, ``rs_exp`` and
    ``rs_log`` with ``prec = order + 1``.
    """

    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.coeffs:
            msg = "A series needs at least a constant coefficient"
            raise PreconditionError(msg)

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Scalar], order: int | None = None) -> "Series":
        values = [Fraction(c) for c in coeffs]
        if order is not None:
            values = (values + [Fraction(0)] * (order + 1))[: order + 1]
        return cls(tuple(values))

    @classmethod
    def constant(cls, value: Scalar, order: int) -> "Series":
        return cls.from_coeffs([value], order)

    @classmethod
    def monomial(cls, power: int, order: int, value: Scalar = 1) -> "Series":
        coeffs = [Fraction(0)] * (order + 1)
        if power <= order:
            coeffs[power] = Fraction(value)
        return cls(tuple(coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def truncate(self, order: int) -> "Series":
        return Series(self.coeffs[: min(order, self.order) + 1])

    def __add__(self, other: "Series | Scalar") -> "Series":
        if not isinstance(other, Series):
            other = Series.constant(other, self.order)
        n = min(self.order, other.order)
        return Series(tuple(self.coeffs[i] + other.coeffs[i] for i in range(n + 1)))

    __radd__ = __add__

    def __neg__(self) -> "Series":
        return Series(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Series | Scalar") -> "Series":
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "Series":
        return (-self) + other

    def __mul__(self, other: "Series | Scalar") -> "Series":
        if not isinstance(other, Series):
            c = Fraction(other)
            return Series(tuple(c * x for x in self.coeffs))
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i, x in enumerate(self.coeffs[: n + 1]):
            if x:
                for j, y in enumerate(other.coeffs[: n + 1 - i]):
                    out[i + j] += x * y
        return Series(tuple(out))

    __rmul__ = __mul__

    def shift(self, power: int) -> "Series":
        """Multiply by T^power, keeping the truncation order."""
        if power < 0:
            msg = f"Cannot shift by negative power {power}"
            raise PreconditionError(msg)
        zeros = (Fraction(0),) * power
        return Series((zeros + self.coeffs)[: self.order + 1])

    def inverse(self) -> "Series":
        a0 = self.coeffs[0]
        if a0 == 0:
            msg = "not invertible: zero constant term"
            raise NotInvertibleError(msg)
        out = [1 / a0]
        for n in range(1, self.order + 1):
            acc = sum((self.coeffs[k] * out[n - k] for k in range(1, n + 1)), Fraction(0))
            out.append(-acc / a0)
        return Series(tuple(out))

    def even_odd_split(self) -> tuple["Series", "Series"]:
        even = tuple(c if i % 2 == 0 else Fraction(0) for i, c in enumerate(self.coeffs))
        odd = tuple(c if i % 2 == 1 else Fraction(0) for i, c in enumerate(self.coeffs))
        return Series(even), Series(odd)

    def exp(self) -> "Series":
        if self.coeffs[0] != 0:
            msg = "exp needs a series without constant term"
            raise PreconditionError(msg)
        out = [Fraction(1)]
        for n in range(1, self.order + 1):
            acc = sum((k * self.coeffs[k] * out[n - k] for k in range(1, n + 1)), Fraction(0))
            out.append(acc / n)
        return Series(tuple(out))

    def log(self) -> "Series":
        if self.coeffs[0] != 1:
            msg = "log needs a series with constant term 1"
            raise PreconditionError(msg)
        out = [Fraction(0)]
        for n in range(1, self.order + 1):
            acc = sum((k * out[k] * self.coeffs[n - k] for k in range(1, n)), Fraction(0))
            out.append(self.coeffs[n] - acc / n)
        return Series(tuple(out))

    def to_json(self) -> list[str]:
        return [rational_str(c) for c in self.coeffs]


def series_mul(a: Series, b: Series) -> Series:
    return a * b


def series_inverse(a: Series) -> Series:
    return a.inverse()


def series_add(a: Series, b: Series) -> Series:
    return a + b


def series_sub(a: Series, b: Series) -> Series:
    return a - b


def series_neg(a: Series) -> Series:
    return -a


def series_shift(a: Series, power: int) -> Series:
    return a.shift(power)


def series_exp(a: Series) -> Series:
    return a.exp()


def series_log(a: Series) -> Series:
    return a.log()


def even_odd_split(a: Series) -> tuple[Series, Series]:
    return a.even_odd_split()


@dataclass(frozen=True)
class SeriesMatrix:
    """Square matrix of series. ``entries[row][col]``; columns are images of basis vectors."""

    entries: tuple[tuple[Series, ...], ...]

    def __post_init__(self) -> None:
        dim = len(self.entries)
        if any(len(row) != dim for row in self.entries):
            msg = "SeriesMatrix must be square"
            raise PreconditionError(msg)
        orders = {s.order for row in self.entries for s in row}
        if len(orders) > 1:
            msg = f"SeriesMatrix entries have mixed truncation orders {sorted(orders)}"
            raise PreconditionError(msg)

    @classmethod
    def identity(cls, dim: int, order: int) -> "SeriesMatrix":
        return cls(
            tuple(
                tuple(Series.constant(int(i == j), order) for j in range(dim))
                for i in range(dim)
            )
        )

    @classmethod
    def from_coefficient_matrices(
        cls, mats: Sequence[Sequence[Sequence[Scalar]]]
    ) -> "SeriesMatrix":
        """Build from ``mats[m][row][col]``, the z^m coefficient matrices."""
        dim = len(mats[0])
        return cls(
            tuple(
                tuple(Series.from_coeffs(m[i][j] for m in mats) for j in range(dim))
                for i in range(dim)
            )
        )

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def order(self) -> int:
        return self.entries[0][0].order

    def __getitem__(self, key: tuple[int, int]) -> Series:
        row, col = key
        return self.entries[row][col]

    def __mul__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        n = self.dim
        order = min(self.order, other.order)
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = Series.constant(0, order)
                for k in range(n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            rows.append(tuple(row))
        return SeriesMatrix(tuple(rows))

    def coefficient(self, m: int) -> list[list[Fraction]]:
        return [[s.coeff(m) for s in row] for row in self.entries]

    def column(self, col: int) -> list[Series]:
        return [row[col] for row in self.entries]

    def is_identity(self) -> bool:
        for i, row in enumerate(self.entries):
            for j, s in enumerate(row):
                target = int(i == j)
                if s.coeff(0) != target or any(s.coeffs[1:]):
                    return False
        return True

    def to_json(self) -> list[list[list[str]]]:
        return [[s.to_json() for s in row] for row in self.entries]


def make_partition(parts: Iterable[int]) -> Partition:
    values = sorted((int(p) for p in parts), reverse=True)
    if any(p <= 0 for p in values):
        msg = f"Partition parts must be positive, got {values}"
        raise PreconditionError(msg)
    return tuple(values)


@lru_cache(maxsize=None)
def partitions_of(n: int, k: int | None = None) -> tuple[Partition, ...]:
    """All partitions of n with at most k parts, parts descending, in reverse lex order."""
    if n < 0:
        return ()
    if n == 0:
        return ((),)
    if k is not None and k <= 0:
        return ()
    out = []
    # sympy reuses the yielded dict
    for p in partitions(n, m=k):
        out.append(tuple(sorted((part for part, mult in p.items() for _ in range(mult)), reverse=True)))
    return tuple(sorted(out, reverse=True))


def count_partitions(n: int, k: int) -> int:
    return len(partitions_of(n, k))


def partition_automorphisms(parts: Partition) -> int:
    """|Aut| of a partition: product of factorials of part multiplicities."""
    counts: dict[int, int] = {}
    for p in parts:
        counts[p] = counts.get(p, 0) + 1
    out = 1
    for mult in counts.values():
        out *= factorial(mult)
    return out


def identity_matrix(dim: int, order: int) -> SeriesMatrix:
    return SeriesMatrix.identity(dim, order)


def matrix_mul(a: SeriesMatrix, b: SeriesMatrix) -> SeriesMatrix:
    return a * b


def matrix_coefficient(a: SeriesMatrix, m: int) -> list[list[Fraction]]:
    """The z^m coefficient matrix."""
    return a.coefficient(m)
