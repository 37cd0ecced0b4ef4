"""Exact rational helpers: parsing, formatting and vector utilities."""

from fractions import Fraction
from math import gcd
from typing import Iterable, List, Sequence, Tuple, Union

from app.core.exceptions import InputError

RationalLike = Union[int, str, Fraction]
Vector = Tuple[Fraction, ...]


def to_fraction(value: RationalLike) -> Fraction:
    """Parse an exact rational from an int, a ``p/q`` string or a decimal string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise InputError("floats are not accepted; pass exact strings like '1/3'")
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"not a rational: {value!r}") from e


def format_fraction(value: Fraction) -> str:
    """Render as ``p/q`` (or ``p`` when integral)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_vector(text: str) -> Vector:
    """Parse a comma separated list of rationals."""
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if not parts:
        raise InputError("empty vector")
    return tuple(to_fraction(p) for p in parts)


def parse_int_list(text: str) -> Tuple[int, ...]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    try:
        return tuple(int(p) for p in parts)
    except ValueError as e:
        raise InputError(f"not a list of integers: {text!r}") from e


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((Fraction(x) * y for x, y in zip(a, b)), Fraction(0))


def primitive(coefficients: Sequence[Fraction], rhs: Fraction = Fraction(0)) -> Tuple[Tuple[int, ...], int]:
    """Scale a rational row (and its right-hand side) to coprime integers."""
    values = [Fraction(c) for c in coefficients] + [Fraction(rhs)]
    denominator = 1
    for v in values:
        denominator = denominator * v.denominator // gcd(denominator, v.denominator)
    ints = [int(v * denominator) for v in values]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints[:-1]), ints[-1]


def unit(n: int, i: int, value: int = 1) -> Tuple[int, ...]:
    """The vector ``value * e_i`` of length n (i is 0-based)."""
    return tuple(value if k == i else 0 for k in range(n))


def difference(n: int, i: int, j: int) -> Tuple[int, ...]:
    """The vector ``e_i - e_j`` (0-based indices)."""
    return tuple(1 if k == i else (-1 if k == j else 0) for k in range(n))


def vector_sum(vectors: Iterable[Sequence], n: int) -> Vector:
    total: List[Fraction] = [Fraction(0)] * n
    for v in vectors:
        for k in range(n):
            total[k] += v[k]
    return tuple(total)
