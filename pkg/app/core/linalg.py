"""Exact linear algebra over the rationals, backed by sympy matrices."""

from fractions import Fraction
from typing import List, Sequence, Tuple

import sympy as sp

Row = Tuple[Fraction, ...]


def _to_sympy(value) -> sp.Rational:
    value = Fraction(value)
    return sp.Rational(value.numerator, value.denominator)


def _to_fraction(value) -> Fraction:
    value = sp.Rational(value)
    return Fraction(int(value.p), int(value.q))


def matrix(rows: Sequence[Sequence], ncols: int) -> sp.Matrix:
    if not rows:
        return sp.zeros(0, ncols)
    return sp.Matrix([[_to_sympy(x) for x in row] for row in rows])


def rank(rows: Sequence[Sequence], ncols: int) -> int:
    if not rows:
        return 0
    return matrix(rows, ncols).rank()


def rref(rows: Sequence[Sequence], ncols: int) -> Tuple[List[Row], Tuple[int, ...]]:
    """Reduced row echelon form without zero rows, plus pivot columns."""
    if not rows:
        return [], ()
    reduced, pivots = matrix(rows, ncols).rref()
    out = []
    for r in range(len(pivots)):
        out.append(tuple(_to_fraction(reduced[r, c]) for c in range(ncols)))
    return out, tuple(pivots)


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[Row]:
    """Basis of {x : row . x = 0 for every row}."""
    if not rows:
        return [tuple(Fraction(int(i == k)) for k in range(ncols)) for i in range(ncols)]
    basis = matrix(rows, ncols).nullspace()
    return [tuple(_to_fraction(v[k]) for k in range(ncols)) for v in basis]


def affine_dimension(points: Sequence[Sequence], ncols: int) -> int:
    if not points:
        return -1
    base = points[0]
    diffs = [[Fraction(p[k]) - Fraction(base[k]) for k in range(ncols)] for p in points[1:]]
    return rank(diffs, ncols)


def direction_basis(points: Sequence[Sequence], ncols: int) -> List[Row]:
    """A basis of the linear space parallel to the affine hull of the points."""
    if len(points) < 2:
        return []
    base = points[0]
    diffs = [[Fraction(p[k]) - Fraction(base[k]) for k in range(ncols)] for p in points[1:]]
    reduced, _ = rref(diffs, ncols)
    return reduced


def orthogonal(first: Sequence[Sequence], second: Sequence[Sequence]) -> bool:
    return all(
        sum(Fraction(a) * Fraction(b) for a, b in zip(u, v)) == 0
        for u in first
        for v in second
    )


def solve_particular(rows: Sequence[Sequence], rhs: Sequence, ncols: int):
    """Some solution of rows . x = rhs, or None when inconsistent."""
    if not rows:
        return tuple(Fraction(0) for _ in range(ncols))
    augmented = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, pivot in zip(reduced, pivots):
        x[pivot] = row[ncols]
    return tuple(x)
