"""
Exact polyhedral kernels on top of the Parma Polyhedra Library (pplpy).

Rows arrive as rationals and are scaled to coprime integers before they reach
ppl, which only takes integer coefficients. Points coming back are divided by
their generator divisor, so everything leaving this module is a Fraction.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

import ppl

from app.core.rational import Vector, primitive

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

Row = Tuple[Tuple[int, ...], int]


@dataclass
class LPResult:
    status: str
    value: Optional[Fraction] = None
    x: Optional[Tuple[Fraction, ...]] = None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


@dataclass(frozen=True)
class Hull:
    """Minimized double description of a convex hull: a.x <= b facets and a.x = b equations."""
    vertices: Tuple[Vector, ...]
    inequalities: Tuple[Row, ...]
    equalities: Tuple[Row, ...]


def _expression(coefficients: Sequence[int], constant: int = 0) -> "ppl.Linear_Expression":
    expr = ppl.Linear_Expression(constant)
    for k, c in enumerate(coefficients):
        if c:
            expr += c * ppl.Variable(k)
    return expr


def _padded(values, n: int) -> List[int]:
    out = [int(v) for v in values]
    return out + [0] * (n - len(out))


def _common_scale(values: Sequence) -> int:
    scale = 1
    for v in values:
        d = Fraction(v).denominator
        scale = scale * d // gcd(scale, d)
    return scale


def _point(generator, n: int) -> Vector:
    divisor = int(generator.divisor())
    return tuple(Fraction(c, divisor) for c in _padded(generator.coefficients(), n))


def polyhedron(
    n: int,
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
) -> Optional["ppl.C_Polyhedron"]:
    """
    The closed polyhedron {a_ub x <= b_ub, a_eq x = b_eq} in R^n.

    Returns:
        A ppl C_Polyhedron, or None when a constant row is violated
    """
    poly = ppl.C_Polyhedron(n, "universe")
    for (a, b), equality in [((a, b), False) for a, b in zip(a_ub, b_ub)] + [
        ((a, b), True) for a, b in zip(a_eq, b_eq)
    ]:
        coefficients, rhs = primitive(a, b)
        if not any(coefficients):
            if (equality and rhs != 0) or rhs < 0:
                return None
            continue
        expr = _expression(coefficients)
        poly.add_constraint(expr == rhs if equality else expr <= rhs)
    return poly


def solve_lp(
    n: int,
    objective: Optional[Sequence] = None,
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
) -> LPResult:
    """
    Maximize ``objective . x`` subject to ``a_ub x <= b_ub`` and ``a_eq x = b_eq``.

    Args:
        n: Number of (free) variables
        objective: Coefficients to maximize; ``None`` only tests feasibility

    Returns:
        LPResult with status, optimal value and an optimal point
    """
    poly = polyhedron(n, a_ub, b_ub, a_eq, b_eq)
    if poly is None or poly.is_empty():
        return LPResult(INFEASIBLE)
    objective = [Fraction(0)] * n if objective is None else [Fraction(c) for c in objective]
    scale = _common_scale(objective)
    result = poly.maximize(_expression([int(c * scale) for c in objective]))
    if not result["bounded"]:
        return LPResult(UNBOUNDED)
    value = Fraction(int(result["sup_n"]), int(result["sup_d"])) / scale
    return LPResult(OPTIMAL, value, _point(result["generator"], n))


def hull(n: int, points: Sequence[Sequence]) -> Hull:
    """Vertices, facets and affine hull equations of conv(points) in R^n."""
    poly = ppl.C_Polyhedron(n, "empty")
    for p in points:
        scale = _common_scale(p)
        poly.add_generator(ppl.point(_expression([int(Fraction(v) * scale) for v in p]), scale))
    vertices = tuple(sorted(_point(g, n) for g in poly.minimized_generators() if g.is_point()))
    inequalities, equalities = [], []
    # ppl writes c.x + k >= 0 (or = 0); turn it into (-c).x <= k
    for c in poly.minimized_constraints():
        coefficients = tuple(-v for v in _padded(c.coefficients(), n))
        rhs = int(c.inhomogeneous_term())
        if not any(coefficients):
            continue
        if c.is_equality():
            equalities.append(primitive(coefficients, rhs))
        else:
            inequalities.append(primitive(coefficients, rhs))
    logger.debug(f"Hull of {len(points)} points in R^{n}: {len(vertices)} vertices, {len(inequalities)} facets")
    return Hull(vertices, tuple(sorted(inequalities)), tuple(sorted(equalities)))
