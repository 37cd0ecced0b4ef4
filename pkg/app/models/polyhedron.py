"""
Exact H-polyhedra.

Constraints are integer rows: inequalities a.x <= b and equalities a.x = b.
Systems made only of difference rows x_p - x_q (the fibers and shards) are
decided by shortest paths; anything else goes through ppl.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from app.core import linalg
from app.core.exceptions import DimensionMismatch
from app.core.rational import dot, primitive
from app.core.ppl_backend import OPTIMAL, solve_lp

Row = Tuple[Tuple[int, ...], int]
CanonicalKey = Tuple


def make_row(coefficients: Sequence, rhs) -> Row:
    return primitive(coefficients, rhs)


def _difference_pair(a: Sequence[int]) -> Optional[Tuple[int, int, int]]:
    """(p, q, scale) when a = scale * (e_p - e_q) with scale > 0."""
    nonzero = [(k, v) for k, v in enumerate(a) if v != 0]
    if len(nonzero) != 2:
        return None
    (k1, v1), (k2, v2) = nonzero
    if v1 == -v2:
        return (k1, k2, v1) if v1 > 0 else (k2, k1, v2)
    return None


@dataclass(frozen=True)
class HPolyhedron:
    dim: int
    inequalities: Tuple[Row, ...] = ()
    equalities: Tuple[Row, ...] = ()
    tag: str = ""

    def __post_init__(self):
        for a, _ in self.inequalities + self.equalities:
            if len(a) != self.dim:
                raise DimensionMismatch(f"row of length {len(a)} in R^{self.dim}")

    @classmethod
    def build(
        cls,
        dim: int,
        inequalities: Sequence[Tuple[Sequence, object]] = (),
        equalities: Sequence[Tuple[Sequence, object]] = (),
        tag: str = "",
    ) -> "HPolyhedron":
        ineqs = []
        for a, b in inequalities:
            row = make_row(a, b)
            if any(row[0]):
                ineqs.append(row)
            elif row[1] < 0:
                ineqs.append(((0,) * dim, -1))
        eqs = []
        for a, b in equalities:
            row = make_row(a, b)
            if any(row[0]):
                eqs.append(row)
            elif row[1] != 0:
                ineqs.append(((0,) * dim, -1))
        return cls(dim, tuple(ineqs), tuple(eqs), tag)

    @classmethod
    def whole_space(cls, dim: int, tag: str = "") -> "HPolyhedron":
        return cls(dim, (), (), tag)

    def intersect(self, other: "HPolyhedron", tag: str = "") -> "HPolyhedron":
        if other.dim != self.dim:
            raise DimensionMismatch(f"R^{self.dim} vs R^{other.dim}")
        return HPolyhedron(self.dim, self.inequalities + other.inequalities,
                           self.equalities + other.equalities, tag or self.tag)

    def with_equalities(self, rows: Sequence[Row], tag: str = "") -> "HPolyhedron":
        return HPolyhedron(self.dim, self.inequalities, self.equalities + tuple(rows), tag or self.tag)

    # ------------------------------------------------------------------
    # Solvers
    # ------------------------------------------------------------------

    @cached_property
    def _is_difference_system(self) -> bool:
        rows = self.inequalities + self.equalities
        return all(_difference_pair(a) is not None or not any(a) for a, _ in rows)

    @cached_property
    def _distances(self) -> Optional[Dict[int, Dict[int, Fraction]]]:
        """Tightest bounds D[q][p] on x_p - x_q, or None when infeasible."""
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.dim))

        def add(q: int, p: int, w: Fraction) -> None:
            if graph.has_edge(q, p):
                w = min(w, graph[q][p]["weight"])
            graph.add_edge(q, p, weight=w)

        for a, b in self.inequalities:
            pair = _difference_pair(a)
            if pair is None:
                if b < 0:
                    return None
                continue
            p, q, scale = pair
            add(q, p, Fraction(b, scale))
        for a, b in self.equalities:
            p, q, scale = _difference_pair(a)
            add(q, p, Fraction(b, scale))
            add(p, q, Fraction(-b, scale))
        dist = nx.floyd_warshall(graph)
        if any(dist[v][v] < 0 for v in graph.nodes):
            return None
        return dist

    def _lp(self, objective: Optional[Sequence]):
        return solve_lp(
            self.dim,
            objective,
            [a for a, _ in self.inequalities],
            [b for _, b in self.inequalities],
            [a for a, _ in self.equalities],
            [b for _, b in self.equalities],
        )

    @cached_property
    def is_empty(self) -> bool:
        if self._is_difference_system:
            return self._distances is None
        return not self._lp(None).feasible

    def maximize(self, objective: Sequence) -> Optional[Fraction]:
        """Maximum of objective . x over the polyhedron; None when unbounded or empty."""
        pair = _difference_pair(objective)
        if self._is_difference_system and pair is not None:
            dist = self._distances
            if dist is None:
                return None
            p, q, scale = pair
            bound = dist[q][p]
            return None if bound == float("inf") else Fraction(bound) * scale
        result = self._lp(objective)
        if result.status != OPTIMAL:
            return None
        return result.value

    @cached_property
    def implicit_indices(self) -> Tuple[int, ...]:
        """Inequalities that hold with equality on the whole polyhedron."""
        if self.is_empty:
            return tuple(range(len(self.inequalities)))
        out = []
        for k, (a, b) in enumerate(self.inequalities):
            if not any(a):
                continue
            value = self.maximize(tuple(-v for v in a))
            if value is not None and -value == b:
                out.append(k)
        return tuple(out)

    @cached_property
    def hull_equations(self) -> Tuple[Row, ...]:
        implicit = [self.inequalities[k] for k in self.implicit_indices]
        return self.equalities + tuple(implicit)

    @cached_property
    def dimension(self) -> int:
        if self.is_empty:
            return -1
        rows = [a for a, _ in self.hull_equations]
        return self.dim - linalg.rank(rows, self.dim)

    def contains(self, x: Sequence) -> bool:
        return all(dot(a, x) <= b for a, b in self.inequalities) and all(
            dot(a, x) == b for a, b in self.equalities
        )

    def contains_in_relative_interior(self, x: Sequence) -> bool:
        implicit = set(self.implicit_indices)
        for k, (a, b) in enumerate(self.inequalities):
            value = dot(a, x)
            if k in implicit:
                if value != b:
                    return False
            elif not any(a):
                continue
            elif value >= b:
                return False
        return all(dot(a, x) == b for a, b in self.equalities)

    @cached_property
    def relative_interior_point(self) -> Optional[Tuple[Fraction, ...]]:
        """An exact point strictly inside every non-implicit inequality."""
        if self.is_empty:
            return None
        implicit = set(self.implicit_indices)
        loose = [(a, b) for k, (a, b) in enumerate(self.inequalities) if k not in implicit and any(a)]
        eqs = list(self.hull_equations)
        n = self.dim
        a_ub = [tuple(a) + (1,) for a, _ in loose] + [(0,) * n + (1,)]
        b_ub = [b for _, b in loose] + [1]
        a_eq = [tuple(a) + (0,) for a, _ in eqs]
        b_eq = [b for _, b in eqs]
        result = solve_lp(n + 1, (0,) * n + (1,), a_ub, b_ub, a_eq, b_eq)
        return tuple(result.x[:n])

    # ------------------------------------------------------------------
    # Canonical form, faces, relations
    # ------------------------------------------------------------------

    @cached_property
    def canonical(self) -> CanonicalKey:
        """Syntactic normal form: reduced hull equations plus irredundant reduced facets."""
        if self.is_empty:
            return ("empty", self.dim)
        n = self.dim
        eq_rows = [list(a) + [b] for a, b in self.hull_equations]
        reduced, pivots = linalg.rref(eq_rows, n + 1) if eq_rows else ([], ())
        equations = []
        for row in reduced:
            equations.append(primitive(row[:n], row[n]))

        implicit = set(self.implicit_indices)
        candidates = []
        for k, (a, b) in enumerate(self.inequalities):
            if k in implicit or not any(a):
                continue
            a = [Fraction(v) for v in a]
            b = Fraction(b)
            for row, pivot in zip(reduced, pivots):
                factor = a[pivot]
                if factor:
                    a = [x - factor * y for x, y in zip(a, row[:n])]
                    b -= factor * row[n]
            if any(a):
                candidates.append(primitive(a, b))
        candidates = sorted(set(candidates))

        kept = list(candidates)
        for row in candidates:
            others = [r for r in kept if r != row]
            relaxed = HPolyhedron(n, tuple(others), tuple(equations))
            value = relaxed.maximize(row[0])
            if value is not None and value <= row[1]:
                kept = others
        return ("poly", n, tuple(sorted(equations)), tuple(sorted(kept)))

    def normalized(self, tag: str = "") -> "HPolyhedron":
        key = self.canonical
        if key[0] == "empty":
            return self
        return HPolyhedron(self.dim, key[3], key[2], tag or self.tag)

    @property
    def facets(self) -> Tuple[Row, ...]:
        key = self.canonical
        return () if key[0] == "empty" else key[3]

    def same_set(self, other: "HPolyhedron") -> bool:
        return self.canonical == other.canonical

    def is_subset_of(self, other: "HPolyhedron") -> bool:
        if self.is_empty:
            return True
        for a, b in other.inequalities:
            value = self.maximize(a)
            if value is None or value > b:
                return False
        for a, b in other.equalities:
            upper = self.maximize(a)
            lower = self.maximize(tuple(-v for v in a))
            if upper is None or lower is None or upper != b or -lower != b:
                return False
        return True

    def tighten(self, row: Row) -> "HPolyhedron":
        return HPolyhedron(self.dim, self.inequalities, self.equalities + (row,), self.tag)

    def faces(self) -> List["HPolyhedron"]:
        """All nonempty faces (including the polyhedron itself), normalized."""
        if self.is_empty:
            return []
        start = self.normalized()
        seen = {start.canonical: start}
        queue = [start]
        while queue:
            face = queue.pop()
            for row in face.facets:
                smaller = face.tighten(row)
                if smaller.is_empty:
                    continue
                smaller = smaller.normalized()
                if smaller.canonical not in seen:
                    seen[smaller.canonical] = smaller
                    queue.append(smaller)
        return sorted(seen.values(), key=lambda f: (-f.dimension, f.canonical))

    def is_face_of(self, other: "HPolyhedron") -> bool:
        """Whether self is a (nonempty) face of other."""
        x = self.relative_interior_point
        if x is None or not other.contains(x):
            return False
        tight = [(a, b) for a, b in other.inequalities if dot(a, x) == b]
        face = other.with_equalities(tight)
        return face.canonical == self.canonical

    def affine_direction(self) -> List[Tuple[Fraction, ...]]:
        """Basis of the linear space parallel to the affine hull."""
        rows = [a for a, _ in self.hull_equations]
        return linalg.nullspace(rows, self.dim)

    def hull_normals(self) -> List[Tuple[Fraction, ...]]:
        """Basis of the orthogonal complement of the affine hull direction."""
        rows = [a for a, _ in self.hull_equations]
        reduced, _ = linalg.rref(rows, self.dim) if rows else ([], ())
        return reduced
