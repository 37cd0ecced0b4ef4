"""
Exact V-polytopes.

A polytope is the convex hull of its vertices, stored sorted so the vertex
tuple doubles as the canonical key. The double description (extreme points,
facets and affine hull equations) comes from ppl; faces are the intersections
of facets.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from app.core import linalg
from app.core.exceptions import DimensionMismatch, InputError
from app.core.ppl_backend import Hull, hull
from app.core.rational import Vector, dot
from app.models.polyhedron import HPolyhedron

VertexSet = FrozenSet[int]


@dataclass(frozen=True)
class Facet:
    normal: Tuple[int, ...]
    value: int
    vertices: VertexSet     # indices into the polytope's vertex tuple


def _vector(point: Sequence) -> Vector:
    return tuple(Fraction(v) for v in point)


@dataclass(frozen=True)
class VPolytope:
    dim: int
    vertices: Tuple[Vector, ...]
    tag: str = ""

    @classmethod
    def from_points(cls, dim: int, points: Iterable[Sequence], tag: str = "") -> "VPolytope":
        """
        Convex hull of a finite point set, keeping only extreme points.

        Raises:
            InputError: if the point set is empty
            DimensionMismatch: if a point has the wrong length
        """
        distinct = sorted({_vector(p) for p in points})
        if not distinct:
            raise InputError("convex hull of no points")
        for p in distinct:
            if len(p) != dim:
                raise DimensionMismatch(f"point of length {len(p)} in R^{dim}")
        if len(distinct) > 2:
            distinct = list(hull(dim, distinct).vertices)
        return cls(dim, tuple(distinct), tag)

    @classmethod
    def point(cls, x: Sequence, tag: str = "") -> "VPolytope":
        x = _vector(x)
        return cls(len(x), (x,), tag)

    @property
    def key(self) -> Tuple[Vector, ...]:
        return self.vertices

    @cached_property
    def translation_key(self) -> Tuple[Vector, ...]:
        """Vertices shifted so that the lexicographically smallest one is the origin."""
        base = self.vertices[0]
        return tuple(tuple(a - b for a, b in zip(v, base)) for v in self.vertices)

    @cached_property
    def dimension(self) -> int:
        return linalg.affine_dimension(self.vertices, self.dim)

    @cached_property
    def direction(self) -> List[Vector]:
        return linalg.direction_basis(self.vertices, self.dim)

    @cached_property
    def _hull(self) -> Hull:
        return hull(self.dim, self.vertices)

    @cached_property
    def hull_equations(self) -> List[Tuple[Tuple[int, ...], int]]:
        """Equations a.x = b cutting out the affine hull."""
        return list(self._hull.equalities)

    @cached_property
    def facets(self) -> Tuple[Facet, ...]:
        out = []
        for normal, value in self._hull.inequalities:
            tight = frozenset(k for k, v in enumerate(self.vertices) if dot(normal, v) == value)
            out.append(Facet(normal, value, tight))
        return tuple(sorted(out, key=lambda f: sorted(f.vertices)))

    @cached_property
    def face_sets(self) -> Tuple[VertexSet, ...]:
        """Vertex sets of all nonempty faces, the polytope included."""
        full = frozenset(range(len(self.vertices)))
        found = {full}
        found.update(f.vertices for f in self.facets)
        frontier = [f.vertices for f in self.facets]
        while frontier:
            nxt = []
            for face in frontier:
                for facet in self.facets:
                    meet = face & facet.vertices
                    if meet and meet not in found:
                        found.add(meet)
                        nxt.append(meet)
            frontier = nxt
        return tuple(sorted(found, key=lambda f: (-len(f), sorted(f))))

    def subpolytope(self, indices: Iterable[int], tag: str = "") -> "VPolytope":
        return VPolytope(self.dim, tuple(sorted(self.vertices[k] for k in indices)), tag)

    def faces(self) -> List["VPolytope"]:
        return [self.subpolytope(f) for f in self.face_sets]

    def faces_of_dimension(self, k: int) -> List["VPolytope"]:
        return [f for f in self.faces() if f.dimension == k]

    def face_maximizing(self, c: Sequence) -> "VPolytope":
        values = [dot(c, v) for v in self.vertices]
        top = max(values)
        return self.subpolytope(k for k, v in enumerate(values) if v == top)

    def is_face_of(self, other: "VPolytope") -> bool:
        return self.key in {f.key for f in other.faces()}

    def minkowski(self, other: "VPolytope", tag: str = "") -> "VPolytope":
        if other.dim != self.dim:
            raise DimensionMismatch(f"Minkowski sum of R^{self.dim} and R^{other.dim} polytopes")
        sums = [tuple(a + b for a, b in zip(u, v)) for u in self.vertices for v in other.vertices]
        return VPolytope.from_points(self.dim, sums, tag)

    def scale(self, factor) -> "VPolytope":
        factor = Fraction(factor)
        if factor <= 0:
            raise InputError(f"scaling factor must be positive, got {factor}")
        return VPolytope(self.dim, tuple(tuple(factor * x for x in v) for v in self.vertices), self.tag)

    def translate(self, shift: Sequence) -> "VPolytope":
        shift = _vector(shift)
        return VPolytope(self.dim, tuple(sorted(tuple(a + b for a, b in zip(v, shift)) for v in self.vertices)), self.tag)

    def same_up_to_translation(self, other: "VPolytope") -> bool:
        return self.translation_key == other.translation_key

    def contains(self, x: Sequence) -> bool:
        return self.to_hpolyhedron().contains(x)

    def to_hpolyhedron(self, tag: str = "") -> HPolyhedron:
        return self._hrep.normalized(tag or self.tag)

    @cached_property
    def _hrep(self) -> HPolyhedron:
        inequalities = [(f.normal, f.value) for f in self.facets]
        return HPolyhedron.build(self.dim, inequalities, self.hull_equations, tag=self.tag)

    def centroid(self) -> Vector:
        count = len(self.vertices)
        return tuple(sum(v[k] for v in self.vertices) / count for k in range(self.dim))

    def f_vector(self) -> Tuple[int, ...]:
        dims = [self.subpolytope(f).dimension for f in self.face_sets]
        return tuple(dims.count(k) for k in range(self.dimension + 1))

    def edge_graph(self) -> List[Tuple[int, int]]:
        out = []
        for f in self.face_sets:
            if len(f) == 2:
                a, b = sorted(f)
                out.append((a, b))
        return sorted(out)

    def sample(self, weights: Sequence[Fraction]) -> Vector:
        """Convex combination of the vertices with the given (normalized) weights."""
        total = sum(weights)
        return tuple(sum(w * v[k] for w, v in zip(weights, self.vertices)) / total for k in range(self.dim))

    def __str__(self) -> str:
        return "conv{" + "; ".join("(" + ",".join(str(x) for x in v) + ")" for v in self.vertices) + "}"


def minkowski_sum(polytopes: Sequence[VPolytope], dim: int, tag: str = "") -> VPolytope:
    total: Optional[VPolytope] = None
    for p in polytopes:
        total = p if total is None else total.minkowski(p)
    if total is None:
        return VPolytope.point((0,) * dim, tag)
    return VPolytope(total.dim, total.vertices, tag)
