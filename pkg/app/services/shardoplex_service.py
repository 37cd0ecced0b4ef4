"""
Shardoplex Service

Shard polytopes of s-arcs through alternating matchings, their local faces
indexed by s-trunks, cell-wise Minkowski sums of such trunk-indexed families
and the quotientoplexes of congruences.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from app.core.config import settings
from app.core.exceptions import DegenerateConfig, InputError, NonPositiveLambda, SeparationFailed
from app.core.rational import Vector, difference, dot, to_fraction
from app.models.arc import SArc, canonical_diagram
from app.models.bush import SComposition
from app.models.complex import PolyhedralComplex
from app.models.vpolytope import VPolytope, minkowski_sum
from app.services.arc_service import arc_service
from app.services.congruence_service import congruence_service
from app.services.insertion_service import insertion_service
from app.services.sbase_service import sbase_service

logger = logging.getLogger(__name__)

TrunkIndex = Tuple[int, ...]


@dataclass(frozen=True)
class AlternatingMatching:
    """Pairs i_1 < j_1 < ... < i_q < j_q, each i_p a source and j_p a target of the arc."""
    pairs: Tuple[Tuple[int, int], ...]

    @property
    def first(self) -> Optional[int]:
        return self.pairs[0][0] if self.pairs else None

    def characteristic(self, n: int) -> Tuple[int, ...]:
        chi = [0] * n
        for a, b in self.pairs:
            chi[a - 1] += 1
            chi[b - 1] -= 1
        return tuple(chi)

    def __str__(self) -> str:
        if not self.pairs:
            return "{}"
        return "{" + "<".join(f"{a}<{b}" for a, b in self.pairs) + "}"


@dataclass(frozen=True)
class LiftedPoint:
    matching: AlternatingMatching
    point: Tuple[int, ...]
    lifting: int


@dataclass
class TrunkComplex:
    """
    A family of polytopes indexed by s-trunks, together with all their faces.

    Shardoplexes carry a single arc; quotientoplexes carry a down set and the
    scaling coefficients.
    """
    s: SComposition
    cells: Dict[TrunkIndex, VPolytope]
    name: str = ""
    arcs: Tuple[SArc, ...] = ()
    lambdas: Dict[SArc, Fraction] = field(default_factory=dict)

    @cached_property
    def maximal(self) -> Dict[TrunkIndex, VPolytope]:
        """Distinct inclusion-maximal cells, each labelled by its smallest trunk index."""
        by_key: Dict[Tuple, TrunkIndex] = {}
        for q in sorted(self.cells):
            by_key.setdefault(self.cells[q].key, q)
        distinct = {q: self.cells[q] for q in by_key.values()}
        out = {}
        for q, poly in distinct.items():
            if any(other.key != poly.key and poly.is_face_of(other) for other in distinct.values()):
                continue
            out[q] = poly
        return out

    @cached_property
    def faces(self) -> Dict[Tuple, VPolytope]:
        out: Dict[Tuple, VPolytope] = {}
        for poly in self.maximal.values():
            for face in poly.faces():
                out.setdefault(face.key, face)
        return out

    @cached_property
    def f_vector(self) -> Tuple[int, ...]:
        dims = [f.dimension for f in self.faces.values()]
        return tuple(dims.count(k) for k in range(max(dims) + 1))

    def faces_of_dimension(self, k: int) -> List[VPolytope]:
        return sorted((f for f in self.faces.values() if f.dimension == k), key=lambda f: f.key)

    def is_face(self, small: Tuple, big: Tuple) -> bool:
        """Whether the cell keyed ``small`` is a face of the cell keyed ``big``."""
        if small == big:
            return True
        if not set(small) <= set(big):
            return False
        return small in {f.key for f in self.faces[big].faces()}

    @cached_property
    def support_hull(self) -> VPolytope:
        points = [v for poly in self.maximal.values() for v in poly.vertices]
        return VPolytope.from_points(self.s.n, points, tag=f"support({self.name})")

    def check_complex(self) -> bool:
        """Maximal cells pairwise meet in a common face (or not at all)."""
        polys = [(q, poly.to_hpolyhedron(tag=str(q))) for q, poly in self.maximal.items()]
        return PolyhedralComplex(self.s.n, polys, name=self.name).check_intersections()

    def skeleton(self, direction: Sequence[int]) -> nx.DiGraph:
        """
        Vertices and edges, each edge u -> v oriented so that v - u points
        against ``direction``, as in the dual graph of a foam.

        Raises:
            DegenerateConfig: if an edge is orthogonal to the direction
        """
        graph = nx.DiGraph()
        graph.add_nodes_from(f.vertices[0] for f in self.faces_of_dimension(0))
        for edge in self.faces_of_dimension(1):
            u, v = edge.vertices
            step = dot(direction, tuple(b - a for a, b in zip(u, v)))
            if step == 0:
                raise DegenerateConfig(f"edge {edge} is orthogonal to the orientation")
            if step < 0:
                graph.add_edge(u, v)
            else:
                graph.add_edge(v, u)
        return graph


class ShardoplexService:
    """Service for shard polytopes, shardoplexes and quotientoplexes."""

    # ------------------------------------------------------------------
    # Alternating matchings and liftings
    # ------------------------------------------------------------------

    def alternating_matchings(self, s: SComposition, alpha: SArc) -> List[AlternatingMatching]:
        """All alternating matchings of the classical arc (i, j, A, B), the empty one first."""
        alpha.validate(s)
        sources = sorted({alpha.i} | alpha.A)
        targets = sorted(alpha.B | {alpha.j})
        out: List[AlternatingMatching] = []

        def extend(after: int, acc: Tuple[Tuple[int, int], ...]) -> None:
            out.append(AlternatingMatching(acc))
            for a in sources:
                if a <= after:
                    continue
                for b in targets:
                    if b > a:
                        extend(b, acc + ((a, b),))

        extend(0, ())
        return out

    def lifting(self, s: SComposition, alpha: SArc, matching: AlternatingMatching) -> int:
        """-(r-1)[i_1 = i] - sum over pairs of m_k for k in B strictly inside the pair."""
        value = -(alpha.r - 1) if matching.first == alpha.i else 0
        for a, b in matching.pairs:
            value -= sum(s.m(k) for k in alpha.B if a < k < b)
        return value

    def lifted_configuration(self, s: SComposition, alpha: SArc) -> List[LiftedPoint]:
        return [
            LiftedPoint(m, m.characteristic(s.n), self.lifting(s, alpha, m))
            for m in self.alternating_matchings(s, alpha)
        ]

    def shard_polytope(self, s: SComposition, alpha: SArc) -> VPolytope:
        points = [m.characteristic(s.n) for m in self.alternating_matchings(s, alpha)]
        return VPolytope.from_points(s.n, points, tag=f"SP{alpha}")

    # ------------------------------------------------------------------
    # Local shard polytopes and shardoplexes
    # ------------------------------------------------------------------

    def local_direction(self, s: SComposition, alpha: SArc, q: Sequence[int]) -> Tuple[int, ...]:
        i, j = alpha.i, alpha.j
        direction = [0] * s.n
        for ell in range(i + 1, j + 1):
            direction[ell - 1] = (
                q[i - 1] - q[ell - 1] + alpha.r - 1 + sum(s.m(k) for k in alpha.B if i < k < ell)
            )
        return tuple(direction)

    def local_shard_polytope(self, s: SComposition, alpha: SArc, q: Sequence[int]) -> VPolytope:
        face = self.shard_polytope(s, alpha).face_maximizing(self.local_direction(s, alpha, q))
        return VPolytope(face.dim, face.vertices, tag=f"SP{alpha}@{tuple(q)}")

    def full_trunk(self, s: SComposition, alpha: SArc) -> TrunkIndex:
        """A trunk index whose local shard polytope is the whole shard polytope."""
        q = [1] * s.n
        for ell in range(alpha.i + 1, alpha.j + 1):
            q[ell - 1] = alpha.r + sum(s.m(k) for k in alpha.B if alpha.i < k < ell)
        return tuple(q)

    def shardoplex(self, s: SComposition, alpha: SArc) -> TrunkComplex:
        cells = {q: self.local_shard_polytope(s, alpha, q) for q in sbase_service.trunk_indices(s)}
        complex_ = TrunkComplex(s, cells, name=f"shardoplex{alpha}", arcs=(alpha,), lambdas={alpha: Fraction(1)})
        logger.debug(f"Shardoplex of {alpha}: {len(complex_.maximal)} maximal cells over {len(cells)} trunks")
        return complex_

    # ------------------------------------------------------------------
    # Minkowski sums and quotientoplexes
    # ------------------------------------------------------------------

    def check_separation(self, complex_: TrunkComplex) -> bool:
        """
        For trunks p != q, the linear form q - p is at least some constant on
        the p-cell and at most it on the q-cell.
        """
        for p, first in complex_.cells.items():
            for q, second in complex_.cells.items():
                if p == q:
                    continue
                d = tuple(a - b for a, b in zip(q, p))
                if min(dot(d, v) for v in first.vertices) < max(dot(d, v) for v in second.vertices):
                    return False
        return True

    def minkowski_cellwise(self, first: TrunkComplex, second: TrunkComplex, name: str = "") -> TrunkComplex:
        """
        Cell-wise Minkowski sum of two trunk-indexed families.

        Raises:
            InputError: if the families are indexed by different trunks
            SeparationFailed: if either family violates the separation hypothesis
        """
        if set(first.cells) != set(second.cells):
            raise InputError("Minkowski sum of families over different trunk sets")
        for operand in (first, second):
            if not self.check_separation(operand):
                raise SeparationFailed(f"{operand.name} is not separated by trunk differences")
        cells = {q: first.cells[q].minkowski(second.cells[q]) for q in first.cells}
        lambdas = dict(first.lambdas)
        for alpha, lam in second.lambdas.items():
            lambdas[alpha] = lambdas.get(alpha, Fraction(0)) + lam
        arcs = tuple(canonical_diagram(first.arcs + second.arcs))
        return TrunkComplex(first.s, cells, name or f"{first.name}+{second.name}", arcs, lambdas)

    def scale(self, complex_: TrunkComplex, factor) -> TrunkComplex:
        factor = to_fraction(factor)
        cells = {q: poly.scale(factor) for q, poly in complex_.cells.items()}
        lambdas = {alpha: lam * factor for alpha, lam in complex_.lambdas.items()}
        return TrunkComplex(complex_.s, cells, f"{factor}*{complex_.name}", complex_.arcs, lambdas)

    def point_family(self, s: SComposition, x: Sequence) -> TrunkComplex:
        """The same point on every trunk; adding it translates a family."""
        return TrunkComplex(s, {q: VPolytope.point(x) for q in sbase_service.trunk_indices(s)}, name="point")

    def validate_lambdas(
        self, s: SComposition, downset: Iterable[SArc], lambdas: Optional[Mapping[SArc, object]] = None
    ) -> Dict[SArc, Fraction]:
        """
        Raises:
            NonPositiveLambda: if a coefficient is not positive
            InputError: if a coefficient is given for an arc outside the down set
        """
        downset = set(downset)
        lambdas = dict(lambdas or {})
        stray = set(lambdas) - downset
        if stray:
            raise InputError(f"coefficients for arcs outside the down set: {[str(a) for a in canonical_diagram(stray)]}")
        out = {}
        for alpha in canonical_diagram(downset):
            value = to_fraction(lambdas.get(alpha, 1))
            if value <= 0:
                raise NonPositiveLambda(f"lambda for {alpha} is {value}")
            out[alpha] = value
        return out

    def quotientoplex(
        self, s: SComposition, downset: Iterable[SArc], lambdas: Optional[Mapping[SArc, object]] = None
    ) -> TrunkComplex:
        """
        Sum of the scaled shardoplexes of a down set, trunk by trunk.

        Raises:
            NotADownSet: if the arcs are not closed under subarcs
            NonPositiveLambda: if a coefficient is not positive
        """
        downset = congruence_service.validate_downset(s, downset)
        coefficients = self.validate_lambdas(s, downset, lambdas)
        trunks = list(sbase_service.trunk_indices(s))
        cells = {}
        for q in trunks:
            parts = [self.local_shard_polytope(s, alpha, q).scale(lam) for alpha, lam in coefficients.items()]
            cells[q] = minkowski_sum(parts, s.n, tag=f"Q@{q}")
        complex_ = TrunkComplex(s, cells, f"quotientoplex({s})", tuple(coefficients), coefficients)
        logger.info(
            f"Quotientoplex of s=({s}) for {len(coefficients)} arcs: "
            f"{len(complex_.maximal)} maximal cells, f-vector {complex_.f_vector}"
        )
        return complex_

    def support_polytope(self, s: SComposition, lambdas: Mapping[SArc, Fraction]) -> VPolytope:
        """Sum of the scaled shard polytopes of the arcs."""
        parts = [self.shard_polytope(s, alpha).scale(lam) for alpha, lam in lambdas.items()]
        return minkowski_sum(parts, s.n, tag="support")

    def support_matches(
        self, complex_: TrunkComplex, target: VPolytope, samples: int = 50, seed: Optional[int] = None
    ) -> bool:
        """
        Every cell lies in the target, and sampled interior points of the target
        lie in some cell.
        """
        hrep = target.to_hpolyhedron()
        for poly in complex_.maximal.values():
            if not all(hrep.contains(v) for v in poly.vertices):
                return False
        cells = [poly.to_hpolyhedron() for poly in complex_.maximal.values()]
        rng = random.Random(settings.seed if seed is None else seed)
        for _ in range(samples):
            weights = [Fraction(rng.randint(1, settings.sample_denominator)) for _ in target.vertices]
            x = target.sample(weights)
            if not any(cell.contains(x) for cell in cells):
                logger.warning(f"Point {tuple(map(str, x))} of {target.tag} is in no cell of {complex_.name}")
                return False
        return True

    # ------------------------------------------------------------------
    # Skeleton versus quotient lattice
    # ------------------------------------------------------------------

    def dual_vertex(self, s: SComposition, lambdas: Mapping[SArc, Fraction], x: Sequence) -> Vector:
        """
        Sum over arcs of the scaled point whose lifted value is maximal at x.

        Raises:
            DegenerateConfig: if the maximum is attained twice for some arc
        """
        total = [Fraction(0)] * s.n
        for alpha, lam in lambdas.items():
            config = self.lifted_configuration(s, alpha)
            values = [lp.lifting + dot(lp.point, x) for lp in config]
            top = max(values)
            best = [lp for lp, v in zip(config, values) if v == top]
            if len(best) != 1:
                raise DegenerateConfig(f"x lies on the tropical hypersurface of {alpha}")
            for k in range(s.n):
                total[k] += lam * best[0].point[k]
        return tuple(total)

    def skeleton_matches_quotient(self, s: SComposition, complex_: TrunkComplex) -> bool:
        """
        The skeleton oriented along omega is the Hasse diagram of the quotient,
        with each class sent to the dual vertex of a point of its minimum's fiber.
        """
        congruence = congruence_service.congruence_from_downset(s, complex_.arcs)
        quotient = congruence_service.quotient(congruence)
        vertex_of: Dict[Hashable, Vector] = {}
        for tree in quotient.labels:
            vertex_of[tree] = self.dual_vertex(s, complex_.lambdas, insertion_service.fiber_point(tree))
        skeleton = complex_.skeleton(insertion_service.omega(s.n))
        if sorted(vertex_of.values()) != sorted(skeleton.nodes) or len(set(vertex_of.values())) != len(vertex_of):
            logger.warning(f"{complex_.name}: {len(skeleton)} vertices for {quotient.size} classes")
            return False
        hasse = {(vertex_of[quotient.labels[a]], vertex_of[quotient.labels[b]]) for a, b in quotient.covers}
        return hasse == set(skeleton.edges)

    # ------------------------------------------------------------------
    # Zonotopes
    # ------------------------------------------------------------------

    def dilation_factors(self, s: SComposition) -> Dict[Tuple[int, int], int]:
        n = s.n
        out = {}
        for i in range(1, n + 1):
            if s[i] == 0:
                continue
            left = sum(s[g] * 2 ** len(s.nonzero_between(g, i)) for g in range(1, i + 1))
            for j in range(i + 1, n + 1):
                right = 1
                if s[j] != 0:
                    right += sum(2 ** len(s.nonzero_between(j, ell)) for ell in range(j + 1, n + 1))
                out[(i, j)] = left * right
        return out

    def segment_zonotope(self, n: int, segments: Mapping[Tuple[int, int], object], tag: str = "") -> VPolytope:
        parts = [
            VPolytope.from_points(n, [(0,) * n, tuple(to_fraction(c) * v for v in difference(n, i - 1, j - 1))])
            for (i, j), c in sorted(segments.items())
            if to_fraction(c) != 0
        ]
        return minkowski_sum(parts, n, tag=tag)

    def dilation_zonotope(self, s: SComposition) -> VPolytope:
        return self.segment_zonotope(s.n, self.dilation_factors(s), tag=f"dilation({s})")

    def s_zonotope(self, s: SComposition) -> VPolytope:
        """Sum of s_i [e_i, e_j] over i < j, translated to start at the origin."""
        segments = {(i, j): s[i] for i in range(1, s.n + 1) for j in range(i + 1, s.n + 1) if s[i]}
        return self.segment_zonotope(s.n, segments, tag=f"Z({s})")

    def normally_equivalent(self, first: VPolytope, second: VPolytope) -> bool:
        """Equal normal fans: the sum has no more vertices than either summand."""
        total = first.minkowski(second)
        return len(total.vertices) == len(first.vertices) == len(second.vertices)

    def zonotope_support_check(self, s: SComposition, samples: int = 50) -> bool:
        """
        The trivial-congruence quotientoplex with unit coefficients subdivides
        the dilation zonotope (up to translation), which is normally
        equivalent to the s-zonotope.
        """
        complex_ = self.quotientoplex(s, arc_service.all_arcs(s))
        support = self.support_polytope(s, complex_.lambdas)
        if not self.support_matches(complex_, support, samples):
            return False
        dilation = self.dilation_zonotope(s)
        if not support.same_up_to_translation(dilation):
            logger.warning(f"Support of {complex_.name} differs from {dilation.tag}")
            return False
        return self.normally_equivalent(support, self.s_zonotope(s))


# Global service instance
shardoplex_service = ShardoplexService()
