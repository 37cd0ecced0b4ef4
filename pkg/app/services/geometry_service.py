"""
Geometry Service

s-shards, the s-foam as a polyhedral complex of closed fibers, quotient foams
obtained by gluing tree fibers along a congruence, and their dual graphs.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from app.core.config import settings
from app.core.exceptions import CapExceeded, InvariantViolation
from app.core.rational import difference
from app.models.arc import SArc
from app.models.bush import Bush, SComposition
from app.models.complex import PolyhedralComplex
from app.models.lattice import FiniteLattice
from app.models.polyhedron import HPolyhedron
from app.services.arc_service import arc_service
from app.services.congruence_service import Congruence, congruence_service
from app.services.insertion_service import insertion_service
from app.services.lattice_service import lattice_service
from app.services.sbase_service import BUSHES, TREES, sbase_service

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SShard:
    arc: SArc
    polyhedron: HPolyhedron


class GeometryService:
    """Service for shards, foams and quotient foams."""

    def shard(self, s: SComposition, alpha: SArc) -> SShard:
        """
        Hyperplane x_i - x_j = r - 1 + sum_{k in B} m_k cut by one inequality
        per interior node.
        """
        alpha.validate(s)
        n, i = s.n, alpha.i

        def offset(upto: int) -> int:
            return alpha.r - 1 + sum(s.m(k) for k in alpha.B if i < k < upto)

        equalities = [(difference(n, i - 1, alpha.j - 1), offset(alpha.j))]
        inequalities = []
        for a in alpha.A:
            # x_i - x_a >= offset
            inequalities.append((difference(n, a - 1, i - 1), -offset(a)))
        for b in alpha.B:
            inequalities.append((difference(n, i - 1, b - 1), offset(b)))
        return SShard(alpha, HPolyhedron.build(n, inequalities, equalities, tag=str(alpha)))

    def shard_bushes(self, s: SComposition, alpha: SArc) -> List[Bush]:
        """Bushes whose closed fiber lies in the shard."""
        shard = self.shard(s, alpha).polyhedron
        return [b for b in sbase_service.enumerate(s, BUSHES) if insertion_service.fiber(b).is_subset_of(shard)]

    def check_shard_decomposition(self, s: SComposition, alpha: SArc, samples: int = 50, seed: Optional[int] = None) -> bool:
        """Every sampled point of the shard lies in the fiber of one of its bushes."""
        shard = self.shard(s, alpha).polyhedron
        bushes = set(self.shard_bushes(s, alpha))
        rng = random.Random(settings.seed if seed is None else seed)
        for x in self._points_on(shard, s.n, rng, samples):
            if insertion_service.insert(s, x) not in bushes:
                return False
        return True

    def _points_on(self, shard: HPolyhedron, n: int, rng: random.Random, count: int) -> Iterable[Tuple[Fraction, ...]]:
        ((a, b),) = shard.equalities
        p = next(k for k, v in enumerate(a) if v > 0)
        q = next(k for k, v in enumerate(a) if v < 0)
        found = 0
        tries = 0
        while found < count and tries < 50 * count:
            tries += 1
            x = list(insertion_service.random_point(n, rng, denominator=3))
            x[q] = x[p] - Fraction(b, a[p])
            if shard.contains(x):
                found += 1
                yield tuple(x)

    # ------------------------------------------------------------------
    # Foams
    # ------------------------------------------------------------------

    def foam(self, s: SComposition, cap: Optional[int] = None) -> PolyhedralComplex:
        """
        Complex of closed fibers, with the trees as maximal cells.

        Raises:
            CapExceeded: if there are more bushes than the cap
        """
        cap = cap or settings.enumeration_cap
        total = sbase_service.count(s, BUSHES)
        if total > cap:
            raise CapExceeded("bushes", total, cap)
        trees = sbase_service.enumerate(s, TREES)
        complex_ = PolyhedralComplex(s.n, [(t, insertion_service.fiber(t)) for t in trees], name=f"foam({s})")
        for b in sbase_service.enumerate(s, BUSHES):
            key = insertion_service.fiber(b).canonical
            if key not in complex_.cells:
                raise InvariantViolation(f"fiber of {b.code} is not a cell of the foam")
            complex_.set_label(key, b)
        logger.info(f"Built foam of s=({s}): {len(complex_.cells)} cells")
        return complex_

    def quotient_foam(self, s: SComposition, downset: Iterable[SArc]) -> PolyhedralComplex:
        """
        Glue the tree fibers of every congruence class into one maximal cell.

        Raises:
            NotADownSet: if the arcs are not closed under subarcs
        """
        congruence = congruence_service.congruence_from_downset(s, downset)
        return self.foam_of_congruence(congruence)

    def foam_of_congruence(self, congruence: Congruence) -> PolyhedralComplex:
        lattice = congruence.lattice
        maximal = []
        for members in congruence.classes:
            indices = [lattice.index(t) for t in members]
            bottom = lattice.labels[lattice.minimal_elements(indices)[0]]
            fibers = [insertion_service.fiber(t) for t in members]
            maximal.append((bottom, self._glue(congruence.s.n, fibers)))
        return PolyhedralComplex(congruence.s.n, maximal, name=f"quotient_foam({congruence.s})")

    def _glue(self, n: int, fibers: Sequence[HPolyhedron]) -> HPolyhedron:
        """Convex union of fibers: member facets valid on every member."""
        rows = set()
        for fiber in fibers:
            rows.update(fiber.facets)
        valid = [row for row in sorted(rows) if all(self._satisfies(f, row) for f in fibers)]
        return HPolyhedron(n, tuple(valid), ())

    def _satisfies(self, poly: HPolyhedron, row) -> bool:
        value = poly.maximize(row[0])
        return value is not None and value <= row[1]

    def sample_points(self, n: int, count: Optional[int] = None, seed: Optional[int] = None) -> List[Tuple[Fraction, ...]]:
        rng = random.Random(settings.seed if seed is None else seed)
        count = count or settings.sample_points
        return [insertion_service.random_point(n, rng) for _ in range(count)]

    def check_complex(self, complex_: PolyhedralComplex, samples: Optional[int] = None) -> bool:
        points = self.sample_points(complex_.dim, samples)
        return (
            complex_.check_face_closed()
            and complex_.check_intersections()
            and complex_.check_complete(points)
        )

    # ------------------------------------------------------------------
    # Walls and dual graphs
    # ------------------------------------------------------------------

    def wall_arc(self, b: Bush) -> SArc:
        """Arc of the shard containing a codimension-one fiber."""
        lower, upper = insertion_service.left_tree(b), insertion_service.right_tree(b)
        pair = lattice_service.rotation_label(lower, upper)
        if pair is None:
            raise InvariantViolation(f"extremal trees of {b.code} are not related by a rotation")
        return arc_service.alpha_join(upper, *pair)

    def check_walls(self, s: SComposition, downset: Iterable[SArc], complex_: PolyhedralComplex) -> bool:
        """Codimension-one foam cells lie in a quotient wall exactly when their arc is uncontracted."""
        downset = set(downset)
        walls = [complex_.cells[k] for k in complex_.cells_of_dimension(s.n - 1)]
        for b in sbase_service.enumerate(s, BUSHES):
            if b.rank != s.n - 1:
                continue
            alpha = self.wall_arc(b)
            fiber = insertion_service.fiber(b)
            if not fiber.is_subset_of(self.shard(s, alpha).polyhedron):
                return False
            x = fiber.relative_interior_point
            on_wall = any(w.contains(x) for w in walls)
            if on_wall != (alpha in downset):
                return False
        return True

    def omega(self, n: int) -> Tuple[int, ...]:
        return insertion_service.omega(n)

    def dual_graph(self, complex_: PolyhedralComplex) -> nx.DiGraph:
        return complex_.dual_graph(self.omega(complex_.dim))

    def dual_matches_lattice(self, complex_: PolyhedralComplex, lattice: FiniteLattice) -> bool:
        """
        Compare the dual graph with the Hasse diagram through cell labels.

        Maximal cells are labelled by an element of the lattice (the class
        minimum for quotient foams).
        """
        dual = self.dual_graph(complex_)
        hasse = {(lattice.labels[a], lattice.labels[b]) for a, b in lattice.covers}
        return set(dual.nodes) == set(lattice.labels) and set(dual.edges) == hasse


# Global service instance
geometry_service = GeometryService()
