"""
Tropical Service

Cell decompositions induced by max-plus polynomials and their arrangements,
regular subdivisions of lifted point configurations, and the checks tying
the tropical hypersurfaces of s-arcs to shards, quotient foams and
quotientoplexes.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from app.core import linalg
from app.core.config import settings
from app.core.exceptions import CapExceeded, DegenerateConfig, DimensionMismatch
from app.core.rational import difference
from app.core.ppl_backend import solve_lp
from app.models.arc import SArc
from app.models.bush import SComposition
from app.models.complex import PolyhedralComplex
from app.models.polyhedron import HPolyhedron
from app.models.tropical import TropicalPolynomial
from app.models.vpolytope import VPolytope, minkowski_sum
from app.services.arc_service import arc_service
from app.services.congruence_service import congruence_service
from app.services.geometry_service import geometry_service
from app.services.shardoplex_service import TrunkComplex, shardoplex_service

logger = logging.getLogger(__name__)


@dataclass
class RegularSubdivision:
    """Projections of the upper faces of a lifted point configuration."""
    dim: int
    points: Tuple[Tuple[Fraction, ...], ...]
    lifting: Tuple[Fraction, ...]
    cells: Dict[Tuple, VPolytope] = field(default_factory=dict)

    @property
    def maximal(self) -> List[VPolytope]:
        top = max(c.dimension for c in self.cells.values())
        return [c for c in self.cells.values() if c.dimension == top]

    @property
    def is_trivial(self) -> bool:
        hull = VPolytope.from_points(self.dim, self.points)
        return [c.key for c in self.maximal] == [hull.key]


@dataclass
class HypersurfaceReport:
    arc: SArc
    contains_shard: bool
    walls: List[Tuple[str, List[SArc]]]
    uncovered: List[str]
    extra_walls: int

    @property
    def ok(self) -> bool:
        return self.contains_shard and not self.uncovered


@dataclass
class DualityReport:
    cells: int
    matched: int
    dimensions: bool
    orthogonal: bool
    inclusion_reversing: bool
    bijective: bool

    @property
    def ok(self) -> bool:
        return self.dimensions and self.orthogonal and self.inclusion_reversing and self.bijective


class TropicalService:
    """Service for tropical hypersurfaces of s-arcs and their duals."""

    def polynomial(self, points: Sequence[Sequence], lifting: Sequence) -> TropicalPolynomial:
        if not points:
            raise DimensionMismatch("no points to build a polynomial from")
        return TropicalPolynomial.from_terms(len(points[0]), zip(lifting, points))

    def F_alpha(self, s: SComposition, alpha: SArc) -> TropicalPolynomial:
        """Terms (lifting, characteristic vector) over the alternating matchings of the arc."""
        config = shardoplex_service.lifted_configuration(s, alpha)
        return TropicalPolynomial.from_terms(s.n, [(lp.lifting, lp.point) for lp in config])

    # ------------------------------------------------------------------
    # Cells
    # ------------------------------------------------------------------

    def cells(self, poly: TropicalPolynomial, cap: Optional[int] = None) -> PolyhedralComplex:
        """
        Regions of the terms together with all their faces; every cell is
        labelled by the set of terms attaining the maximum on its interior.

        Raises:
            CapExceeded: if there are more cells than the cap
        """
        n = poly.dim
        maximal = []
        for k in range(len(poly)):
            region = poly.region(k)
            if region.dimension == n:
                maximal.append((frozenset({k}), region))
        complex_ = PolyhedralComplex(n, maximal, name=f"cells({len(poly)} terms)")
        self._label_cells(complex_, [poly], cap, single=True)
        return complex_

    def arrangement_cells(
        self, polys: Sequence[TropicalPolynomial], dim: Optional[int] = None, cap: Optional[int] = None
    ) -> PolyhedralComplex:
        """
        Common refinement of the cell decompositions of several polynomials.

        Raises:
            CapExceeded: if the refinement has more cells than the cap
        """
        cap = cap or settings.enumeration_cap
        n = dim if dim is not None else polys[0].dim
        pieces: List[Tuple[Tuple[FrozenSet[int], ...], HPolyhedron]] = [((), HPolyhedron.whole_space(n))]
        for poly in polys:
            regions = [(k, poly.region(k)) for k in range(len(poly))]
            refined = []
            for label, piece in pieces:
                for k, region in regions:
                    meet = piece.intersect(region)
                    if meet.dimension == n:
                        refined.append((label + (frozenset({k}),), meet))
            if len(refined) > cap:
                raise CapExceeded("arrangement regions", len(refined), cap)
            pieces = refined
        complex_ = PolyhedralComplex(n, pieces, name=f"arrangement({len(polys)})")
        self._label_cells(complex_, polys, cap)
        logger.info(f"Arrangement of {len(polys)} polynomials: {len(complex_.maximal)} regions, {len(complex_.cells)} cells")
        return complex_

    def _label_cells(
        self, complex_: PolyhedralComplex, polys: Sequence[TropicalPolynomial], cap: Optional[int], single: bool = False
    ) -> None:
        cap = cap or settings.enumeration_cap
        if len(complex_.cells) > cap:
            raise CapExceeded("tropical cells", len(complex_.cells), cap)
        for key, cell in complex_.cells.items():
            x = cell.relative_interior_point
            labels = tuple(p.argmax(x) for p in polys)
            complex_.set_label(key, labels[0] if single else labels)

    def product_polynomial(self, polys: Sequence[TropicalPolynomial], cap: Optional[int] = None) -> TropicalPolynomial:
        """
        Tropical product; its hypersurface is the union of the factors' hypersurfaces.

        Raises:
            CapExceeded: if the expanded product has more terms than the cap
        """
        cap = cap or settings.enumeration_cap
        size = 1
        for p in polys:
            size *= len(p)
        if size > cap:
            raise CapExceeded("product terms", size, cap)
        product = polys[0]
        for p in polys[1:]:
            product = product.tropical_product(p)
        return product

    def same_cells(self, first: PolyhedralComplex, second: PolyhedralComplex) -> bool:
        return set(first.cells) == set(second.cells)

    def hypersurface_cells(self, complex_: PolyhedralComplex) -> List[HPolyhedron]:
        """Cells where some polynomial attains its maximum at least twice."""
        out = []
        for key, cell in complex_.cells.items():
            label = complex_.label(key)
            sets = label if isinstance(label, tuple) else (label,)
            if any(len(s) >= 2 for s in sets):
                out.append(cell)
        return out

    # ------------------------------------------------------------------
    # Hypersurfaces of arcs
    # ------------------------------------------------------------------

    def minimal_cell(self, s: SComposition, alpha: SArc) -> HPolyhedron:
        """The subspace where every term of F_alpha attains the maximum."""
        n, i = s.n, alpha.i

        def offset(upto: int) -> int:
            return alpha.r - 1 + sum(s.m(k) for k in alpha.B if i < k < upto)

        equalities = [(difference(n, i - 1, alpha.j - 1), offset(alpha.j))]
        for k in sorted(alpha.A | alpha.B):
            equalities.append((difference(n, i - 1, k - 1), offset(k)))
        return HPolyhedron.build(n, (), equalities, tag=f"Cmin{alpha}")

    def check_minimal_cell(self, s: SComposition, alpha: SArc) -> bool:
        complex_ = self.cells(self.F_alpha(s, alpha))
        low = min(cell.dimension for cell in complex_.cells.values())
        lowest = complex_.cells_of_dimension(low)
        expected = self.minimal_cell(s, alpha)
        return (
            len(lowest) == 1
            and lowest[0] == expected.canonical
            and low == s.n - 1 - len(alpha.A | alpha.B)
        )

    def hypersurface_vs_shards(self, s: SComposition, alpha: SArc) -> HypersurfaceReport:
        """
        The shard lies where the empty matching and {i<j} both attain the
        maximum; every wall of the hypersurface lies in the shard of a subarc.
        """
        poly = self.F_alpha(s, alpha)
        shard = geometry_service.shard(s, alpha).polyhedron
        empty = poly.index_of((0,) * s.n)
        whole = poly.index_of(difference(s.n, alpha.i - 1, alpha.j - 1))
        contains = shard.is_subset_of(poly.region(empty).intersect(poly.region(whole)))

        subarcs = [beta for beta in arc_service.all_arcs(s) if congruence_service.is_subarc(s, beta, alpha)]
        shards = {beta: geometry_service.shard(s, beta).polyhedron for beta in subarcs}
        complex_ = self.cells(poly)
        walls, uncovered, extra = [], [], 0
        for key in complex_.cells_of_dimension(s.n - 1):
            wall = complex_.cells[key]
            label = ",".join(str(k) for k in sorted(complex_.label(key)))
            covering = [beta for beta in subarcs if wall.is_subset_of(shards[beta])]
            if not covering:
                uncovered.append(label)
            if not wall.is_subset_of(shard):
                extra += 1
            walls.append((label, covering))
        report = HypersurfaceReport(alpha, contains, walls, uncovered, extra)
        logger.debug(f"Hypersurface of {alpha}: {len(walls)} walls, {extra} outside its own shard")
        return report

    # ------------------------------------------------------------------
    # Regular subdivisions and duality
    # ------------------------------------------------------------------

    def regular_subdivision(self, points: Sequence[Sequence], lifting: Sequence, cap: Optional[int] = None) -> RegularSubdivision:
        """
        Upper faces of the lifted configuration, projected back. Repeated
        points keep their largest lifting.

        Raises:
            CapExceeded: if there are more points than the cap
        """
        cap = cap or settings.subdivision_point_cap
        best: Dict[Tuple[Fraction, ...], Fraction] = {}
        for p, h in zip(points, lifting):
            p = tuple(Fraction(v) for v in p)
            h = Fraction(h)
            if p not in best or h > best[p]:
                best[p] = h
        if len(best) > cap:
            raise CapExceeded("configuration points", len(best), cap)
        pts = tuple(sorted(best))
        lift = tuple(best[p] for p in pts)
        n = len(pts[0])
        lifted = VPolytope.from_points(n + 1, [p + (h,) for p, h in zip(pts, lift)])
        out = RegularSubdivision(n, pts, lift)
        for face in lifted.face_sets:
            if self._is_upper(lifted, face):
                cell = VPolytope.from_points(n, [lifted.vertices[k][:n] for k in face])
                out.cells[cell.key] = cell
        logger.debug(f"Regular subdivision of {len(pts)} points: {len(out.cells)} cells")
        return out

    def _is_upper(self, lifted: VPolytope, face: FrozenSet[int]) -> bool:
        """Some functional (c, 1) is maximized exactly on the face."""
        n = lifted.dim - 1
        # variables: c (n), h, t
        a_eq, b_eq, a_ub, b_ub = [], [], [], []
        for k, v in enumerate(lifted.vertices):
            row = tuple(v[:n]) + (-1,)
            if k in face:
                a_eq.append(row + (0,))
                b_eq.append(-v[n])
            else:
                a_ub.append(row + (1,))
                b_ub.append(-v[n])
        a_ub.append((0,) * (n + 1) + (1,))
        b_ub.append(1)
        result = solve_lp(n + 2, (0,) * (n + 1) + (1,), a_ub, b_ub, a_eq, b_eq)
        return result.feasible and result.value is not None and result.value > 0

    def dual_cell(self, poly: TropicalPolynomial, indices: Iterable[int]) -> VPolytope:
        return VPolytope.from_points(poly.dim, [poly.terms[k].exponent for k in indices])

    def tropical_dual_check(self, subdivision: RegularSubdivision, poly: TropicalPolynomial) -> DualityReport:
        """
        Cells of the polynomial and cells of the subdivision correspond with
        complementary dimensions, reversed inclusions and orthogonal spans.

        Raises:
            DegenerateConfig: if the polynomial is not built on the subdivision's lifted points
        """
        lifted = dict(zip(subdivision.points, subdivision.lifting))
        for t in poly.terms:
            if lifted.get(t.exponent) != t.coefficient:
                raise DegenerateConfig("polynomial terms and lifted points do not correspond")
        complex_ = self.cells(poly)
        duals = {key: self.dual_cell(poly, complex_.label(key)) for key in complex_.cells}
        return self._duality(complex_, duals, subdivision.cells, poly.dim)

    def _duality(
        self,
        complex_: PolyhedralComplex,
        duals: Mapping[Tuple, VPolytope],
        targets: Mapping[Tuple, VPolytope],
        n: int,
    ) -> DualityReport:
        matched = sum(1 for d in duals.values() if d.key in targets)
        dimensions = all(complex_.cells[key].dimension + d.dimension == n for key, d in duals.items())
        orthogonal = all(
            linalg.orthogonal(complex_.cells[key].affine_direction(), d.direction) for key, d in duals.items()
        )
        images = {d.key for d in duals.values()}
        bijective = len(images) == len(duals) and images == set(targets)
        inclusion = True
        for face, cell in complex_.face_graph.edges:
            small, big = duals[cell], duals[face]
            if not small.is_face_of(big):
                inclusion = False
                break
        report = DualityReport(len(duals), matched, dimensions, orthogonal, inclusion, bijective)
        if not report.ok:
            logger.warning(f"Duality check failed for {complex_.name}: {report}")
        return report

    def trivial_subdivision_check(self, s: SComposition, alpha: SArc) -> bool:
        """The lifting of an arc induces the trivial subdivision of its shard polytope."""
        config = shardoplex_service.lifted_configuration(s, alpha)
        subdivision = self.regular_subdivision([lp.point for lp in config], [lp.lifting for lp in config])
        return subdivision.is_trivial

    # ------------------------------------------------------------------
    # Quotient foams and quotientoplexes
    # ------------------------------------------------------------------

    def quotient_arrangement(self, s: SComposition, downset: Iterable[SArc]) -> PolyhedralComplex:
        polys = [self.F_alpha(s, alpha) for alpha in sorted(downset)]
        return self.arrangement_cells(polys, dim=s.n)

    def quotient_foam_check(self, s: SComposition, downset: Iterable[SArc]) -> bool:
        """The quotient foam is the complex induced by the hypersurfaces of its arcs."""
        downset = congruence_service.validate_downset(s, downset)
        foam = geometry_service.quotient_foam(s, downset)
        return self.same_cells(foam, self.quotient_arrangement(s, downset))

    def mixed_dual(self, s: SComposition, lambdas: Mapping[SArc, Fraction], x: Sequence) -> VPolytope:
        """Sum of the scaled faces of the shard polytopes selected at x."""
        parts = []
        for alpha, lam in lambdas.items():
            poly = self.F_alpha(s, alpha)
            parts.append(self.dual_cell(poly, poly.argmax(x)).scale(lam))
        return minkowski_sum(parts, s.n)

    def quotientoplex_duality(self, s: SComposition, complex_: TrunkComplex) -> DualityReport:
        """
        Faces of the quotient foam against faces of the quotientoplex: each
        foam cell maps to the mixed cell selected on its relative interior.
        """
        foam = geometry_service.quotient_foam(s, complex_.arcs)
        duals = {
            key: self.mixed_dual(s, complex_.lambdas, cell.relative_interior_point)
            for key, cell in foam.cells.items()
        }
        return self._duality(foam, duals, complex_.faces, s.n)

    def mixed_subdivision(self, s: SComposition, lambdas: Mapping[SArc, Fraction], cap: Optional[int] = None) -> RegularSubdivision:
        """
        Regular subdivision of the Minkowski sum of the scaled lifted configurations.

        Raises:
            CapExceeded: if the summed configuration is too large
        """
        cap = cap or settings.subdivision_point_cap
        points = {((Fraction(0),) * s.n): Fraction(0)}
        for alpha, lam in lambdas.items():
            config = shardoplex_service.lifted_configuration(s, alpha)
            summed: Dict[Tuple[Fraction, ...], Fraction] = {}
            for p, h in points.items():
                for lp in config:
                    q = tuple(a + lam * b for a, b in zip(p, lp.point))
                    value = h + lam * lp.lifting
                    if q not in summed or value > summed[q]:
                        summed[q] = value
            if len(summed) > cap:
                raise CapExceeded("configuration points", len(summed), cap)
            points = summed
        return self.regular_subdivision(list(points), list(points.values()), cap)

    def quotientoplex_subdivision_check(self, s: SComposition, complex_: TrunkComplex) -> bool:
        """Cells of the quotientoplex are the cells of the mixed regular subdivision."""
        subdivision = self.mixed_subdivision(s, complex_.lambdas)
        return set(subdivision.cells) == set(complex_.faces)

    def scaling_invariant(self, poly: TropicalPolynomial, factor) -> bool:
        """Scaling coefficients and exponents together leaves the cells unchanged."""
        return self.same_cells(self.cells(poly), self.cells(poly.scaled(factor)))

    def check_arc(self, s: SComposition, alpha: SArc) -> bool:
        return (
            self.hypersurface_vs_shards(s, alpha).ok
            and self.check_minimal_cell(s, alpha)
            and self.trivial_subdivision_check(s, alpha)
        )


# Global service instance
tropical_service = TropicalService()
