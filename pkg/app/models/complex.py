"""
Polyhedral complexes of exact H-polyhedra.

Cells are keyed by the canonical form of their polyhedron. The face relation
is stored as a networkx digraph with an edge from every codimension-one face
to the cell it bounds; the adjacency of maximal cells is read off it.
"""

import logging
from fractions import Fraction
from functools import cached_property
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from app.core.exceptions import DegenerateConfig, NotComplete
from app.core.rational import dot
from app.models.polyhedron import CanonicalKey, HPolyhedron

logger = logging.getLogger(__name__)


class PolyhedralComplex:
    """A complex given by its maximal cells; lower cells are generated as faces."""

    def __init__(self, dim: int, maximal: Sequence[Tuple[Hashable, HPolyhedron]], name: str = ""):
        self.dim = dim
        self.name = name
        self.maximal: Dict[Hashable, HPolyhedron] = {}
        self._label_of: Dict[CanonicalKey, Hashable] = {}
        for label, poly in maximal:
            poly = poly.normalized(tag=str(label))
            self.maximal[label] = poly
            self._label_of[poly.canonical] = label

    # ------------------------------------------------------------------
    # Cells and the face relation
    # ------------------------------------------------------------------

    @cached_property
    def cells(self) -> Dict[CanonicalKey, HPolyhedron]:
        out: Dict[CanonicalKey, HPolyhedron] = {}
        for poly in self.maximal.values():
            for face in poly.faces():
                out.setdefault(face.canonical, face)
        logger.debug(f"Complex {self.name}: {len(self.maximal)} maximal cells, {len(out)} cells")
        return out

    @cached_property
    def face_graph(self) -> nx.DiGraph:
        """Edges face -> cell for codimension-one faces."""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.cells)
        for key, poly in self.cells.items():
            for row in poly.facets:
                face = poly.tighten(row)
                if face.is_empty:
                    continue
                graph.add_edge(face.normalized().canonical, key)
        return graph

    def label(self, key: CanonicalKey) -> Optional[Hashable]:
        return self._label_of.get(key)

    def set_label(self, key: CanonicalKey, label: Hashable) -> None:
        self._label_of.setdefault(key, label)

    def dimension_of(self, key: CanonicalKey) -> int:
        return self.cells[key].dimension

    def cells_of_dimension(self, k: int) -> List[CanonicalKey]:
        return sorted(key for key, poly in self.cells.items() if poly.dimension == k)

    def is_face(self, face: CanonicalKey, cell: CanonicalKey) -> bool:
        return face == cell or nx.has_path(self.face_graph, face, cell)

    def faces_of(self, cell: CanonicalKey) -> Set[CanonicalKey]:
        return nx.ancestors(self.face_graph, cell) | {cell}

    def maximal_containing(self, face: CanonicalKey) -> List[Hashable]:
        return sorted(
            (label for label, poly in self.maximal.items() if self.is_face(face, poly.canonical)),
            key=str,
        )

    @cached_property
    def f_vector(self) -> Tuple[int, ...]:
        """Number of cells per dimension, from the smallest cell dimension upwards."""
        dims = [poly.dimension for poly in self.cells.values()]
        low = min(dims)
        return tuple(dims.count(k) for k in range(low, max(dims) + 1))

    # ------------------------------------------------------------------
    # Complex axioms
    # ------------------------------------------------------------------

    def check_face_closed(self) -> bool:
        return all(
            source in self.cells for source, _ in self.face_graph.edges
        )

    def check_intersections(self) -> bool:
        """The intersection of two maximal cells is empty or a face of both."""
        polys = list(self.maximal.values())
        for a in range(len(polys)):
            for b in range(a + 1, len(polys)):
                meet = polys[a].intersect(polys[b])
                if meet.is_empty:
                    continue
                if not (meet.is_face_of(polys[a]) and meet.is_face_of(polys[b])):
                    logger.warning(f"Cells {polys[a].tag} and {polys[b].tag} meet outside a common face")
                    return False
        return True

    def locate(self, x: Sequence[Fraction]) -> List[Hashable]:
        """Maximal cells whose interior contains x."""
        return [label for label, poly in self.maximal.items() if poly.contains_in_relative_interior(x)]

    def check_complete(self, points: Iterable[Sequence[Fraction]]) -> bool:
        """
        Raises:
            NotComplete: if a sample point is in no maximal cell
        """
        top = max(poly.dimension for poly in self.maximal.values())
        for x in points:
            inside = [label for label, poly in self.maximal.items() if poly.contains(x)]
            if not inside:
                raise NotComplete(f"point {tuple(map(str, x))} lies in no cell of {self.name}")
            interior = [label for label in inside if self.maximal[label].dimension == top
                        and self.maximal[label].contains_in_relative_interior(x)]
            if len(interior) > 1:
                return False
        return True

    # ------------------------------------------------------------------
    # Dual graph
    # ------------------------------------------------------------------

    def dual_graph(self, direction: Sequence[int]) -> nx.DiGraph:
        """
        Maximal cells with an arc C -> C' across each shared facet, pointing
        against ``direction``.

        Raises:
            NotComplete: if a facet bounds more than two maximal cells
            DegenerateConfig: if a shared facet is parallel to the direction
        """
        graph = nx.DiGraph()
        graph.add_nodes_from(self.maximal)
        by_key = {poly.canonical: label for label, poly in self.maximal.items()}
        top = max((poly.dimension for poly in self.maximal.values()), default=-1)
        for facet in self.cells_of_dimension(top - 1):
            owners = [by_key[c] for c in self.face_graph.successors(facet) if c in by_key]
            if len(owners) < 2:
                continue
            if len(owners) > 2:
                raise NotComplete(f"a facet of {self.name} bounds {len(owners)} maximal cells")
            first, second = owners
            normal = self._outer_normal(self.maximal[first], self.cells[facet])
            sign = dot(normal, direction)
            if sign == 0:
                raise DegenerateConfig("direction is parallel to a wall")
            if sign < 0:
                graph.add_edge(first, second)
            else:
                graph.add_edge(second, first)
        return graph

    def _outer_normal(self, cell: HPolyhedron, facet: HPolyhedron) -> Tuple[int, ...]:
        for row in cell.facets:
            if cell.tighten(row).normalized().canonical == facet.canonical:
                return row[0]
        raise DegenerateConfig(f"{facet.tag} is not a facet of {cell.tag}")
