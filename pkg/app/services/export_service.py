"""
Export Service

Renders artifacts at the serialization boundary: JSON through the pydantic
schemas and orjson, Hasse diagrams and dual graphs as DOT, and geometry as
OFF. Everything upstream stays exact; decimals appear only in OFF output.
"""

import logging
from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import graphviz
import networkx as nx
import numpy as np
import orjson
from pydantic import BaseModel

from app.core.config import settings
from app.core.exceptions import InputError
from app.core.rational import Vector
from app.models.complex import PolyhedralComplex
from app.models.polyhedron import HPolyhedron
from app.services.shardoplex_service import TrunkComplex

logger = logging.getLogger(__name__)

JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2


class ExportService:
    """Service for JSON, DOT and OFF rendering."""

    # ------------------------------------------------------------------
    # JSON
    # ------------------------------------------------------------------

    def to_json(self, payload) -> bytes:
        """Deterministic JSON bytes (sorted keys, trailing newline)."""
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode="json")
        elif isinstance(payload, list):
            payload = [p.model_dump(mode="json") if isinstance(p, BaseModel) else p for p in payload]
        return orjson.dumps(payload, option=JSON_OPTIONS) + b"\n"

    def from_json(self, data: bytes, schema: type):
        """
        Raises:
            InputError: if the bytes are not JSON
            pydantic.ValidationError: if the JSON does not match the schema
        """
        try:
            raw = orjson.loads(data)
        except orjson.JSONDecodeError as e:
            raise InputError(f"not valid JSON: {e}") from e
        return schema.model_validate(raw)

    # ------------------------------------------------------------------
    # DOT
    # ------------------------------------------------------------------

    def digraph_dot(self, graph: nx.DiGraph, name: str, node_name: Callable[[Hashable], str] = str) -> str:
        """DOT source for a digraph, nodes named by ``node_name`` and sorted for stable output."""
        dot = graphviz.Digraph(name=name or "G")
        dot.attr(rankdir="BT")
        names = {node: node_name(node) for node in graph.nodes}
        for node in sorted(graph.nodes, key=lambda v: names[v]):
            dot.node(names[node])
        for u, v in sorted(graph.edges, key=lambda e: (names[e[0]], names[e[1]])):
            dot.edge(names[u], names[v])
        return dot.source

    def hasse_dot(self, lattice, name: str = "") -> str:
        """Hasse diagram with elements named by their canonical attachment strings."""
        labels = lattice.labels
        return self.digraph_dot(
            lattice.hasse_digraph(),
            name or lattice.name,
            node_name=lambda k: getattr(labels[k], "code", str(labels[k])),
        )

    # ------------------------------------------------------------------
    # OFF
    # ------------------------------------------------------------------

    def sum_zero_basis(self, n: int) -> np.ndarray:
        """Orthonormal basis (as columns) of the hyperplane x_1 + ... + x_n = 0."""
        if n < 2:
            raise InputError("the sum-zero hyperplane needs n >= 2")
        spanning = np.zeros((n, n - 1))
        for k in range(n - 1):
            spanning[k, k] = 1.0
            spanning[n - 1, k] = -1.0
        q, _ = np.linalg.qr(spanning)
        return q

    def _check_dimension(self, n: int) -> None:
        if n > settings.off_max_dim:
            raise InputError(f"OFF export is only offered for n <= {settings.off_max_dim}, got n = {n}")

    def off_from_polygons(self, n: int, polygons: Sequence[Sequence[Vector]]) -> str:
        """
        OFF text for exact polygons in the sum-zero hyperplane of R^n.

        Vertices are shared exactly between polygons, projected to R^{n-1} and
        printed with ``settings.off_digits`` digits; each polygon is ordered
        around its centroid.
        """
        self._check_dimension(n)
        basis = self.sum_zero_basis(n)
        index: Dict[Vector, int] = {}
        for polygon in polygons:
            for v in polygon:
                index.setdefault(v, len(index))
        order = sorted(index, key=lambda v: index[v])
        coords = np.array([[float(c) for c in v] for v in order]).reshape(len(order), n) @ basis

        faces = []
        for polygon in polygons:
            ids = sorted({index[v] for v in polygon})
            faces.append(self._cyclic(coords, ids))

        digits = settings.off_digits
        lines = ["OFF", f"{len(order)} {len(faces)} 0"]
        for row in coords:
            padded = list(row) + [0.0] * (3 - len(row))
            lines.append(" ".join(f"{c:.{digits}f}" for c in padded))
        for ids in faces:
            lines.append(" ".join([str(len(ids))] + [str(k) for k in ids]))
        return "\n".join(lines) + "\n"

    def _cyclic(self, coords: np.ndarray, ids: List[int]) -> List[int]:
        if len(ids) <= 2:
            return ids
        points = coords[ids]
        centred = points - points.mean(axis=0)
        _, _, vt = np.linalg.svd(centred)
        plane = centred @ vt[:2].T
        angles = np.arctan2(plane[:, 1], plane[:, 0])
        return [ids[k] for k in np.argsort(angles, kind="stable")]

    def _polygons(self, faces: Sequence, dimension_of, vertices_of) -> List[List[Vector]]:
        top = max((dimension_of(f) for f in faces), default=0)
        wanted = min(2, top)
        return [vertices_of(f) for f in faces if dimension_of(f) == wanted]

    def complex_off(self, complex_: PolyhedralComplex, radius: Optional[int] = None) -> str:
        """
        OFF for a foam: every maximal cell is cut with the sum-zero hyperplane
        and the region |x_i - x_j| <= radius, and its 2-faces (or the cells
        themselves when they are polygons or segments) are written out.
        """
        n = complex_.dim
        self._check_dimension(n)
        radius = radius or 2 * n + 2
        cut_rows = []
        for i in range(n):
            for j in range(n):
                if i != j:
                    cut_rows.append((tuple(1 if k == i else -1 if k == j else 0 for k in range(n)), radius))
        cut = HPolyhedron.build(n, cut_rows, [((1,) * n, 0)], tag="cut")

        faces: Dict[Tuple, HPolyhedron] = {}
        for label, cell in complex_.maximal.items():
            for face in cell.intersect(cut, tag=str(label)).faces():
                faces.setdefault(face.canonical, face)
        points = {key: face.relative_interior_point for key, face in faces.items() if face.dimension == 0}

        def vertices_of(face: HPolyhedron) -> List[Vector]:
            return [tuple(Fraction(c) for c in p) for p in points.values() if face.contains(p)]

        polygons = self._polygons(list(faces.values()), lambda f: f.dimension, vertices_of)
        logger.info(f"OFF export of {complex_.name}: {len(polygons)} polygons")
        return self.off_from_polygons(n, polygons)

    def trunk_complex_off(self, complex_: TrunkComplex) -> str:
        """OFF for a shardoplex or quotientoplex."""
        n = complex_.s.n
        self._check_dimension(n)
        faces = list(complex_.faces.values())
        polygons = self._polygons(faces, lambda f: f.dimension, lambda f: list(f.vertices))
        logger.info(f"OFF export of {complex_.name}: {len(polygons)} polygons")
        return self.off_from_polygons(n, polygons)


# Global service instance
export_service = ExportService()
