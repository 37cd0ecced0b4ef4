"""
Polyhedral complex and quotientoplex Pydantic schemas.
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

from app.core.rational import to_fraction
from app.models.polyhedron import HPolyhedron
from app.models.vpolytope import VPolytope

from .arc import ArcSchema, LambdaEntrySchema
from .common import RationalVector


class RowSchema(BaseModel):
    """a.x <= b (or = b) with integer coefficients."""
    a: List[int]
    b: int


class CellSchema(BaseModel):
    """Schema for a cell of a polyhedral complex in H-description."""
    label: str
    dimension: int
    inequalities: List[RowSchema] = Field(default_factory=list)
    equalities: List[RowSchema] = Field(default_factory=list)

    @classmethod
    def from_polyhedron(cls, label: str, poly: HPolyhedron) -> "CellSchema":
        return cls(
            label=label,
            dimension=poly.dimension,
            inequalities=[RowSchema(a=list(a), b=b) for a, b in poly.inequalities],
            equalities=[RowSchema(a=list(a), b=b) for a, b in poly.equalities],
        )

    def to_polyhedron(self, dim: int) -> HPolyhedron:
        return HPolyhedron.build(
            dim,
            [(r.a, r.b) for r in self.inequalities],
            [(r.a, r.b) for r in self.equalities],
            tag=self.label,
        )


class ComplexSchema(BaseModel):
    """Schema for a foam or quotient foam: maximal cells, f-vector and dual graph."""
    name: str
    dim: int
    f_vector: List[int]
    cells: List[CellSchema]
    dual_edges: List[Tuple[str, str]] = Field(default_factory=list, description="omega-oriented (lower, upper)")


class PolytopeSchema(BaseModel):
    """Schema for a polytope in V-description."""
    label: str
    dimension: int
    vertices: List[RationalVector]

    @classmethod
    def from_polytope(cls, label: str, poly: VPolytope) -> "PolytopeSchema":
        return cls(label=label, dimension=poly.dimension, vertices=[list(v) for v in poly.vertices])

    def to_polytope(self, dim: int) -> VPolytope:
        points = [tuple(to_fraction(c) for c in v) for v in self.vertices]
        return VPolytope.from_points(dim, points, tag=self.label)


class QuotientoplexSchema(BaseModel):
    """Schema for a quotientoplex: one maximal polytope per distinct trunk cell."""
    s: List[int]
    name: str
    arcs: List[ArcSchema]
    lambdas: List[LambdaEntrySchema] = Field(default_factory=list)
    f_vector: List[int]
    cells: List[PolytopeSchema]
    skeleton: List[Tuple[str, str]] = Field(default_factory=list, description="omega-oriented vertex edges")
    support: Optional[PolytopeSchema] = None
