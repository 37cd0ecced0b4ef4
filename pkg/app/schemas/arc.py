"""
Arc, down-set and lambda Pydantic schemas.

Arc JSON: {"i": .., "j": .., "A": [..], "B": [..], "r": ..}; a diagram is an
array of arcs. A down-set file is {"s": [...], "arcs": [...]} (a bare array of
arcs is accepted too). A lambda file is {"s": [...], "lambdas": [{"arc": ..,
"value": "p/q"}, ...]}; arcs it leaves out default to 1.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from app.core.rational import to_fraction
from app.models.arc import SArc, canonical_diagram

from .common import Rational


class ArcSchema(BaseModel):
    """Schema for an s-arc (i, j, A, B, r)."""
    i: int = Field(..., ge=1)
    j: int = Field(..., ge=1)
    A: List[int] = Field(default_factory=list, description="Interior nodes passed on the right")
    B: List[int] = Field(default_factory=list, description="Interior nodes passed on the left")
    r: int = Field(1, ge=1)

    @classmethod
    def from_arc(cls, alpha: SArc) -> "ArcSchema":
        return cls(**alpha.as_dict())

    def to_arc(self) -> SArc:
        return SArc.of(self.i, self.j, self.A, self.B, self.r)


def diagram_schema(arcs) -> List[ArcSchema]:
    return [ArcSchema.from_arc(a) for a in canonical_diagram(arcs)]


class DownSetSchema(BaseModel):
    """Schema for a down-set file."""
    s: Optional[List[int]] = None
    arcs: List[ArcSchema] = Field(default_factory=list)

    @classmethod
    def from_downset(cls, s, downset) -> "DownSetSchema":
        return cls(s=list(s.values), arcs=diagram_schema(downset))

    def to_arcs(self) -> List[SArc]:
        return [a.to_arc() for a in self.arcs]


class LambdaEntrySchema(BaseModel):
    arc: ArcSchema
    value: Rational


class LambdaSchema(BaseModel):
    """Schema for a lambda file: positive coefficients per arc."""
    s: Optional[List[int]] = None
    lambdas: List[LambdaEntrySchema] = Field(default_factory=list)

    @classmethod
    def from_mapping(cls, s, lambdas: Dict[SArc, object]) -> "LambdaSchema":
        entries = [
            LambdaEntrySchema(arc=ArcSchema.from_arc(a), value=lambdas[a])
            for a in canonical_diagram(lambdas)
        ]
        return cls(s=list(s.values), lambdas=entries)

    def to_mapping(self) -> Dict[SArc, object]:
        return {e.arc.to_arc(): to_fraction(e.value) for e in self.lambdas}
