"""
Bush and insertion Pydantic schemas.

Bush JSON: {"s": [...], "att": [{"leaf": k} | {"gap": k}, ...]}.
"""

from typing import List, Union

from pydantic import BaseModel, Field

from app.core.rational import to_fraction
from app.models.bush import Attachment, Bush, SComposition

from .common import Rational


class LeafAttachmentSchema(BaseModel):
    """Node attached to the k-th leaf of the bush built so far."""
    leaf: int = Field(..., ge=1)

    class Config:
        extra = "forbid"


class GapAttachmentSchema(BaseModel):
    """Node attached to the k-th gap between consecutive leaves."""
    gap: int = Field(..., ge=1)

    class Config:
        extra = "forbid"


AttachmentSchema = Union[LeafAttachmentSchema, GapAttachmentSchema]


class BushSchema(BaseModel):
    """Schema for an s-bush given by its attachment sequence."""
    s: List[int] = Field(..., min_length=1, description="The weak composition")
    att: List[AttachmentSchema] = Field(..., description="One attachment per node, nodes 1..n in order")

    @classmethod
    def from_bush(cls, b: Bush) -> "BushSchema":
        att = [
            LeafAttachmentSchema(leaf=a.index) if a.is_leaf else GapAttachmentSchema(gap=a.index)
            for a in b.attachments
        ]
        return cls(s=list(b.s.values), att=att)

    def to_bush(self) -> Bush:
        """
        Raises:
            InputError: if s is not a weak composition or an index is out of range
        """
        attachments = [
            Attachment.leaf(a.leaf) if isinstance(a, LeafAttachmentSchema) else Attachment.gap(a.gap)
            for a in self.att
        ]
        return Bush(SComposition(tuple(self.s)), tuple(attachments))


class BoundSchema(BaseModel):
    """A bound on x_i - x_j."""
    i: int
    j: int
    value: int


class FiberSchema(BaseModel):
    """H-description of an open insertion fiber."""
    n: int
    equalities: List[BoundSchema] = Field(default_factory=list, description="Holes: x_i - x_j = value")
    upper: List[BoundSchema] = Field(default_factory=list, description="Ascents: x_i - x_j < value")
    lower: List[BoundSchema] = Field(default_factory=list, description="Descents: x_i - x_j > value")

    @classmethod
    def from_description(cls, fiber) -> "FiberSchema":
        def bounds(rows):
            return [BoundSchema(i=i, j=j, value=v) for i, j, v in rows]
        return cls(n=fiber.n, equalities=bounds(fiber.equalities), upper=bounds(fiber.upper), lower=bounds(fiber.lower))


class InsertResultSchema(BaseModel):
    """Schema for the result of inserting a point."""
    x: List[Rational]
    bush: BushSchema
    code: str = Field(..., description="Canonical attachment string, e.g. L1.G1")
    fiber: FiberSchema

    def point(self):
        return tuple(to_fraction(v) for v in self.x)
