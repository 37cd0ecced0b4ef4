"""
Lattice, congruence and quotient Pydantic schemas.

Elements are named by their canonical attachment string (e.g. ``L1.G1``).
"""

from typing import List, Tuple

from pydantic import BaseModel, Field

from .arc import ArcSchema, diagram_schema


class LatticeSchema(BaseModel):
    """Schema for a finite lattice given by its cover relations."""
    name: str = ""
    s: List[int]
    size: int
    elements: List[str] = Field(..., description="Canonical attachment strings, in lattice order")
    covers: List[Tuple[str, str]] = Field(default_factory=list, description="Pairs (lower, upper)")

    @classmethod
    def from_lattice(cls, s, lattice) -> "LatticeSchema":
        names = [_name(label) for label in lattice.labels]
        covers = sorted((names[a], names[b]) for a, b in lattice.covers)
        return cls(name=lattice.name, s=list(s.values), size=lattice.size, elements=names, covers=covers)


class CongruenceSchema(BaseModel):
    """Schema for a congruence: its down set of uncontracted arcs and its classes."""
    s: List[int]
    downset: List[ArcSchema]
    size: int
    classes: List[List[str]]

    @classmethod
    def from_congruence(cls, congruence) -> "CongruenceSchema":
        classes = [[b.code for b in members] for members in congruence.classes]
        return cls(
            s=list(congruence.s.values),
            downset=diagram_schema(congruence.downset),
            size=congruence.size,
            classes=classes,
        )


class QuotientSchema(BaseModel):
    congruence: CongruenceSchema
    lattice: LatticeSchema


class CongruenceListSchema(BaseModel):
    s: List[int]
    count: int
    downsets: List[List[ArcSchema]] = Field(default_factory=list)


def _name(label) -> str:
    return getattr(label, "code", str(label))
