"""
Tropical polynomial Pydantic schemas.

Polynomial JSON: {"terms": [{"c": "p/q", "a": [..]}, ...]}.
"""

from typing import List

from pydantic import BaseModel, Field

from app.models.tropical import TropicalPolynomial

from .common import Rational, RationalVector


class TermSchema(BaseModel):
    c: Rational
    a: RationalVector


class PolynomialSchema(BaseModel):
    """Schema for a max-plus polynomial."""
    terms: List[TermSchema] = Field(..., min_length=1)

    @classmethod
    def from_polynomial(cls, poly: TropicalPolynomial) -> "PolynomialSchema":
        return cls.model_validate(poly.as_dict())

    def to_polynomial(self) -> TropicalPolynomial:
        return TropicalPolynomial.from_dict(self.model_dump())
