"""
Shared field types for the JSON artifacts.

Every rational is carried as a ``p/q`` string (``p`` when integral); input may
also be an integer or a decimal string, which is normalized on validation.
"""

from typing import Annotated, List

from pydantic import BeforeValidator

from app.core.rational import format_fraction, to_fraction


def _normalize_rational(value) -> str:
    return format_fraction(to_fraction(value))


Rational = Annotated[str, BeforeValidator(_normalize_rational)]
RationalVector = List[Rational]
