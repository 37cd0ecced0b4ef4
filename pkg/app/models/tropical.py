"""
Max-plus tropical polynomials.

F(x) = max_k (c_k + <a_k, x>). Terms with equal exponents are merged by
keeping the larger coefficient, and terms are kept sorted by exponent so two
polynomials with the same function-defining data compare equal.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from app.core.exceptions import DimensionMismatch, InputError
from app.core.rational import Vector, dot, format_fraction, to_fraction
from app.models.polyhedron import HPolyhedron


@dataclass(frozen=True)
class TropicalTerm:
    coefficient: Fraction
    exponent: Vector

    def value(self, x: Sequence) -> Fraction:
        return self.coefficient + dot(self.exponent, x)


@dataclass(frozen=True)
class TropicalPolynomial:
    dim: int
    terms: Tuple[TropicalTerm, ...]

    @classmethod
    def from_terms(cls, dim: int, terms: Iterable[Tuple[object, Sequence]]) -> "TropicalPolynomial":
        """
        Raises:
            InputError: if there are no terms
            DimensionMismatch: if an exponent has the wrong length
        """
        best: Dict[Vector, Fraction] = {}
        for c, a in terms:
            a = tuple(to_fraction(v) for v in a)
            if len(a) != dim:
                raise DimensionMismatch(f"exponent of length {len(a)} for a polynomial on R^{dim}")
            c = to_fraction(c)
            if a not in best or c > best[a]:
                best[a] = c
        if not best:
            raise InputError("a tropical polynomial needs at least one term")
        return cls(dim, tuple(TropicalTerm(best[a], a) for a in sorted(best)))

    def __len__(self) -> int:
        return len(self.terms)

    def values(self, x: Sequence) -> List[Fraction]:
        if len(x) != self.dim:
            raise DimensionMismatch(f"point of length {len(x)} for a polynomial on R^{self.dim}")
        return [t.value(x) for t in self.terms]

    def evaluate(self, x: Sequence) -> Fraction:
        return max(self.values(x))

    def argmax(self, x: Sequence) -> FrozenSet[int]:
        """Indices of all terms attaining the maximum at x."""
        values = self.values(x)
        top = max(values)
        return frozenset(k for k, v in enumerate(values) if v == top)

    def on_hypersurface(self, x: Sequence) -> bool:
        return len(self.argmax(x)) >= 2

    def region(self, k: int) -> HPolyhedron:
        """Closed region where term k attains the maximum."""
        mine = self.terms[k]
        rows = [
            (tuple(a - b for a, b in zip(other.exponent, mine.exponent)), mine.coefficient - other.coefficient)
            for u, other in enumerate(self.terms)
            if u != k
        ]
        return HPolyhedron.build(self.dim, rows, tag=f"region[{k}]")

    def index_of(self, exponent: Sequence) -> int:
        exponent = tuple(to_fraction(v) for v in exponent)
        for k, t in enumerate(self.terms):
            if t.exponent == exponent:
                return k
        raise InputError(f"no term with exponent {tuple(map(str, exponent))}")

    def tropical_sum(self, other: "TropicalPolynomial") -> "TropicalPolynomial":
        self._same_dim(other)
        terms = [(t.coefficient, t.exponent) for t in self.terms + other.terms]
        return TropicalPolynomial.from_terms(self.dim, terms)

    def tropical_product(self, other: "TropicalPolynomial") -> "TropicalPolynomial":
        self._same_dim(other)
        terms = [
            (t.coefficient + u.coefficient, tuple(a + b for a, b in zip(t.exponent, u.exponent)))
            for t in self.terms
            for u in other.terms
        ]
        return TropicalPolynomial.from_terms(self.dim, terms)

    def scaled(self, factor) -> "TropicalPolynomial":
        factor = to_fraction(factor)
        if factor <= 0:
            raise InputError(f"scaling factor must be positive, got {factor}")
        terms = [(factor * t.coefficient, tuple(factor * a for a in t.exponent)) for t in self.terms]
        return TropicalPolynomial.from_terms(self.dim, terms)

    def _same_dim(self, other: "TropicalPolynomial") -> None:
        if other.dim != self.dim:
            raise DimensionMismatch(f"polynomials on R^{self.dim} and R^{other.dim}")

    def as_dict(self) -> dict:
        return {
            "terms": [
                {"c": format_fraction(t.coefficient), "a": [format_fraction(a) for a in t.exponent]}
                for t in self.terms
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TropicalPolynomial":
        terms = data.get("terms") or []
        if not terms:
            raise InputError("a tropical polynomial needs at least one term")
        dim = len(terms[0]["a"])
        return cls.from_terms(dim, [(t["c"], t["a"]) for t in terms])

    def __str__(self) -> str:
        parts = []
        for t in self.terms:
            monomial = " + ".join(
                f"{format_fraction(a)}*x{k + 1}" for k, a in enumerate(t.exponent) if a != 0
            )
            parts.append(" + ".join(p for p in (format_fraction(t.coefficient), monomial) if p and p != "0") or "0")
        return "max(" + ", ".join(parts) + ")"
