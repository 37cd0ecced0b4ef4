"""s-arcs (i, j, A, B, r)."""

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Tuple

from app.core.exceptions import InputError
from app.models.bush import SComposition


@dataclass(frozen=True)
class SArc:
    i: int
    j: int
    A: FrozenSet[int]
    B: FrozenSet[int]
    r: int

    def __post_init__(self):
        object.__setattr__(self, "A", frozenset(self.A))
        object.__setattr__(self, "B", frozenset(self.B))

    @classmethod
    def of(cls, i: int, j: int, A: Iterable[int] = (), B: Iterable[int] = (), r: int = 1) -> "SArc":
        return cls(i, j, frozenset(A), frozenset(B), r)

    def validate(self, s: SComposition) -> "SArc":
        if not 1 <= self.i < self.j <= s.n:
            raise InputError(f"arc endpoints ({self.i},{self.j}) outside 1..{s.n}")
        if s[self.i] == 0:
            raise InputError(f"arc starts at {self.i} with s_{self.i} = 0")
        if not 1 <= self.r <= s[self.i]:
            raise InputError(f"arc label r={self.r} outside 1..{s[self.i]}")
        if self.A & self.B:
            raise InputError(f"A and B overlap in {sorted(self.A & self.B)}")
        if self.A | self.B != frozenset(s.nonzero_between(self.i, self.j)):
            raise InputError("A and B must partition the nonzero nodes strictly between i and j")
        return self

    @property
    def a_mask(self) -> int:
        return sum(1 << k for k in self.A)

    @property
    def sort_key(self) -> Tuple[int, int, int, int]:
        return (self.i, self.j, self.r, self.a_mask)

    @property
    def is_right(self) -> bool:
        """Passes right of every interior point."""
        return not self.B

    @property
    def is_left(self) -> bool:
        return not self.A

    def __lt__(self, other: "SArc") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        a = ",".join(map(str, sorted(self.A)))
        b = ",".join(map(str, sorted(self.B)))
        return f"({self.i},{self.j},{{{a}}},{{{b}}},{self.r})"

    def as_dict(self) -> dict:
        return {"i": self.i, "j": self.j, "A": sorted(self.A), "B": sorted(self.B), "r": self.r}


Diagram = Tuple[SArc, ...]


def canonical_diagram(arcs: Iterable[SArc]) -> Diagram:
    return tuple(sorted(set(arcs), key=lambda a: a.sort_key))
