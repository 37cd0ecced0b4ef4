"""
Finite posets and lattices.

Elements are indices 0..N-1 with hashable payloads. The order is held as a
boolean numpy matrix; up-sets and down-sets are Python int bitmasks so that
joins and meets are a single AND plus a dictionary lookup.
"""

import itertools
import logging
from functools import cached_property
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from app.core.exceptions import InvariantViolation

logger = logging.getLogger(__name__)


def _mask(row: np.ndarray) -> int:
    packed = np.packbits(row.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _bits(mask: int) -> List[int]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


class FinitePoset:
    """A finite poset given by its reflexive order matrix."""

    def __init__(self, labels: Sequence[Hashable], leq: np.ndarray, name: str = ""):
        self.labels = list(labels)
        self.name = name
        self.leq_matrix = np.asarray(leq, dtype=bool)
        n = len(self.labels)
        if self.leq_matrix.shape != (n, n):
            raise InvariantViolation(f"order matrix of shape {self.leq_matrix.shape} for {n} elements")
        self._index = {label: k for k, label in enumerate(self.labels)}

    @classmethod
    def from_relation(
        cls, labels: Sequence[Hashable], leq: Callable[[Hashable, Hashable], bool], name: str = ""
    ) -> "FinitePoset":
        n = len(labels)
        matrix = np.zeros((n, n), dtype=bool)
        for a in range(n):
            for b in range(n):
                matrix[a, b] = a == b or leq(labels[a], labels[b])
        return cls(labels, matrix, name)

    @classmethod
    def from_vectors(cls, labels: Sequence[Hashable], vectors: np.ndarray, name: str = "") -> "FinitePoset":
        """Componentwise order on integer vectors (one row per element)."""
        vectors = np.asarray(vectors)
        if vectors.ndim == 1 or vectors.shape[1] == 0:
            matrix = np.ones((len(labels), len(labels)), dtype=bool)
        else:
            matrix = (vectors[:, None, :] <= vectors[None, :, :]).all(axis=2)
        return cls(labels, matrix, name)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: Hashable) -> int:
        return self._index[label]

    def leq(self, a: int, b: int) -> bool:
        return bool(self.leq_matrix[a, b])

    def lt(self, a: int, b: int) -> bool:
        return a != b and bool(self.leq_matrix[a, b])

    @cached_property
    def up_masks(self) -> List[int]:
        return [_mask(self.leq_matrix[a, :]) for a in range(self.size)]

    @cached_property
    def down_masks(self) -> List[int]:
        return [_mask(self.leq_matrix[:, a]) for a in range(self.size)]

    @cached_property
    def is_antisymmetric(self) -> bool:
        both = self.leq_matrix & self.leq_matrix.T
        return bool((both == np.eye(self.size, dtype=bool)).all())

    @cached_property
    def covers(self) -> List[Tuple[int, int]]:
        """Hasse edges (a, b) with a covered by b."""
        strict = self.leq_matrix & ~np.eye(self.size, dtype=bool)
        if self.size == 0:
            return []
        as_float = strict.astype(np.float32)
        two_step = (as_float @ as_float) > 0
        cover = strict & ~two_step
        rows, cols = np.nonzero(cover)
        return sorted(zip(rows.tolist(), cols.tolist()))

    @cached_property
    def _upper_covers(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {a: [] for a in range(self.size)}
        for a, b in self.covers:
            out[a].append(b)
        return out

    @cached_property
    def _lower_covers(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {a: [] for a in range(self.size)}
        for a, b in self.covers:
            out[b].append(a)
        return out

    def upper_covers(self, a: int) -> List[int]:
        return self._upper_covers[a]

    def lower_covers(self, a: int) -> List[int]:
        return self._lower_covers[a]

    def minimal_elements(self, subset: Iterable[int]) -> List[int]:
        subset = list(subset)
        return [a for a in subset if not any(self.lt(b, a) for b in subset)]

    def maximal_elements(self, subset: Iterable[int]) -> List[int]:
        subset = list(subset)
        return [a for a in subset if not any(self.lt(a, b) for b in subset)]

    def interval(self, a: int, b: int) -> List[int]:
        return _bits(self.up_masks[a] & self.down_masks[b])

    def is_interval(self, subset: Iterable[int]) -> Optional[Tuple[int, int]]:
        """(bottom, top) when the subset is exactly an interval of the poset."""
        subset = sorted(set(subset))
        if not subset:
            return None
        lows = self.minimal_elements(subset)
        highs = self.maximal_elements(subset)
        if len(lows) != 1 or len(highs) != 1:
            return None
        if self.interval(lows[0], highs[0]) != subset:
            return None
        return lows[0], highs[0]

    def hasse_digraph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.size))
        graph.add_edges_from(self.covers)
        return graph

    def cover_graph(self) -> nx.Graph:
        return self.hasse_digraph().to_undirected()

    def subposet(self, indices: Sequence[int], labels: Optional[Sequence[Hashable]] = None, name: str = "") -> "FinitePoset":
        indices = list(indices)
        matrix = self.leq_matrix[np.ix_(indices, indices)]
        labels = [self.labels[k] for k in indices] if labels is None else labels
        return FinitePoset(labels, matrix, name or self.name)

    def as_lattice(self, name: str = "") -> "FiniteLattice":
        return FiniteLattice(self.labels, self.leq_matrix, name or self.name)


class FiniteLattice(FinitePoset):
    """A finite poset with lattice operations looked up through bitmasks."""

    @cached_property
    def _by_up(self) -> Dict[int, int]:
        return {m: a for a, m in enumerate(self.up_masks)}

    @cached_property
    def _by_down(self) -> Dict[int, int]:
        return {m: a for a, m in enumerate(self.down_masks)}

    def join(self, a: int, b: int) -> Optional[int]:
        """Least upper bound, or None when it does not exist."""
        common = self.up_masks[a] & self.up_masks[b]
        if common in self._by_up:
            return self._by_up[common]
        lows = self.minimal_elements(_bits(common))
        return lows[0] if len(lows) == 1 else None

    def meet(self, a: int, b: int) -> Optional[int]:
        common = self.down_masks[a] & self.down_masks[b]
        if common in self._by_down:
            return self._by_down[common]
        highs = self.maximal_elements(_bits(common))
        return highs[0] if len(highs) == 1 else None

    def join_all(self, elements: Iterable[int]) -> int:
        acc = self.bottom
        for e in elements:
            acc = self.join(acc, e)
        return acc

    def meet_all(self, elements: Iterable[int]) -> int:
        acc = self.top
        for e in elements:
            acc = self.meet(acc, e)
        return acc

    @cached_property
    def bottom(self) -> int:
        lows = self.minimal_elements(range(self.size))
        if len(lows) != 1:
            raise InvariantViolation(f"{self.name or 'poset'} has {len(lows)} minimal elements")
        return lows[0]

    @cached_property
    def top(self) -> int:
        highs = self.maximal_elements(range(self.size))
        if len(highs) != 1:
            raise InvariantViolation(f"{self.name or 'poset'} has {len(highs)} maximal elements")
        return highs[0]

    def is_lattice(self) -> bool:
        """Every pair has a join and a meet."""
        if self.size == 0 or not self.is_antisymmetric:
            return False
        for a in range(self.size):
            for b in range(a + 1, self.size):
                common_up = self.up_masks[a] & self.up_masks[b]
                common_down = self.down_masks[a] & self.down_masks[b]
                if common_up not in self._by_up or common_down not in self._by_down:
                    return False
        return True

    @cached_property
    def join_irreducibles(self) -> List[int]:
        return [a for a in range(self.size) if len(self.lower_covers(a)) == 1]

    @cached_property
    def meet_irreducibles(self) -> List[int]:
        return [a for a in range(self.size) if len(self.upper_covers(a)) == 1]

    def canonical_join_representation(self, x: int) -> Optional[List[int]]:
        """
        Order-theoretic canonical join representation.

        For each lower cover y of x the set {z <= x : z not <= y} must have a
        unique minimal element; these minima form the representation.
        Returns None when some set has several minima.
        """
        out = []
        below_x = _bits(self.down_masks[x])
        for y in self.lower_covers(x):
            candidates = [z for z in below_x if not self.leq(z, y)]
            lows = self.minimal_elements(candidates)
            if len(lows) != 1:
                return None
            out.append(lows[0])
        return sorted(set(out))

    def canonical_meet_representation(self, x: int) -> Optional[List[int]]:
        out = []
        above_x = _bits(self.up_masks[x])
        for y in self.upper_covers(x):
            candidates = [z for z in above_x if not self.leq(y, z)]
            highs = self.maximal_elements(candidates)
            if len(highs) != 1:
                return None
            out.append(highs[0])
        return sorted(set(out))

    def is_semidistributive(self) -> bool:
        return all(
            self.canonical_join_representation(x) is not None
            and self.canonical_meet_representation(x) is not None
            for x in range(self.size)
        )

    def is_congruence(self, class_of: Sequence[int]) -> bool:
        """
        Whether a partition (class id per element) is a lattice congruence:
        classes are intervals and both projections are order preserving.
        """
        classes: Dict[int, List[int]] = {}
        for a, c in enumerate(class_of):
            classes.setdefault(c, []).append(a)
        bottom_of: Dict[int, int] = {}
        top_of: Dict[int, int] = {}
        for c, members in classes.items():
            bounds = self.is_interval(members)
            if bounds is None:
                return False
            bottom_of[c], top_of[c] = bounds
        for a, b in self.covers:
            ca, cb = class_of[a], class_of[b]
            if not self.leq(bottom_of[ca], bottom_of[cb]) or not self.leq(top_of[ca], top_of[cb]):
                return False
        return True

    def quotient(self, class_of: Sequence[int], name: str = "") -> Tuple["FiniteLattice", List[int]]:
        """Quotient lattice realized on the class minima; returns it with the minima."""
        classes: Dict[int, List[int]] = {}
        for a, c in enumerate(class_of):
            classes.setdefault(c, []).append(a)
        minima = sorted(self.minimal_elements(members)[0] for members in classes.values())
        sub = self.subposet(minima, name=name)
        return FiniteLattice(sub.labels, sub.leq_matrix, sub.name), minima

    def cellular_intervals(self) -> Iterable[List[int]]:
        """Intervals [x, join Y] and [meet X, y] for non-empty sets of covers."""
        seen: Set[Tuple[int, ...]] = set()
        for x in range(self.size):
            ups = self.upper_covers(x)
            for size in range(1, len(ups) + 1):
                for ys in itertools.combinations(ups, size):
                    members = tuple(self.interval(x, self.join_all(ys)))
                    if members not in seen:
                        seen.add(members)
                        yield list(members)
            downs = self.lower_covers(x)
            for size in range(1, len(downs) + 1):
                for xs in itertools.combinations(downs, size):
                    members = tuple(self.interval(self.meet_all(xs), x))
                    if members not in seen:
                        seen.add(members)
                        yield list(members)

    def is_cellularly_regular(self) -> bool:
        graph = self.cover_graph()
        for members in self.cellular_intervals():
            degrees = {d for _, d in graph.subgraph(members).degree()}
            if len(degrees) > 1:
                return False
        return True
