"""
Arc Service

s-arcs and the bijections with join and meet irreducible trees, non-crossing
arc diagrams, canonical join/meet representations and semi-crossing
bidiagrams for intervals.
"""

import itertools
import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from app.core.exceptions import CrossingDiagram, NotAnAscentOrDescent, NotComparable
from app.models.arc import Diagram, SArc, canonical_diagram
from app.models.bush import Bush, SComposition
from app.services.lattice_service import Positions, lattice_service, position_pairs
from app.services.sbase_service import TREES, sbase_service

logger = logging.getLogger(__name__)


def _between(values: Iterable[int], lo: int, hi: int) -> FrozenSet[int]:
    return frozenset(k for k in values if lo < k < hi)


class ArcService:
    """Service for s-arcs and arc diagrams."""

    def all_arcs(self, s: SComposition) -> List[SArc]:
        out = []
        for i in range(1, s.n + 1):
            if s[i] == 0:
                continue
            for j in range(i + 1, s.n + 1):
                interior = s.nonzero_between(i, j)
                for bits in itertools.product((True, False), repeat=len(interior)):
                    A = frozenset(k for k, in_a in zip(interior, bits) if in_a)
                    B = frozenset(interior) - A
                    for r in range(1, s[i] + 1):
                        out.append(SArc(i, j, A, B, r))
        return sorted(out, key=lambda a: a.sort_key)

    def count_arcs(self, s: SComposition) -> int:
        return sum(
            s[i] * 2 ** len(s.nonzero_between(i, j))
            for i in range(1, s.n + 1)
            for j in range(i + 1, s.n + 1)
        )

    # ------------------------------------------------------------------
    # Irreducible trees
    # ------------------------------------------------------------------

    def _empty_slots(self, s: SComposition) -> List[List[Optional[int]]]:
        return [[None]] + [[None] * (s[k] + 1) for k in range(1, s.n + 1)]

    def _comb(self, children, nodes: Sequence[int], right: bool) -> None:
        for a, b in zip(nodes, nodes[1:]):
            children[a][-1 if right else 0] = b

    def t_join(self, s: SComposition, alpha: SArc) -> Bush:
        """Right comb on A u {j} hung on the (r+1)-st rightmost leaf of i in the right comb of the rest."""
        alpha.validate(s)
        upper = sorted(alpha.A | {alpha.j})
        base = [k for k in range(1, s.n + 1) if k not in upper]
        children = self._empty_slots(s)
        children[0][0] = base[0]
        self._comb(children, base, right=True)
        self._comb(children, upper, right=True)
        children[alpha.i][s[alpha.i] - alpha.r] = upper[0]
        return sbase_service.bush_from_children(s, children)

    def t_meet(self, s: SComposition, alpha: SArc) -> Bush:
        """Left comb on B u {j} hung on the r-th rightmost leaf of i in the left comb of the rest."""
        alpha.validate(s)
        upper = sorted(alpha.B | {alpha.j})
        base = [k for k in range(1, s.n + 1) if k not in upper]
        children = self._empty_slots(s)
        children[0][0] = base[0]
        self._comb(children, base, right=False)
        self._comb(children, upper, right=False)
        children[alpha.i][s[alpha.i] + 1 - alpha.r] = upper[0]
        return sbase_service.bush_from_children(s, children)

    def positions_from_arc(self, s: SComposition, alpha: SArc, join: bool = True) -> Positions:
        """Positions of t_join(alpha) (or t_meet(alpha)) read off the arc."""
        out = {}
        for k, l in position_pairs(s.n):
            if join:
                if k == alpha.i and (l in alpha.A or l == alpha.j):
                    out[(k, l)] = alpha.r
                elif k in alpha.B and (l in alpha.A or l == alpha.j):
                    out[(k, l)] = s[k]
                else:
                    out[(k, l)] = 0
            else:
                if k == alpha.i and (l in alpha.B or l == alpha.j):
                    out[(k, l)] = alpha.r - 1
                elif k in alpha.A and (l in alpha.B or l == alpha.j):
                    out[(k, l)] = 0
                else:
                    out[(k, l)] = s[k]
        return out

    def _sides(self, t: Bush, i: int, j: int) -> Tuple[Set[int], Set[int], Set[int]]:
        """(on path, strictly left, strictly right) among nonzero nodes of ]i,j[."""
        path = t.paths(i, j)[0]
        on_path = {node for node, _ in path[1:]}
        on, left, right = set(), set(), set()
        for k in t.s.nonzero_between(i, j):
            if k in on_path:
                on.add(k)
            elif t.right_of_path(k, path):
                right.add(k)
            else:
                left.add(k)
        return on, left, right

    def alpha_join(self, t: Bush, i: int, j: int) -> SArc:
        """
        Arc of a descent: A weakly left of the path i -> j, B strictly right.

        Raises:
            NotAnAscentOrDescent: if (i, j) is not a descent of t
        """
        if (i, j) not in sbase_service.descents(t):
            raise NotAnAscentOrDescent(f"({i},{j}) is not a descent of {t.code}")
        on, left, right = self._sides(t, i, j)
        return SArc(i, j, frozenset(on | left), frozenset(right), lattice_service.pos(t, i, j))

    def alpha_meet(self, t: Bush, i: int, j: int) -> SArc:
        """Arc of an ascent: A strictly left of the path i -> j, B weakly right."""
        if (i, j) not in sbase_service.ascents(t):
            raise NotAnAscentOrDescent(f"({i},{j}) is not an ascent of {t.code}")
        on, left, right = self._sides(t, i, j)
        return SArc(i, j, frozenset(left), frozenset(on | right), lattice_service.pos(t, i, j) + 1)

    def delta_join(self, t: Bush) -> Diagram:
        return canonical_diagram(self.alpha_join(t, i, j) for i, j in sbase_service.descents(t))

    def delta_meet(self, t: Bush) -> Diagram:
        return canonical_diagram(self.alpha_meet(t, i, j) for i, j in sbase_service.ascents(t))

    def join_irreducibles(self, s: SComposition) -> Dict[SArc, Bush]:
        return {alpha: self.t_join(s, alpha) for alpha in self.all_arcs(s)}

    def meet_irreducibles(self, s: SComposition) -> Dict[SArc, Bush]:
        return {alpha: self.t_meet(s, alpha) for alpha in self.all_arcs(s)}

    # ------------------------------------------------------------------
    # Crossing relations
    # ------------------------------------------------------------------

    def noncrossing(self, s: SComposition, alpha: SArc, beta: SArc) -> bool:
        if alpha == beta:
            return False
        if alpha.j > beta.j:
            alpha, beta = beta, alpha
        i, j, A, B, r = alpha.i, alpha.j, alpha.A, alpha.B, alpha.r
        i2, j2, A2, B2, r2 = beta.i, beta.j, beta.A, beta.B, beta.r
        if j == j2:
            return False
        mine = _between(A, i2, j2)
        theirs = _between(A2, i, j)
        if j <= i2:
            return True
        if i < i2 < j:
            if i2 in A and j not in A2 and theirs <= mine:
                return True
            if i2 in B and j not in B2 and theirs >= mine:
                return True
            return False
        if i == i2:
            if r < r2:
                return j not in A2 and theirs <= mine
            if r == r2:
                return s[j] == 0 and theirs == mine
            return j not in B2 and theirs >= mine
        # i2 < i
        if i in A2 and j not in B2 and theirs >= mine:
            return True
        if i in B2 and j not in A2 and theirs <= mine:
            return True
        return False

    def is_noncrossing_diagram(self, s: SComposition, arcs: Sequence[SArc]) -> bool:
        return all(self.noncrossing(s, a, b) for a, b in itertools.combinations(arcs, 2))

    def semicrossing(self, alpha_join: SArc, alpha_meet: SArc) -> bool:
        """
        No k < l with k in (A_meet + i_meet) & (B_join + i_join) and
        l in (A_join + j_join) & (B_meet + j_meet), except k = i_meet = i_join
        with r_join < r_meet.
        """
        lows = (alpha_meet.A | {alpha_meet.i}) & (alpha_join.B | {alpha_join.i})
        highs = (alpha_join.A | {alpha_join.j}) & (alpha_meet.B | {alpha_meet.j})
        for k in lows:
            if k == alpha_meet.i == alpha_join.i and alpha_join.r < alpha_meet.r:
                continue
            if any(k < l for l in highs):
                return False
        return True

    def join_leq_join(self, alpha: SArc, beta: SArc) -> bool:
        return (
            alpha.A | {alpha.j} <= beta.A | {beta.j}
            and alpha.B | {alpha.i} <= beta.B | {beta.i}
            and (alpha.i != beta.i or alpha.r <= beta.r)
        )

    def meet_leq_meet(self, alpha: SArc, beta: SArc) -> bool:
        return (
            alpha.A | {alpha.i} >= beta.A | {beta.i}
            and alpha.B | {alpha.j} >= beta.B | {beta.j}
            and (alpha.i != beta.i or alpha.r <= beta.r)
        )

    def join_leq_meet(self, alpha: SArc, beta: SArc) -> bool:
        return self.semicrossing(alpha, beta)

    # ------------------------------------------------------------------
    # Diagrams and trees
    # ------------------------------------------------------------------

    def tree_from_diagram(self, s: SComposition, diagram: Iterable[SArc]) -> Bush:
        """
        Inverse of delta_join.

        Raises:
            CrossingDiagram: if two arcs cross
        """
        arcs = canonical_diagram(diagram)
        for a in arcs:
            a.validate(s)
        if not self.is_noncrossing_diagram(s, arcs):
            raise CrossingDiagram(f"diagram {[str(a) for a in arcs]} has crossing arcs")
        children = self._empty_slots(s)
        children[0][0] = 1
        for k in range(2, s.n + 1):
            ending = [a for a in arcs if a.j == k]
            passing = [a for a in arcs if k in a.A]
            if ending:
                i, r = ending[0].i, ending[0].r
            elif passing:
                i = max(a.i for a in passing)
                r = max(a.r for a in passing if a.i == i)
            else:
                i, r = 1, 0
            self._hang(children, k, i, s[i] - r, rightmost=True)
        return sbase_service.bush_from_children(s, children)

    def tree_from_meet_diagram(self, s: SComposition, diagram: Iterable[SArc]) -> Bush:
        """Inverse of delta_meet (mirror image of tree_from_diagram)."""
        arcs = canonical_diagram(diagram)
        for a in arcs:
            a.validate(s)
        if not self.is_noncrossing_diagram(s, arcs):
            raise CrossingDiagram(f"diagram {[str(a) for a in arcs]} has crossing arcs")
        children = self._empty_slots(s)
        children[0][0] = 1
        for k in range(2, s.n + 1):
            ending = [a for a in arcs if a.j == k]
            passing = [a for a in arcs if k in a.B]
            if ending:
                i, slot = ending[0].i, s[ending[0].i] + 1 - ending[0].r
            elif passing:
                i = max(a.i for a in passing)
                slot = s[i] + 1 - min(a.r for a in passing if a.i == i)
            else:
                i, slot = 1, 0
            self._hang(children, k, i, slot, rightmost=False)
        return sbase_service.bush_from_children(s, children)

    def _hang(self, children, k: int, node: int, slot: int, rightmost: bool) -> None:
        while children[node][slot] is not None:
            node = children[node][slot]
            slot = len(children[node]) - 1 if rightmost else 0
        children[node][slot] = k

    def canonical_join_rep(self, t: Bush) -> List[Bush]:
        return [self.t_join(t.s, alpha) for alpha in self.delta_join(t)]

    def canonical_meet_rep(self, t: Bush) -> List[Bush]:
        return [self.t_meet(t.s, alpha) for alpha in self.delta_meet(t)]

    def interval_bidiagram(self, t: Bush, u: Bush) -> Tuple[Diagram, Diagram]:
        """
        Raises:
            NotComparable: unless t <= u
        """
        if not lattice_service.sweak_leq(t, u):
            raise NotComparable(f"{t.code} is not below {u.code}")
        return self.delta_join(t), self.delta_meet(u)

    def is_semicrossing_bidiagram(self, s: SComposition, joins: Sequence[SArc], meets: Sequence[SArc]) -> bool:
        return (
            self.is_noncrossing_diagram(s, joins)
            and self.is_noncrossing_diagram(s, meets)
            and all(self.semicrossing(a, b) for a in joins for b in meets)
        )

    # ------------------------------------------------------------------
    # Complexes
    # ------------------------------------------------------------------

    def noncrossing_graph(self, s: SComposition, arcs: Optional[Sequence[SArc]] = None) -> nx.Graph:
        arcs = self.all_arcs(s) if arcs is None else list(arcs)
        graph = nx.Graph()
        graph.add_nodes_from(arcs)
        for a, b in itertools.combinations(arcs, 2):
            if self.noncrossing(s, a, b):
                graph.add_edge(a, b)
        return graph

    def noncrossing_diagrams(self, s: SComposition, arcs: Optional[Sequence[SArc]] = None) -> List[Diagram]:
        """All non-crossing diagrams (the empty one included)."""
        graph = self.noncrossing_graph(s, arcs)
        out = [()]
        out += [canonical_diagram(c) for c in nx.enumerate_all_cliques(graph)]
        return out

    def f_vector(self, s: SComposition, arcs: Optional[Sequence[SArc]] = None) -> Tuple[int, ...]:
        """Face numbers (empty face first) of the non-crossing complex on the given arcs."""
        counts: Dict[int, int] = {}
        for d in self.noncrossing_diagrams(s, arcs):
            counts[len(d)] = counts.get(len(d), 0) + 1
        return tuple(counts.get(k, 0) for k in range(max(counts) + 1))

    def count_semicrossing_bidiagrams(self, s: SComposition) -> int:
        diagrams = self.noncrossing_diagrams(s)
        return sum(
            1
            for joins in diagrams
            for meets in diagrams
            if all(self.semicrossing(a, b) for a in joins for b in meets)
        )

    def trees_by_diagram(self, s: SComposition) -> Dict[Diagram, Bush]:
        return {self.delta_join(t): t for t in sbase_service.enumerate(s, TREES)}


# Global service instance
arc_service = ArcService()
