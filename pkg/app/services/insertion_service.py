"""
Insertion Service

The s-insertion algorithm, exact fiber descriptions, and the stitching,
incision and rotation moves on trees and single-hole bushes.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from app.core.config import settings
from app.core.exceptions import (
    InputError,
    InvariantViolation,
    NotAncestor,
    NotAnAscentOrDescent,
    WrongHoleCount,
)
from app.core.rational import difference
from app.models.bush import Attachment, Bush, SComposition, grow
from app.models.polyhedron import HPolyhedron
from app.services.sbase_service import TREES, sbase_service

logger = logging.getLogger(__name__)

Bound = Tuple[int, int, int]

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class FiberDescription:
    """Holes give equalities, ascents upper bounds and descents lower bounds on x_i - x_j."""
    n: int
    equalities: Tuple[Bound, ...]
    upper: Tuple[Bound, ...]
    lower: Tuple[Bound, ...]

    def polyhedron(self, tag: str = "") -> HPolyhedron:
        n = self.n
        eqs = [(difference(n, i - 1, j - 1), mu) for i, j, mu in self.equalities]
        ineqs = [(difference(n, i - 1, j - 1), mu) for i, j, mu in self.upper]
        ineqs += [(difference(n, j - 1, i - 1), -nu) for i, j, nu in self.lower]
        return HPolyhedron.build(n, ineqs, eqs, tag)

    def rows(self) -> List[str]:
        out = [f"x{i} - x{j} = {mu}" for i, j, mu in self.equalities]
        out += [f"x{i} - x{j} <= {mu}" for i, j, mu in self.upper]
        out += [f"x{i} - x{j} >= {nu}" for i, j, nu in self.lower]
        return out


class InsertionService:
    """Service for s-insertion and the local moves between fibers."""

    def omega(self, n: int) -> Tuple[int, ...]:
        return tuple(2 * i - n - 1 for i in range(1, n + 1))

    def insert(self, s: SComposition, x: Sequence) -> Bush:
        """
        Insert a rational point.

        Args:
            s: The composition
            x: Exact rationals x_1..x_n

        Returns:
            The bush whose open fiber contains x
        """
        if len(x) != s.n:
            raise InputError(f"x has length {len(x)}, expected {s.n}")
        values = [(Fraction(v),) for v in x]
        return self._insert_values(s, values)

    def insert_perturbed(self, s: SComposition, x: Sequence, sign: int) -> Bush:
        """insert(s, x + sign * eps * omega) for infinitesimal eps > 0."""
        w = self.omega(s.n)
        return self.insert_along(s, x, [sign * c for c in w])

    def insert_along(self, s: SComposition, x: Sequence, direction: Sequence) -> Bush:
        """insert(s, x + eps * direction) for infinitesimal eps > 0."""
        if len(x) != s.n or len(direction) != s.n:
            raise InputError(f"x and direction must have length {s.n}")
        values = [(Fraction(v), Fraction(d)) for v, d in zip(x, direction)]
        return self._insert_values(s, values)

    def _insert_values(self, s: SComposition, values: Sequence[Tuple]) -> Bush:
        n = s.n
        attachments: List[Attachment] = []
        for j in range(1, n + 1):
            if j == 1:
                labels = [(0, 0), (n + 1, 0)]
            else:
                labels = list(grow(s.prefix(j - 1), attachments).labels)
            leaves = len(labels) - 1
            xj = values[j - 1]
            chosen = Attachment.leaf(leaves)
            # first and last labels are the sentinels -inf and +inf
            for k in range(1, leaves):
                u, rho = labels[k]
                v = (values[u - 1][0] - rho,) + tuple(values[u - 1][1:])
                if xj == v:
                    chosen = Attachment.gap(k)
                    break
                if xj < v:
                    chosen = Attachment.leaf(k)
                    break
            attachments.append(chosen)
        return Bush(s, tuple(attachments))

    def random_point(self, n: int, rng: random.Random, denominator: Optional[int] = None) -> Tuple[Fraction, ...]:
        denominator = denominator or settings.sample_denominator
        return tuple(
            Fraction(rng.randint(-4 * denominator * n, 4 * denominator * n), rng.randint(1, denominator))
            for _ in range(n)
        )

    # ------------------------------------------------------------------
    # Fibers
    # ------------------------------------------------------------------

    def fiber_point(self, b: Bush) -> Tuple[Fraction, ...]:
        """An exact point of the open fiber, built node by node from the gap labels."""
        n = b.n
        x: List[Optional[Fraction]] = [None] * (n + 2)
        for j in range(1, n + 1):
            rec = b.record(j)
            if not rec.attachment.is_leaf:
                w, tau = rec.hole_label
                x[j] = x[w] - tau
                continue
            (u, rho), (v, sigma) = rec.left_label, rec.right_label
            lo = None if u == 0 else x[u] - rho
            hi = None if v == n + 1 else x[v] - sigma
            if lo is not None and hi is not None:
                x[j] = (lo + hi) / 2
            elif lo is not None:
                x[j] = lo + 1
            elif hi is not None:
                x[j] = hi - 1
            else:
                x[j] = Fraction(0)
        return tuple(x[1:n + 1])

    def fiber_hrep(self, b: Bush) -> FiberDescription:
        """Equalities for holes, upper bounds for ascents, lower bounds for descents."""
        holes = tuple(
            (b.record(j).hole_label[0], j, b.record(j).hole_label[1]) for j in b.gap_nodes
        )
        ascents = sbase_service._ascent_bounds(b)
        descents = sbase_service._descent_bounds(b)
        return FiberDescription(
            n=b.n,
            equalities=tuple(sorted(holes)),
            upper=tuple(sorted((i, j, mu) for (i, j), mu in ascents.items())),
            lower=tuple(sorted((i, j, nu) for (i, j), nu in descents.items())),
        )

    def fiber(self, b: Bush) -> HPolyhedron:
        return self.fiber_hrep(b).polyhedron(tag=b.code)

    def mu(self, b: Bush, i: int, j: int) -> int:
        """Bound from the leftmost path i -> j, counting the nodes weakly right of it."""
        path = self._extreme_path(b, i, j, leftmost=True)
        first_slot = path[0][1]
        r = len(b.children(i)) - first_slot
        on_path = {node for node, _ in path[1:]}
        total = r - 1
        for k in range(i + 1, j):
            if k in on_path or b.right_of_path(k, path):
                total += b.s.m(k)
        return total

    def nu(self, b: Bush, i: int, j: int) -> int:
        """Bound from the rightmost path i -> j, counting the nodes strictly right of it."""
        path = self._extreme_path(b, i, j, leftmost=False)
        first_slot = path[0][1]
        r = len(b.children(i)) - first_slot - 1
        on_path = {node for node, _ in path[1:]}
        total = r - 1
        for k in range(i + 1, j):
            if k not in on_path and b.right_of_path(k, path):
                total += b.s.m(k)
        return total

    def _extreme_path(self, b: Bush, i: int, j: int, leftmost: bool):
        if not (1 <= i < j <= b.n):
            raise NotAncestor(f"{i} is not an ancestor of {j}")
        paths = b.paths(i, j)
        if b.indegree(j) == 2:
            # a hole is reached through its right parent edge on the left side and vice versa
            arrival = b.parents(j)[1 if leftmost else 0]
            paths = [p for p in paths if p[-1] == arrival]
        if not paths:
            raise NotAncestor(f"{i} is not an ancestor of {j}")
        key = lambda p: [slot for _, slot in p]
        return min(paths, key=key) if leftmost else max(paths, key=key)

    def trunk_fiber_equations(self, s: SComposition, q: Sequence[int]) -> List[Tuple[int, int, int]]:
        """The equations x_1 - x_j = q_j - 1 pinning down a trunk fiber."""
        return [(1, j, q[j - 1] - 1) for j in range(2, s.n + 1) if s.T[j - 1] >= 2]

    # ------------------------------------------------------------------
    # Moves
    # ------------------------------------------------------------------

    def stitch(self, t: Bush, pair: Tuple[int, int]) -> Bush:
        """
        Stitch an ascent or descent of a tree into a single-hole bush.

        Raises:
            NotAnAscentOrDescent: if (i, j) is neither
        """
        if not t.is_tree:
            raise InputError("stitching applies to trees")
        i, j = pair
        if pair in sbase_service._ascent_bounds(t):
            ascent = True
        elif pair in sbase_service._descent_bounds(t):
            ascent = False
        else:
            raise NotAnAscentOrDescent(f"({i},{j}) is not an ascent or descent of {t.code}")

        children = sbase_service.children_lists(t)
        p, p_slot = self._neighbour_edge(t, i, j, ascent)
        q = children[p][p_slot]
        children[p][p_slot] = j
        if t.s[j] == 0:
            if ascent:
                children[j].insert(0, q)
            else:
                children[j].append(q)
        else:
            children[j][0 if ascent else -1] = q
        return sbase_service.bush_from_children(t.s, children)

    def incise(self, b: Bush, side: str) -> Bush:
        """
        Undo the single hole of a bush on the given side.

        Raises:
            WrongHoleCount: if b does not have exactly one hole
        """
        if side not in (LEFT, RIGHT):
            raise InputError(f"side must be left or right, got {side!r}")
        if len(b.gap_nodes) != 1:
            raise WrongHoleCount(f"expected one hole, found {len(b.gap_nodes)}")
        return self.detach(b, b.gap_nodes[0], side)

    def detach(self, b: Bush, j: int, side: str) -> Bush:
        """
        Release the hole of j, keeping every other hole of b.

        j and the holes hanging off it through their labels move together by
        +eps (left: j keeps its right incoming edge) or -eps (right) from a
        point of the open fiber; the bush of the moved point is the answer.

        Raises:
            InputError: if j is not an indegree-2 node
        """
        if side not in (LEFT, RIGHT):
            raise InputError(f"side must be left or right, got {side!r}")
        if j not in b.gap_nodes:
            raise InputError(f"node {j} has indegree {b.indegree(j)}")
        moving = {j}
        for k in b.gap_nodes:
            if k > j and b.record(k).hole_label[0] in moving:
                moving.add(k)
        sign = 1 if side == LEFT else -1
        direction = [sign if k in moving else 0 for k in range(1, b.n + 1)]
        return self.insert_along(b.s, self.fiber_point(b), direction)

    def rotate(self, t: Bush, pair: Tuple[int, int], side: str) -> Bush:
        """
        Left rotation of an ascent or right rotation of a descent: stitch the
        pair into a single hole and incise it on the side t does not lie on.

        Raises:
            NotAnAscentOrDescent: if (i, j) does not match the side
            InvariantViolation: if the incisions do not give t back
        """
        if side not in (LEFT, RIGHT):
            raise InputError(f"side must be left or right, got {side!r}")
        if not t.is_tree:
            raise InputError("rotations apply to trees")
        i, j = pair
        ascent = side == LEFT
        table = sbase_service._ascent_bounds(t) if ascent else sbase_service._descent_bounds(t)
        if pair not in table:
            kind = "ascent" if ascent else "descent"
            raise NotAnAscentOrDescent(f"({i},{j}) is not an {kind} of {t.code}")

        b = self.stitch(t, pair)
        others = {self.incise(b, LEFT), self.incise(b, RIGHT)} - {t}
        if len(others) != 1:
            raise InvariantViolation(f"incisions of {b.code} do not give {t.code} back")
        return others.pop()

    def _neighbour_edge(self, t: Bush, i: int, j: int, ascent: bool) -> Tuple[int, int]:
        """
        The edge p -> q where j gets stitched: follow the increasing path leaving i
        just left (ascent) or right (descent) of the path to j, keeping right
        (resp. left), and stop at the last edge whose source is smaller than j.
        """
        path = t.paths(i, j)[0]
        slot = path[0][1] + (-1 if ascent else 1)
        node = i
        while True:
            child = t.children(node)[slot]
            if child is None or child > j:
                return node, slot
            node = child
            slot = len(t.children(node)) - 1 if ascent else 0

    # ------------------------------------------------------------------
    # Extremal trees
    # ------------------------------------------------------------------

    def left_tree(self, b: Bush) -> Bush:
        return self.insert_perturbed(b.s, self.fiber_point(b), +1)

    def right_tree(self, b: Bush) -> Bush:
        return self.insert_perturbed(b.s, self.fiber_point(b), -1)

    def rotation_graph(self, s: SComposition) -> List[Tuple[Bush, Bush]]:
        """Edges t -> t' for every left rotation of an ascent."""
        edges = []
        for t in sbase_service.enumerate(s, TREES):
            for pair in sbase_service.ascents(t):
                edges.append((t, self.rotate(t, pair, LEFT)))
        logger.debug(f"Rotation graph of s=({s}) has {len(edges)} edges")
        return edges


# Global service instance
insertion_service = InsertionService()
