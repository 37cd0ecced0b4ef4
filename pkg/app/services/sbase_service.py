"""
s-bush Service

Capacities, construction, enumeration and the structural queries on s-bushes
(rank, zigzags, holes, ascents, descents).
"""

import itertools
import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from app.core.config import settings
from app.core.exceptions import CapExceeded, IndexOutOfRange, InputError, MalformedBush
from app.models.bush import Attachment, Bush, SComposition

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]

TREES = "trees"
TRUNKS = "trunks"
BUSHES = "bushes"


class SBaseService:
    """Service for the s-bush data model."""

    def capacities(self, s: SComposition) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        """Return (S_0..S_n, T_0..T_n)."""
        return s.S, s.T

    def build_bush(self, s: SComposition, attachments: Sequence[Attachment]) -> Bush:
        """Validate an attachment sequence and return the bush."""
        return Bush(s, tuple(attachments))

    # ------------------------------------------------------------------
    # Counting and enumeration
    # ------------------------------------------------------------------

    def count(self, s: SComposition, kind: str) -> int:
        if kind == TREES:
            total = 1
            for j in range(1, s.n + 1):
                total *= s.S[j - 1]
            return total
        if kind == TRUNKS:
            total = 1
            for j in range(1, s.n + 1):
                total *= max(1, s.T[j - 1] - 1)
            return total
        if kind == BUSHES:
            # leaf count -> number of partial bushes
            counts: Dict[int, int] = {1: 1}
            for j in range(1, s.n + 1):
                nxt: Dict[int, int] = {}
                sj = s[j]
                for leaves, c in counts.items():
                    nxt[leaves + sj] = nxt.get(leaves + sj, 0) + c * leaves
                    if leaves >= 2:
                        grown = leaves + (sj - 1 if sj else 0)
                        nxt[grown] = nxt.get(grown, 0) + c * (leaves - 1)
                counts = nxt
            return sum(counts.values())
        raise InputError(f"unknown kind {kind!r}")

    def enumerate(self, s: SComposition, kind: str, cap: Optional[int] = None) -> List[Bush]:
        """
        Exhaustive, duplicate-free list of trees, trunks or bushes.

        Trees and trunks come in the lexicographic order of their index vectors
        p in prod [S_{j-1}] and q in prod [max(1, T_{j-1} - 1)].

        Raises:
            CapExceeded: when the count exceeds the cap
        """
        cap = settings.enumeration_cap if cap is None else cap
        size = self.count(s, kind)
        if size > cap:
            raise CapExceeded(f"{kind} of s=({s})", size, cap)

        if kind == TREES:
            out = [self.tree_from_index(s, p) for p in self.tree_indices(s)]
        elif kind == TRUNKS:
            out = [self.trunk_from_index(s, q) for q in self.trunk_indices(s)]
        else:
            out = [Bush(s, atts) for atts in self._bush_sequences(s)]
        logger.info(f"Enumerated {len(out)} {kind} for s=({s})")
        return out

    def tree_indices(self, s: SComposition) -> Iterator[Tuple[int, ...]]:
        return itertools.product(*(range(1, s.S[j - 1] + 1) for j in range(1, s.n + 1)))

    def trunk_indices(self, s: SComposition) -> Iterator[Tuple[int, ...]]:
        return itertools.product(*(range(1, max(1, s.T[j - 1] - 1) + 1) for j in range(1, s.n + 1)))

    def tree_from_index(self, s: SComposition, p: Sequence[int]) -> Bush:
        return Bush(s, tuple(Attachment.leaf(k) for k in p))

    def trunk_from_index(self, s: SComposition, q: Sequence[int]) -> Bush:
        atts = []
        for j, qj in enumerate(q, start=1):
            atts.append(Attachment.gap(qj) if s.T[j - 1] >= 2 else Attachment.leaf(1))
        return Bush(s, tuple(atts))

    def trunk_index(self, b: Bush) -> Tuple[int, ...]:
        return tuple(a.index for a in b.attachments)

    def _bush_sequences(self, s: SComposition) -> Iterator[Tuple[Attachment, ...]]:
        def extend(j: int, leaves: int, acc: Tuple[Attachment, ...]):
            if j > s.n:
                yield acc
                return
            sj = s[j]
            for a in range(1, leaves + 1):
                yield from extend(j + 1, leaves + sj, acc + (Attachment.leaf(a),))
            for g in range(1, leaves):
                yield from extend(j + 1, leaves + (sj - 1 if sj else 0), acc + (Attachment.gap(g),))

        return extend(1, 1, ())

    # ------------------------------------------------------------------
    # Structural queries
    # ------------------------------------------------------------------

    def rank(self, b: Bush) -> int:
        return b.rank

    def is_trunk(self, b: Bush) -> bool:
        nonzero = [i for i in range(1, b.n + 1) if b.s[i] != 0]
        return b.rank == min(nonzero + [b.n])

    def zigzag(self, b: Bush, j: int, side: str) -> List[int]:
        """Left or right zigzag of node j."""
        if side not in ("left", "right"):
            raise InputError(f"side must be left or right, got {side!r}")
        path = [j]
        node = j
        left = side == "left"
        while True:
            slots = b.children(node)
            nxt = slots[0] if left else slots[-1]
            if nxt is None:
                return path
            path.append(nxt)
            node = nxt
            if len(b.parent_nodes(nxt)) == 2:
                left = not left

    def holes(self, b: Bush) -> List[Pair]:
        return sorted((b.record(j).hole_label[0], j) for j in b.gap_nodes)

    def ascents(self, b: Bush) -> List[Pair]:
        return sorted(self._ascent_bounds(b))

    def descents(self, b: Bush) -> List[Pair]:
        return sorted(self._descent_bounds(b))

    def _ascent_bounds(self, b: Bush) -> Dict[Pair, int]:
        out = {}
        for j in range(1, b.n + 1):
            rec = b.record(j)
            if not rec.attachment.is_leaf or rec.left_label[0] == 0:
                continue
            if b.s[j] == 0 or all(b.indegree(k) == 2 for k in self.zigzag(b, j, "left")[1:]):
                u, rho = rec.left_label
                out[(u, j)] = rho
        return out

    def _descent_bounds(self, b: Bush) -> Dict[Pair, int]:
        out = {}
        for j in range(1, b.n + 1):
            rec = b.record(j)
            if not rec.attachment.is_leaf or rec.right_label[0] == b.n + 1:
                continue
            if b.s[j] == 0 or all(b.indegree(k) == 2 for k in self.zigzag(b, j, "right")[1:]):
                v, sigma = rec.right_label
                out[(v, j)] = sigma
        return out

    def tree_ascents(self, t: Bush) -> List[Pair]:
        """Ascents of a tree by the path criterion (independent of gap labels)."""
        return self._tree_turns(t, leftmost=True)

    def tree_descents(self, t: Bush) -> List[Pair]:
        return self._tree_turns(t, leftmost=False)

    def _tree_turns(self, t: Bush, leftmost: bool) -> List[Pair]:
        if not t.is_tree:
            raise InputError("the path criterion applies to trees only")
        out = []
        for j in range(1, t.n + 1):
            x = j
            parent, slot = t.parents(x)[0]
            while parent != 0 and slot == (0 if leftmost else len(t.children(parent)) - 1):
                x = parent
                parent, slot = t.parents(x)[0]
            if parent == 0:
                continue
            end = t.children(j)[0 if leftmost else -1]
            if t.s[j] == 0 or end is None:
                out.append((parent, j))
        return sorted(out)

    # ------------------------------------------------------------------
    # Re-encoding edge structures
    # ------------------------------------------------------------------

    def bush_from_children(self, s: SComposition, children: Sequence[Sequence[Optional[int]]]) -> Bush:
        """
        Recover the attachment sequence of a plane structure given by ordered slots.

        Raises:
            MalformedBush: if the structure is not an s-bush
        """
        n = s.n
        attachments = []
        for j in range(1, n + 1):
            order: List[Tuple[int, int]] = []
            seen = set()

            def walk(node: int) -> None:
                for slot, child in enumerate(children[node]):
                    if child is None or child >= j:
                        order.append((node, slot))
                    elif child not in seen:
                        seen.add(child)
                        walk(child)

            walk(0)
            incoming = sorted(
                order.index((p, slot))
                for p in range(j)
                for slot, child in enumerate(children[p])
                if child == j
            )
            if len(incoming) == 1:
                attachments.append(Attachment.leaf(incoming[0] + 1))
            elif len(incoming) == 2 and incoming[1] == incoming[0] + 1:
                attachments.append(Attachment.gap(incoming[0] + 1))
            else:
                raise MalformedBush(f"node {j} has incoming leaves {incoming}")
        try:
            bush = Bush(s, tuple(attachments))
        except IndexOutOfRange as e:
            raise MalformedBush(str(e)) from e
        expected = tuple(tuple(c) for c in children)
        if bush.structure.children != expected:
            raise MalformedBush("slot structure does not match the re-encoded bush")
        return bush

    def children_lists(self, b: Bush) -> List[List[Optional[int]]]:
        return [list(c) for c in b.structure.children]


# Global service instance
sbase_service = SBaseService()
