"""
Weak compositions and s-bushes.

A bush is stored as its attachment sequence; everything else (slots, parents,
leaf orders, gap labels) is derived once by replaying the construction and
cached on the instance.
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from app.core.exceptions import IndexOutOfRange, InputError

Edge = Tuple[int, int]        # (node, slot); node 0 is the root
Label = Tuple[int, int]       # gap label (u, rho)


@dataclass(frozen=True)
class SComposition:
    """A weak composition s = (s_1, ..., s_n), stored 0-based."""
    values: Tuple[int, ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise InputError("s must have at least one entry")
        if any((not isinstance(v, int)) or v < 0 for v in self.values):
            raise InputError(f"s must be non-negative integers, got {self.values}")

    @classmethod
    def of(cls, *values: int) -> "SComposition":
        return cls(tuple(values))

    @classmethod
    def parse(cls, text: str) -> "SComposition":
        try:
            return cls(tuple(int(p) for p in text.replace(" ", "").split(",") if p))
        except ValueError as e:
            raise InputError(f"not a composition: {text!r}") from e

    @property
    def n(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> int:
        """s_i with 1-based i."""
        return self.values[i - 1]

    def m(self, k: int) -> int:
        """max(0, s_k - 1)."""
        return max(0, self.values[k - 1] - 1)

    @cached_property
    def S(self) -> Tuple[int, ...]:
        out = [1]
        for v in self.values:
            out.append(out[-1] + v)
        return tuple(out)

    @cached_property
    def T(self) -> Tuple[int, ...]:
        out = [1]
        all_zero = True
        extra = 0
        for v in self.values:
            all_zero = all_zero and v == 0
            extra += max(0, v - 1)
            out.append(2 - int(all_zero) + extra)
        return tuple(out)

    def nonzero_between(self, i: int, j: int) -> Tuple[int, ...]:
        """Nodes k with i < k < j and s_k != 0."""
        return tuple(k for k in range(i + 1, j) if self[k] != 0)

    def prefix(self, j: int) -> "SComposition":
        return SComposition(self.values[:j])

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.values)


class AttachKind(str, Enum):
    LEAF = "leaf"
    GAP = "gap"


@dataclass(frozen=True, order=True)
class Attachment:
    kind: AttachKind
    index: int

    @classmethod
    def leaf(cls, k: int) -> "Attachment":
        return cls(AttachKind.LEAF, k)

    @classmethod
    def gap(cls, k: int) -> "Attachment":
        return cls(AttachKind.GAP, k)

    @property
    def is_leaf(self) -> bool:
        return self.kind is AttachKind.LEAF

    @property
    def code(self) -> str:
        return ("L" if self.is_leaf else "G") + str(self.index)

    @classmethod
    def from_code(cls, code: str) -> "Attachment":
        code = code.strip()
        if len(code) < 2 or code[0] not in "LG" or not code[1:].isdigit():
            raise InputError(f"bad attachment code {code!r}")
        return cls.leaf(int(code[1:])) if code[0] == "L" else cls.gap(int(code[1:]))


@dataclass(frozen=True)
class NodeRecord:
    """What the construction saw when attaching a node."""
    attachment: Attachment
    leaves: Tuple[int, ...]                 # 1-based leaf indices used in B_{<=j-1}
    left_label: Optional[Label] = None      # leaf attachment: label left of the leaf
    right_label: Optional[Label] = None     # leaf attachment: label right of the leaf
    hole_label: Optional[Label] = None      # gap attachment: the label of the gap


@dataclass(frozen=True)
class BushStructure:
    children: Tuple[Tuple[Optional[int], ...], ...]   # index 0 is the root
    parents: Tuple[Tuple[Edge, ...], ...]             # index 0 unused
    leaf_orders: Tuple[Tuple[Edge, ...], ...]         # leaf_orders[j-1]: leaves of B_{<=j-1}
    leaves: Tuple[Edge, ...]
    labels: Tuple[Label, ...]
    records: Tuple[NodeRecord, ...]                   # records[j-1] for node j


def grow(s: SComposition, attachments: Sequence[Attachment]) -> BushStructure:
    """Replay the attachment sequence, tracking leaves and gap labels."""
    n = s.n
    if len(attachments) != n:
        raise InputError(f"expected {n} attachments, got {len(attachments)}")
    children: List[List[Optional[int]]] = [[None]]
    parents: List[Tuple[Edge, ...]] = [()]
    leaves: List[Edge] = [(0, 0)]
    labels: List[Label] = [(0, 0), (n + 1, 0)]
    leaf_orders: List[Tuple[Edge, ...]] = []
    records: List[NodeRecord] = []

    for j, att in enumerate(attachments, start=1):
        leaf_orders.append(tuple(leaves))
        sj = s[j]
        fresh = [(j, sj - 1 - k) for k in range(sj)]
        if att.is_leaf:
            a = att.index
            if not 1 <= a <= len(leaves):
                raise IndexOutOfRange(f"node {j}: leaf {a} out of 1..{len(leaves)}")
            owner, slot = leaves[a - 1]
            children[owner][slot] = j
            parents.append(((owner, slot),))
            width = sj + 1
            records.append(NodeRecord(att, (a,), left_label=labels[a - 1], right_label=labels[a]))
            labels = labels[:a] + fresh + labels[a:]
            leaves = leaves[:a - 1] + [(j, k) for k in range(width)] + leaves[a:]
            start = a
        else:
            g = att.index
            if not 1 <= g <= len(leaves) - 1:
                raise IndexOutOfRange(f"node {j}: gap {g} out of 1..{len(leaves) - 1}")
            first, second = leaves[g - 1], leaves[g]
            children[first[0]][first[1]] = j
            children[second[0]][second[1]] = j
            parents.append((first, second))
            width = sj + 1 if sj else 2
            if not sj:
                fresh = [(j, 0)]
            records.append(NodeRecord(att, (g, g + 1), hole_label=labels[g]))
            labels = labels[:g] + fresh + labels[g + 1:]
            leaves = leaves[:g - 1] + [(j, k) for k in range(width)] + leaves[g + 1:]
            start = g
        children.append([None] * width)
        shift = s.m(j)
        if shift:
            labels = [labels[0]] + [(u, rho + shift) for u, rho in labels[1:start]] + labels[start:]

    return BushStructure(
        children=tuple(tuple(c) for c in children),
        parents=tuple(parents),
        leaf_orders=tuple(leaf_orders),
        leaves=tuple(leaves),
        labels=tuple(labels),
        records=tuple(records),
    )


@dataclass(frozen=True)
class Bush:
    """
    An s-bush given by its attachment sequence.

    Equality and hashing use (s, attachments) only; the derived structure is
    validated at construction time.
    """
    s: SComposition
    attachments: Tuple[Attachment, ...]

    def __post_init__(self):
        object.__setattr__(self, "attachments", tuple(self.attachments))
        _ = self.structure

    @cached_property
    def structure(self) -> BushStructure:
        return grow(self.s, self.attachments)

    @classmethod
    def from_codes(cls, s: SComposition, codes: str) -> "Bush":
        parts = [p for p in codes.replace(",", ".").split(".") if p]
        return cls(s, tuple(Attachment.from_code(p) for p in parts))

    @property
    def n(self) -> int:
        return self.s.n

    @property
    def code(self) -> str:
        return ".".join(a.code for a in self.attachments)

    def __str__(self) -> str:
        return f"Bush({self.s}: {self.code})"

    def children(self, node: int) -> Tuple[Optional[int], ...]:
        return self.structure.children[node]

    def parents(self, node: int) -> Tuple[Edge, ...]:
        return self.structure.parents[node]

    def parent_nodes(self, node: int) -> Tuple[int, ...]:
        return tuple(dict.fromkeys(p for p, _ in self.parents(node)))

    def record(self, node: int) -> NodeRecord:
        return self.structure.records[node - 1]

    def indegree(self, node: int) -> int:
        return len(self.parents(node))

    @cached_property
    def gap_nodes(self) -> Tuple[int, ...]:
        return tuple(j for j in range(1, self.n + 1) if not self.attachments[j - 1].is_leaf)

    @property
    def is_tree(self) -> bool:
        return not self.gap_nodes

    @property
    def rank(self) -> int:
        return self.n - len(self.gap_nodes)

    @property
    def leaf_count(self) -> int:
        return len(self.structure.leaves)

    def prefix(self, j: int) -> "Bush":
        """The bush B_{<=j} obtained by deleting all nodes > j."""
        return Bush(self.s.prefix(j), self.attachments[:j])

    @cached_property
    def _descendants(self) -> Dict[int, frozenset]:
        out: Dict[int, frozenset] = {}
        for node in range(self.n, -1, -1):
            below = {node}
            for child in self.children(node):
                if child is not None:
                    below |= out[child]
            out[node] = frozenset(below)
        return out

    def descendants(self, node: int) -> frozenset:
        return self._descendants[node]

    def is_ancestor(self, i: int, j: int) -> bool:
        return j in self._descendants[i]

    def leaf_position(self, step: int, edge: Edge) -> int:
        """1-based index of the leaf ``edge`` in B_{<=step-1}."""
        return self.structure.leaf_orders[step - 1].index(edge) + 1

    def right_of_path(self, k: int, path: Sequence[Edge]) -> bool:
        """
        Whether node k (not on the path) lies to the right of an increasing path.

        The path is a sequence of (node, slot) edges starting below k.
        """
        p, slot = max((e for e in path if e[0] < k), key=lambda e: e[0])
        ell = self.leaf_position(k, (p, slot))
        return min(self.record(k).leaves) > ell

    def paths(self, i: int, j: int) -> List[Tuple[Edge, ...]]:
        """All increasing paths from i to j, as tuples of (node, slot) edges."""
        found: List[Tuple[Edge, ...]] = []

        def walk(node: int, acc: Tuple[Edge, ...]) -> None:
            for slot, child in enumerate(self.children(node)):
                if child is None or child > j:
                    continue
                if child == j:
                    found.append(acc + ((node, slot),))
                elif j in self._descendants[child]:
                    walk(child, acc + ((node, slot),))

        walk(i, ())
        return found

    def descendant_leaves(self, i: int, step: int) -> List[int]:
        """Indices of the leaves of B_{<=step-1} below node i."""
        order = self.structure.leaf_orders[step - 1]
        out = []
        for idx, (owner, slot) in enumerate(order, start=1):
            if owner in self._descendants[i] and owner < step:
                out.append(idx)
        return out

    def left_of_attachment(self, i: int, j: int) -> bool:
        """For i not an ancestor of j: whether i sits left of every path from the root to j."""
        spans = self.descendant_leaves(i, j)
        return max(spans) < min(self.record(j).leaves)
