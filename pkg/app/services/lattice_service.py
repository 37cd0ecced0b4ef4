"""
Lattice Service

Positions of trees, left/right positions of bushes, the s-weak order and the
facial s-weak order, the join formula, polygon classification and the
verification of interval doubling sequences.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from app.core.exceptions import DoublingFailed, InputError, InvariantViolation, NotAPositionVector, NotAscents
from app.models.bush import Attachment, Bush, Edge, SComposition
from app.models.lattice import FiniteLattice
from app.services.insertion_service import LEFT, RIGHT, insertion_service
from app.services.sbase_service import BUSHES, TREES, sbase_service

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]
Positions = Dict[Pair, int]

SQUARE = "square"
PENTAGON_LEFT = "pentagonL"
PENTAGON_RIGHT = "pentagonR"
HEXAGON = "hexagon"


def position_pairs(n: int) -> List[Pair]:
    return [(i, j) for j in range(2, n + 1) for i in range(1, j)]


def _root_path(t: Bush, j: int) -> List[Edge]:
    path = []
    node = j
    while node != 0:
        edge = t.parents(node)[0]
        path.append(edge)
        node = edge[0]
    return path[::-1]


@lru_cache(maxsize=None)
def _tree_positions(t: Bush) -> Tuple[int, ...]:
    out = []
    paths = {j: _root_path(t, j) for j in range(1, t.n + 1)}
    for i, j in position_pairs(t.n):
        path = paths[j]
        slot = next((sl for node, sl in path if node == i), None)
        si = t.s[i]
        if slot is not None:
            out.append(min(si, len(t.children(i)) - 1 - slot))
        elif t.right_of_path(i, path):
            out.append(si)
        else:
            out.append(0)
    return tuple(out)


def _valid_path(b: Bush, path: Sequence[Edge], for_rpos: bool) -> bool:
    """Inner nodes entered with the other incoming edge on the far side must leave on that side too."""
    for entering, (node, out_slot) in zip(path, path[1:]):
        if b.indegree(node) != 2:
            continue
        left_in, right_in = b.parents(node)
        if for_rpos and entering == left_in and out_slot == len(b.children(node)) - 1:
            return False
        if not for_rpos and entering == right_in and out_slot == 0:
            return False
    return True


@lru_cache(maxsize=None)
def _facial_positions(b: Bush) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    lpos, rpos = [], []
    for i, j in position_pairs(b.n):
        si = b.s[i]
        paths = b.paths(i, j)
        if not paths:
            if b.left_of_attachment(i, j):
                lpos.append(si)
                rpos.append(0)
            else:
                lpos.append(0)
                rpos.append(si)
            continue
        key = lambda p: [slot for _, slot in p]
        left_candidates = [p for p in paths if _valid_path(b, p, for_rpos=False)] or paths
        right_candidates = [p for p in paths if _valid_path(b, p, for_rpos=True)] or paths
        rightmost = max(left_candidates, key=key)
        leftmost = min(right_candidates, key=key)
        lpos.append(min(si, rightmost[0][1]))
        rpos.append(min(si, len(b.children(i)) - 1 - leftmost[0][1]))
    return tuple(lpos), tuple(rpos)


@dataclass
class PolygonReport:
    kind: str
    elements: List[Bush]
    edges: List[Tuple[Bush, Bush, Pair]]


@dataclass
class DoublingStep:
    i: int
    j: int
    size_before: int
    size_after: int
    doubled: List[Tuple[str, str]] = field(default_factory=list)
    tripled: bool = False


@dataclass
class DoublingReport:
    s: str
    facial: bool
    steps: List[DoublingStep]
    ok: bool = True


class LatticeService:
    """Service for the s-weak order, the facial s-weak order and lattice checks."""

    # ------------------------------------------------------------------
    # Positions
    # ------------------------------------------------------------------

    def pos(self, t: Bush, i: int, j: int) -> int:
        """Position of j relative to i in a tree."""
        self._check_pair(t.n, i, j)
        if not t.is_tree:
            raise InputError("positions are defined on trees; use lpos/rpos for bushes")
        return _tree_positions(t)[position_pairs(t.n).index((i, j))]

    def positions(self, t: Bush) -> Positions:
        return dict(zip(position_pairs(t.n), _tree_positions(t)))

    def position_vector(self, t: Bush) -> Tuple[int, ...]:
        return _tree_positions(t)

    def lpos(self, b: Bush, i: int, j: int) -> int:
        self._check_pair(b.n, i, j)
        return _facial_positions(b)[0][position_pairs(b.n).index((i, j))]

    def rpos(self, b: Bush, i: int, j: int) -> int:
        self._check_pair(b.n, i, j)
        return _facial_positions(b)[1][position_pairs(b.n).index((i, j))]

    def facial_vectors(self, b: Bush) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        return _facial_positions(b)

    def _check_pair(self, n: int, i: int, j: int) -> None:
        if not 1 <= i < j <= n:
            raise InputError(f"need 1 <= i < j <= {n}, got ({i},{j})")

    # ------------------------------------------------------------------
    # s-weak order
    # ------------------------------------------------------------------

    def sweak_leq(self, t: Bush, u: Bush) -> bool:
        return all(a <= b for a, b in zip(_tree_positions(t), _tree_positions(u)))

    def sweak_lattice(self, s: SComposition) -> FiniteLattice:
        return _sweak_lattice(s)

    def join(self, t: Bush, u: Bush) -> Bush:
        """Join through the transitive closure of the componentwise maximum."""
        n = t.n
        pt, pu = self.positions(t), self.positions(u)
        m = {pair: max(pt[pair], pu[pair]) for pair in pt}
        reach = {pair: m[pair] > 0 for pair in m}
        for k in range(2, n + 1):
            for j in range(k - 1, 0, -1):
                if not reach[(j, k)]:
                    reach[(j, k)] = any(reach[(j, l)] and reach[(l, k)] for l in range(j + 1, k))
        closed = {}
        for i, k in m:
            value = m[(i, k)]
            for j in range(i + 1, k):
                if reach[(j, k)]:
                    value = max(value, m[(i, j)])
            closed[(i, k)] = value
        return self.tree_from_positions(t.s, closed)

    def meet(self, t: Bush, u: Bush) -> Bush:
        lattice = self.sweak_lattice(t.s)
        return lattice.labels[lattice.meet(lattice.index(t), lattice.index(u))]

    def brute_join(self, t: Bush, u: Bush) -> Bush:
        lattice = self.sweak_lattice(t.s)
        return lattice.labels[lattice.join(lattice.index(t), lattice.index(u))]

    def check_position_vector(self, s: SComposition, P: Positions) -> None:
        """
        Raises:
            NotAPositionVector: if bounds or the two implications fail
        """
        n = s.n
        for (i, j) in position_pairs(n):
            if (i, j) not in P:
                raise NotAPositionVector(f"missing entry ({i},{j})")
            if not 0 <= P[(i, j)] <= s[i]:
                raise NotAPositionVector(f"P[{i},{j}]={P[(i, j)]} outside 0..{s[i]}")
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                for k in range(j + 1, n + 1):
                    if P[(j, k)] > 0 and P[(i, j)] > P[(i, k)]:
                        raise NotAPositionVector(f"P[{j},{k}]>0 but P[{i},{j}]>P[{i},{k}]")
                    if P[(j, k)] < s[j] and P[(i, j)] < P[(i, k)]:
                        raise NotAPositionVector(f"P[{j},{k}]<s_{j} but P[{i},{j}]<P[{i},{k}]")

    def tree_from_positions(self, s: SComposition, P: Positions) -> Bush:
        """
        Rebuild the unique tree with the given positions, one node at a time.

        Raises:
            NotAPositionVector: if no tree has these positions
        """
        self.check_position_vector(s, P)
        attachments: List[Attachment] = []
        for j in range(1, s.n + 1):
            leaves = s.S[j - 1]
            prefix = s.prefix(j)
            for a in range(1, leaves + 1):
                candidate = Bush(prefix, tuple(attachments) + (Attachment.leaf(a),))
                if j == 1:
                    break
                got = self.positions(candidate)
                if all(got[(i, j)] == P[(i, j)] for i in range(1, j)):
                    break
            else:
                raise NotAPositionVector(f"no leaf realizes column {j}")
            attachments.append(Attachment.leaf(a))
        return Bush(s, tuple(attachments))

    # ------------------------------------------------------------------
    # Facial s-weak order
    # ------------------------------------------------------------------

    def facial_leq(self, b: Bush, c: Bush) -> bool:
        (lb, rb), (lc, rc) = _facial_positions(b), _facial_positions(c)
        return all(x >= y for x, y in zip(lb, lc)) and all(x <= y for x, y in zip(rb, rc))

    def facial_lattice(self, s: SComposition) -> FiniteLattice:
        return _facial_lattice(s)

    def is_face(self, b: Bush, c: Bush) -> bool:
        """Whether the closed fiber of b is a face of the closed fiber of c."""
        (lb, rb), (lc, rc) = _facial_positions(b), _facial_positions(c)
        return all(x >= y for x, y in zip(lb, lc)) and all(x >= y for x, y in zip(rb, rc))

    def detach(self, b: Bush, j: int, side: str) -> Bush:
        """Detach the left or right incoming edge of an indegree-2 node."""
        if b.indegree(j) != 2:
            raise InputError(f"node {j} has indegree {b.indegree(j)}")
        return insertion_service.detach(b, j, side)

    def facial_covers_by_detaching(self, s: SComposition) -> List[Tuple[Bush, Bush]]:
        """Cover pairs (lower, upper) from detaching incoming edges of indegree-2 nodes."""
        edges = []
        for b in sbase_service.enumerate(s, BUSHES):
            for j in b.gap_nodes:
                edges.append((self.detach(b, j, LEFT), b))
                edges.append((b, self.detach(b, j, RIGHT)))
        return sorted(set(edges), key=lambda e: (e[0].code, e[1].code))

    def min_tree(self, b: Bush) -> Bush:
        return insertion_service.left_tree(b)

    def max_tree(self, b: Bush) -> Bush:
        return insertion_service.right_tree(b)

    # ------------------------------------------------------------------
    # Polygons
    # ------------------------------------------------------------------

    def polygon_type(self, t: Bush, first: Pair, second: Pair) -> PolygonReport:
        """
        Classify the interval [t, R v S] spanned by two ascent rotations of t.

        Raises:
            NotAscents: if either pair is not an ascent of t
            InvariantViolation: if the interval does not have the shape of its case
        """
        ascents = set(sbase_service.ascents(t))
        if first not in ascents or second not in ascents or first == second:
            raise NotAscents(f"{first} and {second} must be distinct ascents of {t.code}")
        (a, b), (c, d) = sorted([first, second])
        r = insertion_service.rotate(t, (a, b), LEFT)
        s_tree = insertion_service.rotate(t, (c, d), LEFT)
        ab_survives = (a, b) in set(sbase_service.ascents(s_tree))
        cd_survives = (c, d) in set(sbase_service.ascents(r))
        if ab_survives and cd_survives:
            kind = SQUARE
        elif ab_survives:
            kind = PENTAGON_LEFT
        elif cd_survives:
            kind = PENTAGON_RIGHT
        else:
            kind = HEXAGON

        lattice = self.sweak_lattice(t.s)
        top = lattice.join(lattice.index(r), lattice.index(s_tree))
        members = lattice.interval(lattice.index(t), top)
        expected = {SQUARE: 4, PENTAGON_LEFT: 5, PENTAGON_RIGHT: 5, HEXAGON: 6}[kind]
        if len(members) != expected:
            raise InvariantViolation(f"polygon at {t.code} classified {kind} but has {len(members)} elements")
        edges = []
        for x, y in lattice.covers:
            if x in members and y in members:
                lower, upper = lattice.labels[x], lattice.labels[y]
                edges.append((lower, upper, self.rotation_label(lower, upper)))
        return PolygonReport(kind, [lattice.labels[k] for k in members], edges)

    def rotation_label(self, lower: Bush, upper: Bush) -> Optional[Pair]:
        """
        The ascent of lower whose left rotation is upper, or None when upper
        does not cover lower.

        Read off the positions first: the label is an ascent of lower, a
        descent of upper, and its position goes up. Rotation only settles ties.
        """
        if lower.s != upper.s or not lower.is_tree or not upper.is_tree:
            return None
        below, above = self.positions(lower), self.positions(upper)
        if any(below[pair] > above[pair] for pair in below):
            return None
        descents = set(sbase_service.descents(upper))
        raised = [
            pair for pair in sbase_service.ascents(lower)
            if below[pair] < above[pair] and pair in descents
        ]
        if len(raised) == 1:
            return raised[0]
        for pair in raised:
            if insertion_service.rotate(lower, pair, LEFT) == upper:
                return pair
        return None

    # ------------------------------------------------------------------
    # Interval doublings
    # ------------------------------------------------------------------

    def doubling_chain(self, s: SComposition) -> List[Tuple[int, int]]:
        """Indices (i, j) of the chain W^{1,0}, ..., W^{n-1,s_1}."""
        n = s.n
        chain = [(1, 0)]
        for i in range(1, n):
            for j in range(1, s[n - i] + 1):
                chain.append((i, j))
        return chain

    def _chain_key(self, b: Bush, i: int, j: int, facial: bool):
        n = b.n
        bar = b.attachments[:-1]
        if not facial:
            p = self.positions(b)
            tail = tuple(p[(k, n)] for k in range(n - i + 1, n))
            return bar, tail, min(p[(n - i, n)], j)
        lp, rp = _facial_positions(b)
        pairs = position_pairs(n)
        lpos = {pair: lp[pairs.index(pair)] for pair in pairs if pair[1] == n}
        rpos = {pair: rp[pairs.index(pair)] for pair in pairs if pair[1] == n}
        tail = tuple((lpos[(k, n)], rpos[(k, n)]) for k in range(n - i + 1, n))
        threshold = b.s[n - i] - j
        left = lpos[(n - i, n)] if lpos[(n - i, n)] > threshold else -1
        right = rpos[(n - i, n)] if rpos[(n - i, n)] < j else -1
        return bar, tail, left, right

    def chain_quotient(self, s: SComposition, i: int, j: int, facial: bool = False) -> Tuple[FiniteLattice, List[int]]:
        """W^{i,j} (or its facial analogue) and, per element of the full order, its class."""
        lattice = self.facial_lattice(s) if facial else self.sweak_lattice(s)
        keys: Dict[object, int] = {}
        class_of = []
        for b in lattice.labels:
            key = self._chain_key(b, i, j, facial)
            class_of.append(keys.setdefault(key, len(keys)))
        quotient, minima = lattice.quotient(class_of, name=f"W^{i},{j}")
        class_index = {class_of[m]: k for k, m in enumerate(minima)}
        return quotient, [class_index[c] for c in class_of]

    def verify_doubling_sequence(self, s: SComposition, facial: bool = False) -> DoublingReport:
        """
        Check that every step W^{i,j-1} -> W^{i,j} of every prefix of s is a
        union of interval doublings (interval triplings for the facial order).

        Raises:
            DoublingFailed: with a witness when a step is not a doubling
        """
        steps: List[DoublingStep] = []
        for m in range(2, s.n + 1):
            prefix = s.prefix(m)
            chain = self.doubling_chain(prefix)
            previous, previous_class = self.chain_quotient(prefix, *chain[0], facial=facial)
            for i, j in chain[1:]:
                current, current_class = self.chain_quotient(prefix, i, j, facial=facial)
                proj = [0] * current.size
                for elem, c in enumerate(current_class):
                    proj[c] = previous_class[elem]
                step = DoublingStep(i, j, previous.size, current.size)
                step.doubled, step.tripled = self._check_step(previous, current, proj)
                steps.append(step)
                logger.debug(f"s=({prefix}) step ({i},{j}): {previous.size} -> {current.size}")
                previous, previous_class = current, current_class
        logger.info(f"Verified {len(steps)} doubling steps for s=({s}) facial={facial}")
        return DoublingReport(str(s), facial, steps)

    def _check_step(self, coarse: FiniteLattice, fine: FiniteLattice, proj: List[int]):
        preimages: Dict[int, List[int]] = {}
        for k, c in enumerate(proj):
            preimages.setdefault(c, []).append(k)
        if max(len(v) for v in preimages.values()) <= 2:
            return _double(coarse, fine, proj), False

        triples = {c: sorted(v, key=lambda k: bin(fine.down_masks[k]).count("1")) for c, v in preimages.items() if len(v) == 3}
        last_error: Optional[DoublingFailed] = None
        for merge_lower in (True, False):
            class_of = list(range(fine.size))
            for lo, mid, hi in triples.values():
                if not (fine.lt(lo, mid) and fine.lt(mid, hi)):
                    raise DoublingFailed("a tripled class is not a chain", witness=[fine.labels[k].code for k in (lo, mid, hi)])
                if merge_lower:
                    class_of[mid] = lo
                else:
                    class_of[mid] = hi
            if not fine.is_congruence(class_of):
                continue
            middle, minima = fine.quotient(class_of)
            index_of_class = {class_of[m]: k for k, m in enumerate(minima)}
            to_middle = [index_of_class[class_of[k]] for k in range(fine.size)]
            middle_to_coarse = [proj[m] for m in minima]
            try:
                first = _double(coarse, middle, middle_to_coarse)
                second = _double(middle, fine, to_middle)
            except DoublingFailed as e:
                last_error = e
                continue
            return first + second, True
        raise last_error or DoublingFailed("no splitting of the tripled classes is a congruence")


def _double(coarse: FiniteLattice, fine: FiniteLattice, proj: Sequence[int]) -> List[Tuple[str, str]]:
    """
    Verify that ``fine`` is ``coarse`` with a family of intervals doubled.

    ``proj`` maps each element of ``fine`` to its image in ``coarse``.
    """
    preimages: Dict[int, List[int]] = {}
    for k, c in enumerate(proj):
        preimages.setdefault(c, []).append(k)
    if len(preimages) != coarse.size:
        raise DoublingFailed("projection is not surjective")
    low: Dict[int, int] = {}
    high: Dict[int, int] = {}
    for c, ks in preimages.items():
        if len(ks) > 2:
            raise DoublingFailed("class with more than two preimages", witness=[_label(fine, k) for k in ks])
        if len(ks) == 2:
            a, b = ks
            if fine.lt(b, a):
                a, b = b, a
            if not fine.lt(a, b):
                raise DoublingFailed("preimages are incomparable", witness=[_label(fine, a), _label(fine, b)])
            low[c], high[c] = a, b

    doubled = sorted(low)
    graph = nx.Graph()
    graph.add_nodes_from(doubled)
    for x, y in coarse.covers:
        if x in low and y in low and not fine.leq(high[x], low[y]):
            graph.add_edge(x, y)
    components = [sorted(c) for c in nx.connected_components(graph)]
    components.sort()

    # labels[k][a] in {0, 1} for element a of coarse outside component k
    labels = np.zeros((len(components), coarse.size), dtype=np.int8)
    intervals = []
    for k, comp in enumerate(components):
        bounds = coarse.is_interval(comp)
        if bounds is None:
            raise DoublingFailed("doubled set is not an interval", witness=[_label(coarse, a) for a in comp])
        intervals.append(bounds)
        up = coarse.up_masks[bounds[0]]
        for a in range(coarse.size):
            labels[k, a] = 1 if (up >> a) & 1 else 0

    component_of = {a: k for k, comp in enumerate(components) for a in comp}
    fine_labels = np.zeros((len(components), fine.size), dtype=np.int8)
    for e in range(fine.size):
        c = proj[e]
        fine_labels[:, e] = labels[:, c]
        if c in component_of:
            fine_labels[component_of[c], e] = 1 if high[c] == e else 0

    proj_arr = np.asarray(proj)
    expected = coarse.leq_matrix[np.ix_(proj_arr, proj_arr)].copy()
    for k in range(len(components)):
        expected &= fine_labels[k][:, None] <= fine_labels[k][None, :]
    if not (expected == fine.leq_matrix).all():
        a, b = map(int, np.argwhere(expected != fine.leq_matrix)[0])
        raise DoublingFailed(
            "order after doubling differs", witness=[_label(fine, a), _label(fine, b)]
        )
    return [(_label(coarse, lo), _label(coarse, hi)) for lo, hi in intervals]


def _label(lattice: FiniteLattice, k: int) -> str:
    item = lattice.labels[k]
    return item.code if isinstance(item, Bush) else str(item)


@lru_cache(maxsize=None)
def _sweak_lattice(s: SComposition) -> FiniteLattice:
    trees = sbase_service.enumerate(s, TREES)
    vectors = np.array([_tree_positions(t) for t in trees], dtype=np.int64).reshape(len(trees), -1)
    lattice = FiniteLattice.from_vectors(trees, vectors, name=f"W({s})")
    logger.info(f"Built s-weak order of s=({s}): {lattice.size} trees, {len(lattice.covers)} covers")
    return lattice


@lru_cache(maxsize=None)
def _facial_lattice(s: SComposition) -> FiniteLattice:
    bushes = sbase_service.enumerate(s, BUSHES)
    vectors = []
    for b in bushes:
        lp, rp = _facial_positions(b)
        vectors.append([-v for v in lp] + list(rp))
    vectors = np.array(vectors, dtype=np.int64).reshape(len(bushes), -1)
    lattice = FiniteLattice.from_vectors(bushes, vectors, name=f"FW({s})")
    logger.info(f"Built facial s-weak order of s=({s}): {lattice.size} bushes")
    return lattice


# Global service instance
lattice_service = LatticeService()
