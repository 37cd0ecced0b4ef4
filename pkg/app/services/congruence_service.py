"""
Congruence Service

Subarc order, the brute-force forcing oracle, enumeration of congruences as
down sets of arcs, quotient lattices, named congruence families and the
conjecture harness.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from app.core.config import settings
from app.core.exceptions import CapExceeded, InputError, InvalidDecoration, NotACongruence, NotADownSet
from app.models.arc import SArc, canonical_diagram
from app.models.bush import Bush, SComposition
from app.models.lattice import FiniteLattice, FinitePoset
from app.services.arc_service import arc_service
from app.services.lattice_service import lattice_service

logger = logging.getLogger(__name__)

DownSet = FrozenSet[SArc]

SYLVESTER = "sylvester"
RECOIL = "recoil"
BAXTER = "baxter"
RECTANGULATION = "rectangulation"
CAMBRIAN = "cambrian"
PERMUTREE = "permutree"
TWIST = "twist"

NONE = "none"
UP = "up"
DOWN = "down"
UPDOWN = "updown"
DECORATIONS = (NONE, UP, DOWN, UPDOWN)


@dataclass
class Congruence:
    """A lattice congruence of the s-weak order given by its down set of uncontracted arcs."""
    s: SComposition
    downset: DownSet
    lattice: FiniteLattice
    class_of: List[int]

    @property
    def classes(self) -> List[List[Bush]]:
        out: Dict[int, List[Bush]] = {}
        for k, c in enumerate(self.class_of):
            out.setdefault(c, []).append(self.lattice.labels[k])
        return [out[c] for c in sorted(out)]

    @property
    def size(self) -> int:
        return len(set(self.class_of))

    def contracts(self, lower: Bush, upper: Bush) -> bool:
        return self.class_of[self.lattice.index(lower)] == self.class_of[self.lattice.index(upper)]


@dataclass
class CongruenceInvariants:
    name: str
    cardinality: int
    f_vector: Tuple[int, ...]
    cover_graph: nx.Graph = field(repr=False)
    regular_arcs: bool = False
    cellularly_regular: Optional[bool] = None


@dataclass
class ConjectureReport:
    s: str
    family: str
    seed: int
    groups: Dict[str, List[CongruenceInvariants]]
    agreements: List[str] = field(default_factory=list)
    counterexamples: List[str] = field(default_factory=list)


class CongruenceService:
    """Service for congruences of the s-weak order."""

    # ------------------------------------------------------------------
    # Subarc order
    # ------------------------------------------------------------------

    def is_subarc(self, s: SComposition, alpha: SArc, beta: SArc) -> bool:
        """Whether alpha is a subarc of beta."""
        if not (beta.i <= alpha.i < alpha.j <= beta.j):
            return False
        if not (alpha.A <= beta.A and alpha.B <= beta.B):
            return False
        if s[alpha.j] == 0 and alpha.j != beta.j:
            return False
        if beta.i == alpha.i:
            return alpha.r == beta.r
        return (alpha.i in beta.A and alpha.r == 1) or (alpha.i in beta.B and alpha.r == s[alpha.i])

    def extensions(self, s: SComposition, alpha: SArc) -> List[SArc]:
        """
        One-step extensions of an arc. Moving the left endpoint skips the
        nodes with s_k = 0, which cannot start an arc.
        """
        out = []
        i, j, A, B, r = alpha.i, alpha.j, alpha.A, alpha.B, alpha.r
        if s[j] != 0 and j < s.n:
            out.append(SArc(i, j + 1, A | {j}, B, r))
            out.append(SArc(i, j + 1, A, B | {j}, r))
        previous = next((k for k in range(i - 1, 0, -1) if s[k] != 0), None)
        if previous is not None:
            for r2 in range(1, s[previous] + 1):
                if r == s[i]:
                    out.append(SArc(previous, j, A, B | {i}, r2))
                if r == 1:
                    out.append(SArc(previous, j, A | {i}, B, r2))
        return sorted(set(out), key=lambda a: a.sort_key)

    def subarc_poset(self, s: SComposition) -> FinitePoset:
        arcs = arc_service.all_arcs(s)
        return FinitePoset.from_relation(arcs, lambda a, b: self.is_subarc(s, a, b), name=f"subarcs({s})")

    def extension_digraph(self, s: SComposition) -> nx.DiGraph:
        graph = nx.DiGraph()
        arcs = arc_service.all_arcs(s)
        graph.add_nodes_from(arcs)
        for alpha in arcs:
            graph.add_edges_from((alpha, beta) for beta in self.extensions(s, alpha))
        return graph

    def is_downset(self, s: SComposition, arcs: Iterable[SArc]) -> bool:
        arcs = set(arcs)
        return all(
            beta in arcs
            for alpha in arcs
            for beta in arc_service.all_arcs(s)
            if self.is_subarc(s, beta, alpha)
        )

    def downward_closure(self, s: SComposition, arcs: Iterable[SArc]) -> DownSet:
        arcs = set(arcs)
        return frozenset(
            beta for beta in arc_service.all_arcs(s) if any(self.is_subarc(s, beta, alpha) for alpha in arcs)
        )

    def validate_downset(self, s: SComposition, arcs: Iterable[SArc]) -> DownSet:
        arcs = frozenset(arcs)
        for alpha in arcs:
            alpha.validate(s)
        if not self.is_downset(s, arcs):
            missing = self.downward_closure(s, arcs) - arcs
            raise NotADownSet(f"missing subarcs {[str(a) for a in canonical_diagram(missing)]}")
        return arcs

    # ------------------------------------------------------------------
    # Congruence closure on a finite lattice
    # ------------------------------------------------------------------

    def congruence_closure(self, lattice: FiniteLattice, pairs: Iterable[Tuple[int, int]]) -> List[int]:
        """
        Smallest congruence identifying the given pairs, as a class id per element.

        Worklist fixpoint: each newly identified pair a = b is propagated to
        a v z = b v z and a ^ z = b ^ z for every z, then classes are made convex.
        """
        size = lattice.size
        parent = list(range(size))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        worklist: List[Tuple[int, int]] = []

        def union(a: int, b: int) -> None:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
                worklist.append((a, b))

        for a, b in pairs:
            union(a, b)
        while worklist:
            while worklist:
                a, b = worklist.pop()
                for z in range(size):
                    union(lattice.join(a, z), lattice.join(b, z))
                    union(lattice.meet(a, z), lattice.meet(b, z))
            members: Dict[int, List[int]] = {}
            for a in range(size):
                members.setdefault(find(a), []).append(a)
            for group in members.values():
                if len(group) < 2:
                    continue
                bottom, top = lattice.meet_all(group), lattice.join_all(group)
                for c in lattice.interval(bottom, top):
                    union(group[0], c)
        roots = [find(a) for a in range(size)]
        ids: Dict[int, int] = {}
        return [ids.setdefault(root, len(ids)) for root in roots]

    def respects_operations(self, lattice: FiniteLattice, class_of: Sequence[int]) -> bool:
        """Direct check that joins and meets are well defined on classes."""
        size = lattice.size
        reps: Dict[int, int] = {}
        for a, c in enumerate(class_of):
            reps.setdefault(c, a)
        for a in range(size):
            b = reps[class_of[a]]
            if a == b:
                continue
            for z in range(size):
                if class_of[lattice.join(a, z)] != class_of[lattice.join(b, z)]:
                    return False
                if class_of[lattice.meet(a, z)] != class_of[lattice.meet(b, z)]:
                    return False
        return True

    def forcing_bruteforce(self, s: SComposition, cap: Optional[int] = None) -> Set[Tuple[SArc, SArc]]:
        """
        Pairs (alpha, beta) such that contracting t_join(alpha) with its unique
        lower cover contracts t_join(beta) with its own.

        Raises:
            CapExceeded: if s has more arcs than the cap
        """
        cap = cap or settings.forcing_arc_cap
        arcs = arc_service.all_arcs(s)
        if len(arcs) > cap:
            raise CapExceeded("arcs for the forcing oracle", len(arcs), cap)
        lattice = lattice_service.sweak_lattice(s)
        irreducible = {}
        for alpha in arcs:
            k = lattice.index(arc_service.t_join(s, alpha))
            lowers = lattice.lower_covers(k)
            if len(lowers) != 1:
                raise NotACongruence(f"t_join({alpha}) has {len(lowers)} lower covers")
            irreducible[alpha] = (k, lowers[0])
        relation = set()
        for alpha in arcs:
            class_of = self.congruence_closure(lattice, [irreducible[alpha]])
            for beta in arcs:
                k, low = irreducible[beta]
                if class_of[k] == class_of[low]:
                    relation.add((alpha, beta))
        logger.info(f"Forcing relation of s=({s}): {len(relation)} pairs on {len(arcs)} arcs")
        return relation

    # ------------------------------------------------------------------
    # Down sets and congruences
    # ------------------------------------------------------------------

    def all_congruences(self, s: SComposition, cap: Optional[int] = None) -> List[DownSet]:
        """
        All down sets of the subarc order.

        Raises:
            CapExceeded: if s has more arcs than the cap
        """
        cap = cap or settings.arc_cap
        poset = self.subarc_poset(s)
        if poset.size > cap:
            raise CapExceeded("arcs for congruence enumeration", poset.size, cap)
        # a linear extension: subarcs come first
        order = sorted(range(poset.size), key=lambda a: (bin(poset.down_masks[a]).count("1"), a))
        below = [[b for b in range(poset.size) if poset.lt(b, a)] for a in range(poset.size)]
        out: List[DownSet] = []

        def walk(k: int, chosen: Set[int]) -> None:
            if k == len(order):
                out.append(frozenset(poset.labels[a] for a in chosen))
                return
            a = order[k]
            walk(k + 1, chosen)
            if all(b in chosen for b in below[a]):
                chosen.add(a)
                walk(k + 1, chosen)
                chosen.remove(a)

        walk(0, set())
        out.sort(key=lambda d: (len(d), canonical_diagram(d)))
        logger.info(f"s=({s}) has {len(out)} congruences")
        return out

    def congruence_from_downset(self, s: SComposition, downset: Iterable[SArc]) -> Congruence:
        """
        Contract every cover of the s-weak order whose rotation arc is outside the down set.

        Raises:
            NotADownSet: if the arcs are not closed under subarcs
            NotACongruence: if the resulting partition fails the congruence axioms
        """
        downset = self.validate_downset(s, downset)
        lattice = lattice_service.sweak_lattice(s)
        graph = nx.Graph()
        graph.add_nodes_from(range(lattice.size))
        for a, b in lattice.covers:
            upper = lattice.labels[b]
            pair = lattice_service.rotation_label(lattice.labels[a], upper)
            if pair is None:
                raise NotACongruence(f"cover {lattice.labels[a].code} < {upper.code} is not a rotation")
            if arc_service.alpha_join(upper, *pair) not in downset:
                graph.add_edge(a, b)
        class_of = [0] * lattice.size
        for c, component in enumerate(sorted(nx.connected_components(graph), key=min)):
            for a in component:
                class_of[a] = c
        if not lattice.is_congruence(class_of):
            raise NotACongruence(f"contracting outside {len(downset)} arcs does not give a congruence")
        logger.debug(f"Down set of {len(downset)} arcs gives {len(set(class_of))} classes")
        return Congruence(s, downset, lattice, class_of)

    def quotient(self, congruence: Congruence) -> FiniteLattice:
        quotient, _ = congruence.lattice.quotient(congruence.class_of, name=f"W({congruence.s})/~")
        return quotient

    def uncontracted_arcs(self, congruence: Congruence) -> DownSet:
        """Arcs whose join-irreducible tree is not contracted with its lower cover."""
        lattice = congruence.lattice
        out = set()
        for alpha in arc_service.all_arcs(congruence.s):
            k = lattice.index(arc_service.t_join(congruence.s, alpha))
            if congruence.class_of[k] != congruence.class_of[lattice.lower_covers(k)[0]]:
                out.add(alpha)
        return frozenset(out)

    # ------------------------------------------------------------------
    # Named families
    # ------------------------------------------------------------------

    def named_downset(
        self,
        s: SComposition,
        family: str,
        alpha: Optional[SArc] = None,
        decoration: Optional[Sequence[str]] = None,
        p: Optional[int] = None,
    ) -> DownSet:
        """
        Down set of a named congruence family.

        Raises:
            InvalidDecoration: for a malformed permutree decoration
            InputError: for an unknown family or a missing parameter
        """
        arcs = arc_service.all_arcs(s)
        if family == SYLVESTER:
            chosen = [a for a in arcs if a.is_right]
        elif family == RECOIL:
            chosen = [a for a in arcs if not a.A and not a.B]
        elif family == BAXTER:
            chosen = [a for a in arcs if a.is_left or a.is_right]
        elif family == RECTANGULATION:
            chosen = [a for a in arcs if self._blocks(s, a)]
        elif family == TWIST:
            if p is None or p < 0:
                raise InputError("the twist family needs p >= 0")
            chosen = [a for a in arcs if len(a.B) <= p]
        elif family == CAMBRIAN:
            if alpha is None:
                raise InputError("the cambrian family needs an arc")
            alpha.validate(s)
            chosen = [a for a in arcs if self.is_subarc(s, a, alpha)]
        elif family == PERMUTREE:
            deco = self.validate_decoration(s, decoration)
            no_left = {k for k in range(1, s.n + 1) if deco[k - 1] in (UP, UPDOWN)}
            no_right = {k for k in range(1, s.n + 1) if deco[k - 1] in (DOWN, UPDOWN)}
            chosen = [a for a in arcs if not (a.A & no_left) and not (a.B & no_right)]
        else:
            raise InputError(f"unknown congruence family {family!r}")
        chosen = frozenset(chosen)
        if not self.is_downset(s, chosen):
            logger.warning(f"{family} arcs of s=({s}) are not closed under subarcs; using the closure")
            chosen = self.downward_closure(s, chosen)
        return chosen

    def named_downsets(self, s: SComposition) -> Dict[str, DownSet]:
        """The parameter-free families."""
        return {name: self.named_downset(s, name) for name in (SYLVESTER, RECOIL, BAXTER, RECTANGULATION)}

    def _blocks(self, s: SComposition, alpha: SArc) -> bool:
        interior = s.nonzero_between(alpha.i, alpha.j)
        for part in (alpha.A, alpha.B):
            where = [k for k, node in enumerate(interior) if node in part]
            if where and where[-1] - where[0] + 1 != len(where):
                return False
        return True

    def validate_decoration(self, s: SComposition, decoration: Optional[Sequence[str]]) -> Tuple[str, ...]:
        if decoration is None or len(decoration) != s.n:
            raise InvalidDecoration(f"decoration must have {s.n} entries")
        out = []
        for k, d in enumerate(decoration, start=1):
            d = d.strip().lower()
            if d not in DECORATIONS:
                raise InvalidDecoration(f"unknown decoration {d!r} at node {k}")
            if s[k] == 0 and d != NONE:
                raise InvalidDecoration(f"node {k} has s_{k} = 0 and cannot be decorated")
            out.append(d)
        return tuple(out)

    # ------------------------------------------------------------------
    # Regularity and invariants
    # ------------------------------------------------------------------

    def cellularly_regular(self, lattice: FiniteLattice) -> bool:
        return lattice.is_cellularly_regular()

    def regularity(self, s: SComposition, downset: Iterable[SArc]) -> bool:
        """Every minimal arc outside the down set is a left or a right arc."""
        downset = set(downset)
        outside = [a for a in arc_service.all_arcs(s) if a not in downset]
        minimal = [a for a in outside if not any(b != a and self.is_subarc(s, b, a) for b in outside)]
        return all(a.is_left or a.is_right for a in minimal)

    def cover_graphs_isomorphic(self, first: FiniteLattice, second: FiniteLattice) -> bool:
        g1, g2 = first.cover_graph(), second.cover_graph()
        if g1.number_of_nodes() != g2.number_of_nodes() or g1.number_of_edges() != g2.number_of_edges():
            return False
        if nx.weisfeiler_lehman_graph_hash(g1) != nx.weisfeiler_lehman_graph_hash(g2):
            return False
        return nx.is_isomorphic(g1, g2)

    def invariants(self, s: SComposition, downset: DownSet, name: str, cellular: bool = False) -> CongruenceInvariants:
        quotient = self.quotient(self.congruence_from_downset(s, downset))
        return CongruenceInvariants(
            name=name,
            cardinality=quotient.size,
            f_vector=arc_service.f_vector(s, canonical_diagram(downset)),
            cover_graph=quotient.cover_graph(),
            regular_arcs=self.regularity(s, downset),
            cellularly_regular=self.cellularly_regular(quotient) if cellular else None,
        )

    def conjecture_report(
        self,
        s: SComposition,
        family: str,
        decorations: Optional[Sequence[Sequence[str]]] = None,
    ) -> ConjectureReport:
        """
        Collect evidence for the cambrian, permutree or regular conjectures.

        Disagreements are recorded as counterexamples; nothing is asserted.
        """
        groups: Dict[str, List[CongruenceInvariants]] = {}
        if family == CAMBRIAN:
            for alpha in arc_service.all_arcs(s):
                down = self.named_downset(s, CAMBRIAN, alpha=alpha)
                groups.setdefault(f"({alpha.i},{alpha.j})", []).append(self.invariants(s, down, str(alpha)))
        elif family == PERMUTREE:
            for deco in decorations or self._all_decorations(s):
                deco = self.validate_decoration(s, deco)
                down = self.named_downset(s, PERMUTREE, decoration=deco)
                shape = ",".join("x" if d in (UP, DOWN) else d for d in deco)
                groups.setdefault(shape, []).append(self.invariants(s, down, ",".join(deco)))
        elif family == "regular":
            for k, down in enumerate(self.all_congruences(s)):
                groups.setdefault("all", []).append(self.invariants(s, down, f"D{k}", cellular=True))
        else:
            raise InputError(f"unknown conjecture family {family!r}")

        report = ConjectureReport(str(s), family, settings.seed, groups)
        for key, members in groups.items():
            if family == "regular":
                for inv in members:
                    if inv.cellularly_regular != inv.regular_arcs:
                        report.counterexamples.append(f"{inv.name}: cellular={inv.cellularly_regular} arcs={inv.regular_arcs}")
                continue
            first = members[0]
            agree = True
            for other in members[1:]:
                if (other.cardinality, other.f_vector) != (first.cardinality, first.f_vector):
                    report.counterexamples.append(f"{key}: {first.name} vs {other.name} differ in size or f-vector")
                    agree = False
                elif family == CAMBRIAN and not nx.is_isomorphic(first.cover_graph, other.cover_graph):
                    report.counterexamples.append(f"{key}: {first.name} vs {other.name} cover graphs differ")
                    agree = False
            if agree:
                report.agreements.append(key)
        if family == "regular" and not report.counterexamples:
            report.agreements.append("all")
        logger.info(
            f"Conjecture {family} on s=({s}): {len(report.agreements)} agreeing groups, "
            f"{len(report.counterexamples)} counterexamples"
        )
        return report

    def _all_decorations(self, s: SComposition) -> Iterable[Tuple[str, ...]]:
        nonzero = [k for k in range(1, s.n + 1) if s[k] != 0]
        if 4 ** len(nonzero) > settings.enumeration_cap:
            raise CapExceeded("decorations", 4 ** len(nonzero), settings.enumeration_cap)
        for values in itertools.product(DECORATIONS, repeat=len(nonzero)):
            deco = [NONE] * s.n
            for k, d in zip(nonzero, values):
                deco[k - 1] = d
            yield tuple(deco)


# Global service instance
congruence_service = CongruenceService()
