"""
Check Service

Runs the acceptance checks for one composition, or for the whole desk-scale
suite, and collects the outcomes in a report. A failing check is recorded with
its diagnostic; nothing is retried.
"""

import itertools
import logging
from typing import Callable, Dict, List, Optional, Sequence

from app.core.config import settings
from app.core.exceptions import InputError, InvariantViolation
from app.core.rational import to_fraction
from app.models.bush import SComposition
from app.schemas.run import CheckReportSchema, CheckResultSchema
from app.services.arc_service import arc_service
from app.services.congruence_service import PERMUTREE, SYLVESTER, congruence_service
from app.services.geometry_service import geometry_service
from app.services.insertion_service import insertion_service
from app.services.lattice_service import lattice_service
from app.services.sbase_service import BUSHES, TREES, TRUNKS, sbase_service
from app.services.shardoplex_service import shardoplex_service
from app.services.tropical_service import tropical_service

logger = logging.getLogger(__name__)

ALL = "all"

# Worked insertion example: point, holes and the closed fiber.
WORKED_S = (1, 2, 2, 0, 2, 2, 1, 2, 1)
WORKED_X = ("5", "6", "3", "5", "4", "4", "5.5", "1.5", "0.25")
WORKED_EQUALITIES = {(2, 4, 1), (1, 5, 1), (5, 6, 0)}
WORKED_UPPER = {(1, 2, 0), (4, 7, 0), (3, 9, 3)}
WORKED_LOWER = {(2, 7, 0), (5, 8, 2), (8, 9, 1)}

ANCHOR_S = (1, 1, 2, 2, 1, 1)
ANCHOR_DECORATIONS = (
    ("up", "up", "up", "up", "up", "up"),
    ("up", "up", "up", "down", "up", "up"),
)
ANCHOR_CARDINALITY = 331
ANCHOR_F_VECTOR = (1, 20, 93, 139, 69, 9)

EXTRA_DESK = ((1, 1, 1, 1), (1, 2, 0), (2, 1, 0), (1, 1, 2, 1), (2, 1, 0, 1))


def desk_compositions() -> List[SComposition]:
    """All s with n <= 3 and entries <= 3, followed by the extra suite members."""
    seen = []
    for n in range(1, 4):
        for values in itertools.product(range(4), repeat=n):
            seen.append(values)
    for values in EXTRA_DESK:
        if values not in seen:
            seen.append(values)
    return [SComposition(v) for v in seen]


class CheckService:
    """Service running the acceptance checks."""

    def __init__(self):
        self.suites: Dict[str, Callable[[SComposition], List[CheckResultSchema]]] = {
            "counting": self.check_counting,
            "fibers": self.check_fibers,
            "lattice": self.check_lattice,
            "dual": self.check_dual_graph,
            "canonical": self.check_canonical,
            "forcing": self.check_forcing,
            "quotients": self.check_quotients,
            "tropical": self.check_tropical,
            "zonotope": self.check_zonotope,
            "anchor": self.check_anchor,
            "classical": self.check_classical,
            "doubling": self.check_doubling,
        }

    def run(self, s: SComposition, suite: str = ALL) -> CheckReportSchema:
        """
        Run one suite (or all of them) on s.

        Raises:
            InputError: for an unknown suite name
            CapExceeded: if a check would enumerate past a cap
        """
        names = self._suite_names(suite)
        results: List[CheckResultSchema] = []
        for name in names:
            logger.info(f"Running {name} checks on s=({s})")
            results.extend(self.suites[name](s))
        report = CheckReportSchema(
            s=str(s), suite=suite, seed=settings.seed, passed=all(r.passed for r in results), results=results
        )
        logger.info(f"Checks on s=({s}): {sum(r.passed for r in results)}/{len(results)} passed")
        return report

    def run_desk(self, suite: str = ALL, compositions: Optional[Sequence[SComposition]] = None) -> List[CheckReportSchema]:
        return [self.run(s, suite) for s in (compositions or desk_compositions())]

    def _suite_names(self, suite: str) -> List[str]:
        if suite == ALL:
            return list(self.suites)
        names = [p.strip() for p in suite.split(",") if p.strip()]
        unknown = [p for p in names if p not in self.suites]
        if unknown or not names:
            raise InputError(f"unknown suite {suite!r}; choose from {', '.join(self.suites)} or {ALL}")
        return names

    def _result(self, criterion: int, name: str, s: SComposition, passed: bool, detail: str = "") -> CheckResultSchema:
        if not passed:
            logger.warning(f"Check {name} failed on s=({s}): {detail}")
        return CheckResultSchema(criterion=criterion, name=name, s=str(s), passed=bool(passed), detail=detail)

    def _guarded(self, criterion: int, name: str, s: SComposition, body: Callable[[], tuple]) -> CheckResultSchema:
        """Run a check; an invariant violation becomes a failed result with its diagnostic."""
        try:
            passed, detail = body()
        except InvariantViolation as e:
            witness = getattr(e, "witness", None)
            detail = f"{type(e).__name__}: {e}" + (f" (witness {witness})" if witness is not None else "")
            return self._result(criterion, name, s, False, detail)
        return self._result(criterion, name, s, passed, detail)

    # ------------------------------------------------------------------
    # 1. Counting identities
    # ------------------------------------------------------------------

    def check_counting(self, s: SComposition) -> List[CheckResultSchema]:
        out = []
        for kind in (TREES, TRUNKS):
            listed = len(sbase_service.enumerate(s, kind))
            expected = sbase_service.count(s, kind)
            out.append(self._result(1, f"count_{kind}", s, listed == expected, f"{listed} listed, {expected} by formula"))
        listed = len(arc_service.all_arcs(s))
        expected = arc_service.count_arcs(s)
        out.append(self._result(1, "count_arcs", s, listed == expected, f"{listed} listed, {expected} by formula"))
        return out

    # ------------------------------------------------------------------
    # 2. Fibers partition the space
    # ------------------------------------------------------------------

    def check_fibers(self, s: SComposition) -> List[CheckResultSchema]:
        return [
            self._guarded(2, "fiber_partition", s, lambda: self._partition(s)),
            self._guarded(2, "worked_example", s, self._worked_example),
        ]

    def _partition(self, s: SComposition):
        fibers = {b: insertion_service.fiber(b) for b in sbase_service.enumerate(s, BUSHES)}
        points = geometry_service.sample_points(s.n)
        for x in points:
            b = insertion_service.insert(s, x)
            owners = [c for c, fiber in fibers.items() if fiber.contains_in_relative_interior(x)]
            if owners != [b]:
                found = ", ".join(c.code for c in owners)
                return False, f"point {tuple(map(str, x))} inserts to {b.code}, open fibers: {found}"
        return True, f"{len(points)} points, seed {settings.seed}"

    def _worked_example(self):
        s = SComposition(WORKED_S)
        b = insertion_service.insert(s, [to_fraction(v) for v in WORKED_X])
        fiber = insertion_service.fiber_hrep(b)
        got = (set(fiber.equalities), set(fiber.upper), set(fiber.lower))
        expected = (WORKED_EQUALITIES, WORKED_UPPER, WORKED_LOWER)
        return got == expected, f"{b.code}: " + "; ".join(fiber.rows())

    # ------------------------------------------------------------------
    # 3. Lattice and the join formula
    # ------------------------------------------------------------------

    def check_lattice(self, s: SComposition) -> List[CheckResultSchema]:
        lattice = lattice_service.sweak_lattice(s)
        is_lattice = lattice.is_lattice()
        out = [self._result(3, "is_lattice", s, is_lattice, f"{lattice.size} elements")]
        if not is_lattice:
            return out
        trees = lattice.labels
        bad = [
            (t, u)
            for t, u in itertools.combinations(trees, 2)
            if lattice_service.join(t, u) != lattice_service.brute_join(t, u)
        ]
        detail = f"{len(trees) * (len(trees) - 1) // 2} pairs"
        if bad:
            detail = f"join formula differs on {bad[0][0].code}, {bad[0][1].code}"
        out.append(self._result(3, "join_formula", s, not bad, detail))
        return out

    # ------------------------------------------------------------------
    # 4. Dual graph of the foam
    # ------------------------------------------------------------------

    def check_dual_graph(self, s: SComposition) -> List[CheckResultSchema]:
        def body():
            foam = geometry_service.foam(s)
            ok = geometry_service.check_complex(foam) and geometry_service.dual_matches_lattice(
                foam, lattice_service.sweak_lattice(s)
            )
            return ok, f"f-vector {foam.f_vector}"
        return [self._guarded(4, "dual_graph", s, body)]

    # ------------------------------------------------------------------
    # 5. Canonical join representations
    # ------------------------------------------------------------------

    def check_canonical(self, s: SComposition) -> List[CheckResultSchema]:
        lattice = lattice_service.sweak_lattice(s)
        failures = []
        for k, t in enumerate(lattice.labels):
            diagram = arc_service.delta_join(t)
            if arc_service.tree_from_diagram(s, diagram) != t:
                failures.append(f"{t.code}: diagram does not round-trip")
                continue
            joined = lattice.join_all(lattice.index(arc_service.t_join(s, a)) for a in diagram) if diagram else lattice.bottom
            if joined != k:
                failures.append(f"{t.code}: join of its arcs is {lattice.labels[joined].code}")
            brute = lattice.canonical_join_representation(k) or []
            if sorted(b.code for b in arc_service.canonical_join_rep(t)) != sorted(lattice.labels[j].code for j in brute):
                failures.append(f"{t.code}: differs from the brute-force representation")
        diagrams = len(arc_service.noncrossing_diagrams(s))
        return [
            self._result(5, "canonical_join", s, not failures, failures[0] if failures else f"{lattice.size} trees"),
            self._result(5, "noncrossing_count", s, diagrams == lattice.size, f"{diagrams} diagrams, {lattice.size} trees"),
        ]

    # ------------------------------------------------------------------
    # 6. Forcing equals the subarc order
    # ------------------------------------------------------------------

    def check_forcing(self, s: SComposition) -> List[CheckResultSchema]:
        arcs = arc_service.all_arcs(s)
        out = []
        if len(arcs) <= settings.forcing_arc_cap:
            def body():
                forcing = congruence_service.forcing_bruteforce(s)
                subarc = {(a, b) for a in arcs for b in arcs if congruence_service.is_subarc(s, a, b)}
                diff = forcing ^ subarc
                detail = f"{len(subarc)} pairs" if not diff else f"{len(diff)} pairs differ, e.g. {tuple(map(str, next(iter(diff))))}"
                return not diff, detail
            out.append(self._guarded(6, "forcing", s, body))
        if s.values == (1, 2, 0):
            count = len(congruence_service.all_congruences(s))
            out.append(self._result(6, "congruence_count", s, count == 13, f"{count} congruences"))
        return out

    # ------------------------------------------------------------------
    # 7. Quotient realizations
    # ------------------------------------------------------------------

    def _downsets_for_quotients(self, s: SComposition):
        downsets = congruence_service.all_congruences(s)
        if len(downsets) <= settings.quotient_check_limit:
            return [(f"D{k}", d) for k, d in enumerate(downsets)]
        named = congruence_service.named_downsets(s)
        named["trivial"] = frozenset(arc_service.all_arcs(s))
        return sorted(named.items())

    def check_quotients(self, s: SComposition) -> List[CheckResultSchema]:
        if len(arc_service.all_arcs(s)) > settings.arc_cap:
            return []
        out = []
        for name, downset in self._downsets_for_quotients(s):
            out.append(self._guarded(7, f"quotient[{name}]", s, lambda d=downset: self._quotient(s, d)))
        return out

    def _quotient(self, s: SComposition, downset):
        congruence = congruence_service.congruence_from_downset(s, downset)
        quotient = congruence_service.quotient(congruence)
        qfoam = geometry_service.foam_of_congruence(congruence)
        if not geometry_service.check_walls(s, downset, qfoam):
            return False, "quotient foam walls differ from the shards of the down set"
        if not geometry_service.dual_matches_lattice(qfoam, quotient):
            return False, "dual graph of the quotient foam differs from the quotient Hasse diagram"
        complex_ = shardoplex_service.quotientoplex(s, downset)
        if not shardoplex_service.skeleton_matches_quotient(s, complex_):
            return False, "quotientoplex skeleton differs from the quotient Hasse diagram"
        duality = tropical_service.quotientoplex_duality(s, complex_)
        if not duality.ok:
            return False, f"face duality failed: {duality}"
        return True, f"{quotient.size} classes, quotientoplex f-vector {complex_.f_vector}"

    # ------------------------------------------------------------------
    # 8. Tropical hypersurfaces of arcs
    # ------------------------------------------------------------------

    def check_tropical(self, s: SComposition) -> List[CheckResultSchema]:
        out = []
        for alpha in arc_service.all_arcs(s):
            def body(alpha=alpha):
                report = tropical_service.hypersurface_vs_shards(s, alpha)
                if not report.ok:
                    return False, f"uncovered walls {report.uncovered}"
                if not tropical_service.check_minimal_cell(s, alpha):
                    return False, "minimal cell differs"
                return tropical_service.trivial_subdivision_check(s, alpha), f"{len(report.walls)} walls"
            out.append(self._guarded(8, f"tropical[{alpha}]", s, body))
        return out

    # ------------------------------------------------------------------
    # 9. Zonotope support
    # ------------------------------------------------------------------

    def check_zonotope(self, s: SComposition) -> List[CheckResultSchema]:
        if s.n > 4 or not arc_service.all_arcs(s):
            return []
        factors = shardoplex_service.dilation_factors(s)
        detail = " + ".join(f"{c}[0,e{i}-e{j}]" for (i, j), c in sorted(factors.items()) if c)
        return [self._guarded(9, "zonotope_support", s, lambda: (shardoplex_service.zonotope_support_check(s), detail))]

    # ------------------------------------------------------------------
    # 10. Permutree anchor
    # ------------------------------------------------------------------

    def check_anchor(self, s: SComposition) -> List[CheckResultSchema]:
        if s.values != ANCHOR_S:
            return []

        def body():
            quotients, f_vectors = [], []
            for deco in ANCHOR_DECORATIONS:
                down = congruence_service.named_downset(s, PERMUTREE, decoration=deco)
                quotients.append(congruence_service.quotient(congruence_service.congruence_from_downset(s, down)))
                f_vectors.append(arc_service.f_vector(s, sorted(down)))
            sizes = [q.size for q in quotients]
            isomorphic = congruence_service.cover_graphs_isomorphic(*quotients)
            ok = (
                sizes == [ANCHOR_CARDINALITY] * 2
                and all(tuple(f) == ANCHOR_F_VECTOR for f in f_vectors)
                and not isomorphic
            )
            return ok, f"sizes {sizes}, f-vectors {f_vectors}, isomorphic {isomorphic}"
        return [self._guarded(10, "permutree_anchor", s, body)]

    # ------------------------------------------------------------------
    # 11. Classical specializations
    # ------------------------------------------------------------------

    def check_classical(self, s: SComposition) -> List[CheckResultSchema]:
        if any(v != 1 for v in s.values):
            return []
        n = s.n
        factorial = 1
        catalan = 1
        for k in range(1, n + 1):
            factorial *= k
        for k in range(n):
            catalan = catalan * 2 * (2 * k + 1) // (k + 2)
        lattice = lattice_service.sweak_lattice(s)
        arcs = len(arc_service.all_arcs(s))
        expected_arcs = sum(2 ** (j - i - 1) for i in range(1, n + 1) for j in range(i + 1, n + 1))
        down = congruence_service.named_downset(s, SYLVESTER)
        sylvester = congruence_service.congruence_from_downset(s, down).size
        return [
            self._result(11, "weak_order", s, lattice.size == factorial, f"{lattice.size} elements"),
            self._result(11, "arcs", s, arcs == expected_arcs, f"{arcs} arcs"),
            self._result(11, "sylvester", s, sylvester == catalan, f"{sylvester} classes"),
        ]

    # ------------------------------------------------------------------
    # 12. Interval doublings
    # ------------------------------------------------------------------

    def check_doubling(self, s: SComposition) -> List[CheckResultSchema]:
        def body():
            report = lattice_service.verify_doubling_sequence(s)
            return report.ok, f"{len(report.steps)} steps"
        return [self._guarded(12, "doubling", s, body)]


# Global service instance
check_service = CheckService()
