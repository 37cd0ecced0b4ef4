import networkx as nx
import pytest

from app.core.exceptions import CapExceeded, InputError, InvalidDecoration, NotADownSet
from app.models.arc import SArc
from app.models.bush import SComposition
from app.services.arc_service import arc_service
from app.services.congruence_service import (
    BAXTER,
    CAMBRIAN,
    NONE,
    PERMUTREE,
    RECOIL,
    RECTANGULATION,
    SYLVESTER,
    TWIST,
    UP,
    congruence_service,
)
from app.services.sbase_service import TREES, sbase_service


class TestSubarcs:
    def test_examples(self, s120):
        assert congruence_service.is_subarc(s120, SArc.of(2, 3, r=1), SArc.of(1, 3, A=[2]))
        assert congruence_service.is_subarc(s120, SArc.of(2, 3, r=2), SArc.of(1, 3, B=[2]))
        assert not congruence_service.is_subarc(s120, SArc.of(2, 3, r=2), SArc.of(1, 3, A=[2]))
        assert congruence_service.is_subarc(s120, SArc.of(1, 2), SArc.of(1, 3, B=[2]))

    def test_extensions_generate_subarc_order(self, s120, s210):
        for s in (s120, s210):
            graph = congruence_service.extension_digraph(s)
            arcs = arc_service.all_arcs(s)
            for alpha in arcs:
                for beta in arcs:
                    if alpha == beta:
                        continue
                    reachable = beta in nx.descendants(graph, alpha)
                    assert reachable == congruence_service.is_subarc(s, alpha, beta)

    def test_extension_endpoint_skips_zero(self):
        s = SComposition.of(1, 0, 1, 1)
        ext = congruence_service.extensions(s, SArc.of(3, 4))
        assert SArc.of(1, 4, A=[3]) in ext
        assert all(a.i != 2 for a in ext)


class TestDownSets:
    def test_thirteen(self, s120):
        downsets = congruence_service.all_congruences(s120)
        assert len(downsets) == 13
        assert frozenset() in downsets
        assert frozenset(arc_service.all_arcs(s120)) in downsets

    def test_cap(self, s1111):
        with pytest.raises(CapExceeded):
            congruence_service.all_congruences(s1111, cap=5)

    def test_not_a_downset(self, s120):
        with pytest.raises(NotADownSet):
            congruence_service.validate_downset(s120, [SArc.of(1, 3, A=[2])])
        closure = congruence_service.downward_closure(s120, [SArc.of(1, 3, A=[2])])
        assert closure == {SArc.of(1, 3, A=[2]), SArc.of(1, 2), SArc.of(2, 3, r=1)}

    def test_round_trip(self, s120):
        for downset in congruence_service.all_congruences(s120):
            congruence = congruence_service.congruence_from_downset(s120, downset)
            assert congruence_service.uncontracted_arcs(congruence) == downset

    def test_extremes(self, s120):
        full = congruence_service.congruence_from_downset(s120, arc_service.all_arcs(s120))
        assert full.size == sbase_service.count(s120, TREES)
        assert congruence_service.congruence_from_downset(s120, []).size == 1

    def test_forcing_is_subarc_order(self, s120):
        arcs = arc_service.all_arcs(s120)
        expected = {(a, b) for a in arcs for b in arcs if congruence_service.is_subarc(s120, a, b)}
        assert congruence_service.forcing_bruteforce(s120) == expected

    def test_congruence_closure_respects_operations(self, s210):
        from app.services.lattice_service import lattice_service

        lattice = lattice_service.sweak_lattice(s210)
        class_of = congruence_service.congruence_closure(lattice, [lattice.covers[0]])
        assert lattice.is_congruence(class_of)
        assert congruence_service.respects_operations(lattice, class_of)


class TestNamedFamilies:
    @pytest.mark.parametrize(
        "values, family, classes",
        [
            ((1, 1, 1), SYLVESTER, 5),
            ((1, 1, 1, 1), SYLVESTER, 14),
            ((1, 1, 1, 1), RECOIL, 8),
            ((1, 1, 1, 1), BAXTER, 22),
        ],
    )
    def test_classical_counts(self, values, family, classes):
        s = SComposition(values)
        downset = congruence_service.named_downset(s, family)
        assert congruence_service.congruence_from_downset(s, downset).size == classes

    def test_twist_zero_is_sylvester(self, s1111):
        assert congruence_service.named_downset(s1111, TWIST, p=0) == congruence_service.named_downset(s1111, SYLVESTER)
        with pytest.raises(InputError):
            congruence_service.named_downset(s1111, TWIST)

    def test_cambrian(self, s120):
        alpha = SArc.of(1, 3, B=[2])
        down = congruence_service.named_downset(s120, CAMBRIAN, alpha=alpha)
        assert down == {alpha, SArc.of(1, 2), SArc.of(2, 3, r=2)}

    def test_permutree(self, s111):
        free = congruence_service.named_downset(s111, PERMUTREE, decoration=[NONE] * 3)
        assert free == frozenset(arc_service.all_arcs(s111))
        up = congruence_service.named_downset(s111, PERMUTREE, decoration=[UP] * 3)
        assert congruence_service.congruence_from_downset(s111, up).size == 5

    def test_bad_decorations(self, s120):
        with pytest.raises(InvalidDecoration):
            congruence_service.validate_decoration(s120, [NONE, NONE])
        with pytest.raises(InvalidDecoration):
            congruence_service.validate_decoration(s120, [NONE, NONE, UP])
        with pytest.raises(InvalidDecoration):
            congruence_service.validate_decoration(s120, [NONE, "sideways", NONE])

    def test_unknown_family(self, s120):
        with pytest.raises(InputError):
            congruence_service.named_downset(s120, "tamari-ish")

    def test_named_downsets(self, s111):
        named = congruence_service.named_downsets(s111)
        assert set(named) == {SYLVESTER, RECOIL, BAXTER, RECTANGULATION}
        assert named[SYLVESTER] == congruence_service.named_downset(s111, SYLVESTER)
        for downset in named.values():
            assert congruence_service.is_downset(s111, downset)


class TestConjectures:
    def test_sylvester_regular(self, s1111):
        assert congruence_service.regularity(s1111, congruence_service.named_downset(s1111, SYLVESTER))

    def test_tamari_and_dual(self, s111):
        right = congruence_service.named_downset(s111, SYLVESTER)
        left = congruence_service.named_downset(s111, PERMUTREE, decoration=[UP] * 3)
        first = congruence_service.quotient(congruence_service.congruence_from_downset(s111, right))
        second = congruence_service.quotient(congruence_service.congruence_from_downset(s111, left))
        assert congruence_service.cover_graphs_isomorphic(first, second)

    def test_report_groups(self, s120):
        report = congruence_service.conjecture_report(s120, CAMBRIAN)
        assert set(report.agreements) | {c.split(":")[0] for c in report.counterexamples} == set(report.groups)
        assert report.seed == 0
