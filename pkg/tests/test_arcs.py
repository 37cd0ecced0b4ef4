import itertools

import pytest

from app.core.exceptions import CrossingDiagram, InputError, NotComparable
from app.models.arc import SArc
from app.models.bush import SComposition
from app.services.arc_service import arc_service
from app.services.lattice_service import lattice_service
from app.services.sbase_service import TREES, sbase_service


class TestArcs:
    @pytest.mark.parametrize("values, count", [((1, 2, 0), 5), ((1, 1, 1, 1), 11), ((0, 1), 0), ((2, 1, 0), 7)])
    def test_counts(self, values, count):
        s = SComposition(values)
        assert arc_service.count_arcs(s) == count
        assert len(arc_service.all_arcs(s)) == count

    def test_validation(self, s111):
        assert SArc.of(1, 3, [2]).validate(s111) == SArc.of(1, 3, A=[2])
        with pytest.raises(InputError):
            SArc.of(1, 3, [2], [2]).validate(s111)
        with pytest.raises(InputError):
            SArc.of(1, 3).validate(s111)
        with pytest.raises(InputError):
            SArc.of(1, 2, r=2).validate(s111)
        with pytest.raises(InputError):
            SArc.of(3, 4).validate(s111)

    def test_str(self):
        assert str(SArc.of(1, 3, B=[2])) == "(1,3,{},{2},1)"

    def test_sides(self):
        assert SArc.of(1, 3, A=[2]).is_right
        assert SArc.of(1, 3, B=[2]).is_left


class TestIrreducibles:
    def test_join_irreducibles(self, s120, s210):
        for s in (s120, s210):
            lattice = lattice_service.sweak_lattice(s)
            trees = arc_service.join_irreducibles(s)
            assert sorted(lattice.index(t) for t in trees.values()) == sorted(lattice.join_irreducibles)
            for alpha, t in trees.items():
                assert arc_service.delta_join(t) == (alpha,)
                assert lattice_service.positions(t) == arc_service.positions_from_arc(s, alpha)

    def test_meet_irreducibles(self, s120, s210):
        for s in (s120, s210):
            lattice = lattice_service.sweak_lattice(s)
            trees = arc_service.meet_irreducibles(s)
            assert sorted(lattice.index(t) for t in trees.values()) == sorted(lattice.meet_irreducibles)
            for alpha, t in trees.items():
                assert arc_service.delta_meet(t) == (alpha,)
                assert lattice_service.positions(t) == arc_service.positions_from_arc(s, alpha, join=False)


class TestDiagrams:
    def test_diagrams_biject_with_trees(self, s120, s210):
        for s in (s120, s210):
            trees = sbase_service.enumerate(s, TREES)
            by_diagram = arc_service.trees_by_diagram(s)
            assert set(by_diagram) == set(arc_service.noncrossing_diagrams(s))
            assert sorted(by_diagram.values(), key=lambda t: t.code) == sorted(trees, key=lambda t: t.code)
            for t in trees:
                assert arc_service.tree_from_diagram(s, arc_service.delta_join(t)) == t
                assert arc_service.tree_from_meet_diagram(s, arc_service.delta_meet(t)) == t

    def test_crossing_rejected(self, s111):
        with pytest.raises(CrossingDiagram):
            arc_service.tree_from_diagram(s111, [SArc.of(1, 3, A=[2]), SArc.of(2, 3)])

    def test_canonical_representations(self, s210):
        lattice = lattice_service.sweak_lattice(s210)
        for t in lattice.labels:
            joins = arc_service.canonical_join_rep(t)
            meets = arc_service.canonical_meet_rep(t)
            expected_joins = lattice.canonical_join_representation(lattice.index(t))
            assert sorted(lattice.index(u) for u in joins) == sorted(expected_joins)
            if joins:
                assert lattice.labels[lattice.join_all(lattice.index(u) for u in joins)] == t
            if meets:
                assert lattice.labels[lattice.meet_all(lattice.index(u) for u in meets)] == t

    def test_f_vector_starts_with_empty_face(self, s120):
        f = arc_service.f_vector(s120)
        assert f[0] == 1
        assert f[1] == arc_service.count_arcs(s120)
        assert sum(f) == 8

    @pytest.mark.parametrize("values", [(1, 2, 0), (2, 1, 0), (1, 1, 1), (1, 1, 1, 1), (2, 1, 0, 1)])
    def test_comparison_criteria(self, values):
        s = SComposition(values)
        joins, meets = arc_service.join_irreducibles(s), arc_service.meet_irreducibles(s)
        for a, b in itertools.product(arc_service.all_arcs(s), repeat=2):
            assert arc_service.join_leq_join(a, b) == lattice_service.sweak_leq(joins[a], joins[b])
            assert arc_service.meet_leq_meet(a, b) == lattice_service.sweak_leq(meets[a], meets[b])
            assert arc_service.join_leq_meet(a, b) == lattice_service.sweak_leq(joins[a], meets[b])

    @pytest.mark.parametrize("values", [(1, 2, 0), (2, 1, 0), (1, 1, 1, 1)])
    def test_noncrossing_irreducibles_are_incomparable(self, values):
        s = SComposition(values)
        joins = arc_service.join_irreducibles(s)
        for a, b in itertools.combinations(arc_service.all_arcs(s), 2):
            if arc_service.noncrossing(s, a, b):
                assert not lattice_service.sweak_leq(joins[a], joins[b])
                assert not lattice_service.sweak_leq(joins[b], joins[a])

    def test_descent_minimum(self, s120, s210):
        # t_join of the arc of a descent is the least tree below t with the same position there
        for s in (s120, s210):
            trees = sbase_service.enumerate(s, TREES)
            for t in trees:
                for i, j in sbase_service.descents(t):
                    p = lattice_service.pos(t, i, j)
                    below = [u for u in trees if lattice_service.sweak_leq(u, t) and lattice_service.pos(u, i, j) == p]
                    minimal = [
                        u for u in below
                        if not any(v != u and lattice_service.sweak_leq(v, u) for v in below)
                    ]
                    assert minimal == [arc_service.t_join(s, arc_service.alpha_join(t, i, j))]


class TestIntervals:
    def test_semicrossing_bidiagrams_count_intervals(self, s120):
        lattice = lattice_service.sweak_lattice(s120)
        intervals = sum(1 for a, b in itertools.product(range(lattice.size), repeat=2) if lattice.leq(a, b))
        assert arc_service.count_semicrossing_bidiagrams(s120) == intervals

    def test_interval_bidiagram(self, s120):
        lattice = lattice_service.sweak_lattice(s120)
        bottom, top = lattice.labels[lattice.bottom], lattice.labels[lattice.top]
        joins, meets = arc_service.interval_bidiagram(bottom, top)
        assert joins == () and meets == ()
        with pytest.raises(NotComparable):
            arc_service.interval_bidiagram(top, bottom)
