import itertools

import pytest

from app.core.exceptions import InputError, NotAPositionVector, NotAscents
from app.models.bush import SComposition
from app.models.lattice import FiniteLattice
from app.services.insertion_service import LEFT, insertion_service
from app.services.lattice_service import (
    HEXAGON,
    PENTAGON_LEFT,
    PENTAGON_RIGHT,
    SQUARE,
    lattice_service,
    position_pairs,
)
from app.services.sbase_service import BUSHES, TREES, sbase_service


class TestFiniteLattice:
    def test_chain(self):
        lattice = FiniteLattice.from_relation(["a", "b", "c"], lambda x, y: x <= y)
        assert lattice.is_lattice()
        assert lattice.covers == [(0, 1), (1, 2)]
        assert lattice.join(0, 2) == 2 and lattice.meet(0, 2) == 0
        assert lattice.bottom == 0 and lattice.top == 2

    def test_boolean_quotient(self):
        subsets = [frozenset(c) for k in range(3) for c in itertools.combinations((1, 2), k)]
        lattice = FiniteLattice.from_relation(subsets, lambda x, y: x <= y)
        # collapse along the element 2
        class_of = [0 if 1 not in x else 1 for x in lattice.labels]
        assert lattice.is_congruence(class_of)
        quotient, minima = lattice.quotient(class_of)
        assert quotient.size == 2
        assert not lattice.is_congruence([0, 1, 1, 0])


class TestWeakOrder:
    def test_hexagon(self, s111):
        lattice = lattice_service.sweak_lattice(s111)
        assert lattice.size == 6
        assert lattice.is_lattice()
        assert len(lattice.covers) == 6
        assert lattice.cover_graph().number_of_edges() == 6

    def test_bottom_and_top(self, s210):
        lattice = lattice_service.sweak_lattice(s210)
        bottom, top = lattice.labels[lattice.bottom], lattice.labels[lattice.top]
        assert set(lattice_service.position_vector(bottom)) == {0}
        assert lattice_service.position_vector(top) == tuple(s210[i] for i, _ in position_pairs(3))

    def test_join_formula(self, s120, s210):
        for s in (s120, s210):
            trees = sbase_service.enumerate(s, TREES)
            for t, u in itertools.combinations(trees, 2):
                joined = lattice_service.join(t, u)
                assert joined == lattice_service.brute_join(t, u)
                assert lattice_service.sweak_leq(t, joined) and lattice_service.sweak_leq(u, joined)
                met = lattice_service.meet(t, u)
                assert lattice_service.sweak_leq(met, t) and lattice_service.sweak_leq(met, u)

    def test_positions_round_trip(self, s210):
        for t in sbase_service.enumerate(s210, TREES):
            assert lattice_service.tree_from_positions(s210, lattice_service.positions(t)) == t

    def test_bad_positions(self, s11):
        with pytest.raises(NotAPositionVector):
            lattice_service.check_position_vector(s11, {(1, 2): 2})
        with pytest.raises(NotAPositionVector):
            lattice_service.check_position_vector(s11, {})

    def test_pair_range(self, s120):
        t = sbase_service.enumerate(s120, TREES)[0]
        with pytest.raises(InputError):
            lattice_service.pos(t, 2, 1)

    def test_polygons(self, s111):
        lattice = lattice_service.sweak_lattice(s111)
        bottom = lattice.labels[lattice.bottom]
        first, second = sbase_service.ascents(bottom)
        report = lattice_service.polygon_type(bottom, first, second)
        assert report.kind == HEXAGON
        assert len(report.elements) == 6
        assert all(label is not None for _, _, label in report.edges)
        with pytest.raises(NotAscents):
            lattice_service.polygon_type(bottom, first, first)

    @pytest.mark.parametrize("values", [(1, 2, 0), (2, 1, 0), (1, 1, 1)])
    def test_cover_labels(self, values):
        s = SComposition(values)
        lattice = lattice_service.sweak_lattice(s)
        for a, b in lattice.covers:
            lower, upper = lattice.labels[a], lattice.labels[b]
            pair = lattice_service.rotation_label(lower, upper)
            assert pair in sbase_service.ascents(lower)
            assert insertion_service.rotate(lower, pair, LEFT) == upper
        bottom, top = lattice.labels[lattice.bottom], lattice.labels[lattice.top]
        assert lattice_service.rotation_label(bottom, top) is None
        assert lattice_service.rotation_label(top, bottom) is None

    def test_polygons_classify_every_pair(self, s120, s210, s111):
        sizes = {SQUARE: 4, PENTAGON_LEFT: 5, PENTAGON_RIGHT: 5, HEXAGON: 6}
        kinds = set()
        for s in (s120, s210, s111):
            for t in sbase_service.enumerate(s, TREES):
                for first, second in itertools.combinations(sbase_service.ascents(t), 2):
                    report = lattice_service.polygon_type(t, first, second)
                    assert len(report.elements) == sizes[report.kind]
                    assert all(label is not None for _, _, label in report.edges)
                    kinds.add(report.kind)
        assert HEXAGON in kinds


class TestFacialOrder:
    def test_size_and_lattice(self, s120):
        lattice = lattice_service.facial_lattice(s120)
        assert lattice.size == sbase_service.count(s120, BUSHES)
        assert lattice.is_lattice()

    @pytest.mark.parametrize("values", [(1, 2, 0), (2, 1, 0), (1, 1, 1)])
    def test_covers_by_detaching(self, values):
        s = SComposition(values)
        lattice = lattice_service.facial_lattice(s)
        covers = {(lattice.labels[a], lattice.labels[b]) for a, b in lattice.covers}
        assert set(lattice_service.facial_covers_by_detaching(s)) == covers

    def test_trees_are_faces(self, s210):
        for b in sbase_service.enumerate(s210, BUSHES):
            assert lattice_service.is_face(b, lattice_service.min_tree(b))
            assert lattice_service.is_face(b, lattice_service.max_tree(b))

    def test_facial_positions_on_trees(self, s210):
        for t in sbase_service.enumerate(s210, TREES):
            for i, j in position_pairs(t.n):
                p = lattice_service.pos(t, i, j)
                assert lattice_service.rpos(t, i, j) == p
                assert lattice_service.lpos(t, i, j) == t.s[i] - p

    @pytest.mark.parametrize("values", [(1, 2, 0), (2, 1, 0), (1, 1, 1)])
    def test_facial_position_bounds(self, values):
        s = SComposition(values)
        for b in sbase_service.enumerate(s, BUSHES):
            for i, j in position_pairs(s.n):
                left, right = lattice_service.lpos(b, i, j), lattice_service.rpos(b, i, j)
                assert 0 <= left <= s[i] and 0 <= right <= s[i]

    def test_restricts_to_weak_order(self, s120):
        trees = sbase_service.enumerate(s120, TREES)
        for t, u in itertools.product(trees, repeat=2):
            assert lattice_service.facial_leq(t, u) == lattice_service.sweak_leq(t, u)


class TestDoubling:
    @pytest.mark.parametrize("values", [(1, 2, 0), (2, 1, 0), (1, 1, 1)])
    def test_weak_order(self, values):
        report = lattice_service.verify_doubling_sequence(SComposition(values))
        assert report.ok
        assert report.steps

    def test_facial(self, s120):
        assert lattice_service.verify_doubling_sequence(s120, facial=True).ok

    @pytest.mark.slow
    def test_four_nodes(self, s1111):
        assert lattice_service.verify_doubling_sequence(s1111).ok
        assert lattice_service.verify_doubling_sequence(s1111, facial=True).ok
