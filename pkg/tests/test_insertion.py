import random
from fractions import Fraction

import pytest

from app.core.exceptions import InputError, NotAncestor, NotAnAscentOrDescent, WrongHoleCount
from app.models.bush import Bush, SComposition
from app.services.insertion_service import LEFT, RIGHT, insertion_service
from app.services.lattice_service import lattice_service
from app.services.sbase_service import BUSHES, TREES, sbase_service


class TestInsert:
    def test_gap_on_equality(self, s11):
        assert insertion_service.insert(s11, ("0", "0")).code == "L1.G1"

    def test_order(self, s11):
        assert insertion_service.insert(s11, ("0", "-1")).code == "L1.L1"
        assert insertion_service.insert(s11, ("0", "1")).code == "L1.L2"

    def test_wrong_length(self, s11):
        with pytest.raises(InputError):
            insertion_service.insert(s11, ("0",))

    def test_fiber_point_round_trip(self, s120, s210):
        for s in (s120, s210):
            for b in sbase_service.enumerate(s, BUSHES):
                assert insertion_service.insert(s, insertion_service.fiber_point(b)) == b

    def test_generic_points_land_in_trees(self, s120):
        rng = random.Random(0)
        for _ in range(50):
            x = insertion_service.random_point(s120.n, rng)
            b = insertion_service.insert(s120, x)
            assert insertion_service.fiber(b).contains(x)

    def test_partition(self, s120):
        # every sample lies in exactly one fiber
        rng = random.Random(1)
        fibers = [insertion_service.fiber(b) for b in sbase_service.enumerate(s120, BUSHES)]
        for _ in range(30):
            x = insertion_service.random_point(s120.n, rng, denominator=2)
            inside = [f for f in fibers if f.contains_in_relative_interior(x)]
            assert len(inside) == 1

    @pytest.mark.slow
    def test_partition_fine_grid(self, s120):
        rng = random.Random(7)
        fibers = [insertion_service.fiber(b) for b in sbase_service.enumerate(s120, BUSHES)]
        for _ in range(1000):
            x = insertion_service.random_point(s120.n, rng, denominator=100)
            inside = [f for f in fibers if f.contains_in_relative_interior(x)]
            assert len(inside) == 1

    @pytest.mark.parametrize("values", [(1, 1, 1, 1), (2, 1, 0, 1), (1, 0, 2)])
    def test_prefix_compatibility(self, values):
        s = SComposition(values)
        rng = random.Random(3)
        points = [insertion_service.random_point(s.n, rng, denominator=3) for _ in range(40)]
        points += [insertion_service.fiber_point(b) for b in sbase_service.enumerate(s, BUSHES)]
        for x in points:
            b = insertion_service.insert(s, x)
            for j in range(1, s.n + 1):
                assert insertion_service.insert(s.prefix(j), x[:j]) == b.prefix(j)


class TestFibers:
    def test_worked_example(self, worked_example):
        s, x = worked_example
        b = insertion_service.insert(s, x)
        fiber = insertion_service.fiber_hrep(b)
        assert fiber.equalities == ((1, 5, 1), (2, 4, 1), (5, 6, 0))
        assert fiber.upper == ((1, 2, 0), (3, 9, 3), (4, 7, 0))
        assert fiber.lower == ((2, 7, 0), (5, 8, 2), (8, 9, 1))
        assert fiber.polyhedron().contains_in_relative_interior(tuple(Fraction(v) for v in x))
        assert "x1 - x5 = 1" in fiber.rows()

    def test_bounds(self, worked_example):
        s, x = worked_example
        b = insertion_service.insert(s, x)
        assert insertion_service.mu(b, 1, 5) == 1
        assert insertion_service.nu(b, 1, 5) == 1
        assert insertion_service.mu(b, 3, 9) == 3
        assert insertion_service.nu(b, 2, 7) == 0

    def test_not_ancestor(self, s11):
        t = Bush.from_codes(s11, "L1.L2")
        with pytest.raises(NotAncestor):
            insertion_service.mu(t, 2, 1)

    def test_fiber_dimension_is_rank(self, s210):
        for b in sbase_service.enumerate(s210, BUSHES):
            assert insertion_service.fiber(b).dimension == b.rank

    def test_trunk_fiber_equations(self, s210):
        assert insertion_service.trunk_fiber_equations(s210, (1, 1, 2)) == [(1, 2, 0), (1, 3, 1)]
        assert insertion_service.trunk_fiber_equations(SComposition.of(0, 0), (1, 1)) == []


class TestMoves:
    @pytest.mark.parametrize("values", [(1, 2, 0), (2, 1, 0), (1, 1, 1), (2, 1, 0, 1)])
    def test_rotate_is_stitch_then_incise(self, values):
        s = SComposition(values)
        lattice = lattice_service.sweak_lattice(s)
        covers = set(lattice.covers)
        for t in sbase_service.enumerate(s, TREES):
            for pair in sbase_service.ascents(t):
                b = insertion_service.stitch(t, pair)
                assert b.gap_nodes == (pair[1],)
                cut = {insertion_service.incise(b, LEFT), insertion_service.incise(b, RIGHT)}
                up = insertion_service.rotate(t, pair, LEFT)
                assert t in cut and up != t
                assert cut - {t} == {up}
                assert (lattice.index(t), lattice.index(up)) in covers

    def test_rotation_example(self, s120):
        t = Bush.from_codes(s120, "L1.L2.L1")
        assert (1, 2) in sbase_service.ascents(t)
        assert insertion_service.rotate(t, (1, 2), LEFT).code == "L1.L1.L1"

    def test_rotation_reverses(self, s120):
        for t in sbase_service.enumerate(s120, TREES):
            for pair in sbase_service.ascents(t):
                up = insertion_service.rotate(t, pair, LEFT)
                assert pair in sbase_service.descents(up)
                assert insertion_service.rotate(up, pair, RIGHT) == t

    def test_rotate_checks_the_side(self, s11):
        checked = 0
        for t in sbase_service.enumerate(s11, TREES):
            for pair in sbase_service.ascents(t):
                with pytest.raises(NotAnAscentOrDescent):
                    insertion_service.rotate(t, pair, RIGHT)
                checked += 1
            for pair in sbase_service.descents(t):
                with pytest.raises(NotAnAscentOrDescent):
                    insertion_service.rotate(t, pair, LEFT)
                checked += 1
        assert checked == 2

    def test_stitch_rejects(self, s11):
        t = Bush.from_codes(s11, "L1.L1")
        with pytest.raises(NotAnAscentOrDescent):
            insertion_service.stitch(t, (2, 1))

    def test_incise_needs_one_hole(self, s11):
        with pytest.raises(WrongHoleCount):
            insertion_service.incise(Bush.from_codes(s11, "L1.L1"), LEFT)

    def test_detach_nested_holes(self, s120):
        # node 3 hangs in the hole of node 2; releasing node 2 keeps the hole of node 3
        for code, side in [("L1.G1.G1", LEFT), ("L1.G1.G2", RIGHT)]:
            b = Bush.from_codes(s120, code)
            out = insertion_service.detach(b, 2, side)
            assert out.gap_nodes == (3,)
            assert out.rank == b.rank + 1

    def test_detach_every_hole(self, s120, s210):
        for s in (s120, s210):
            for b in sbase_service.enumerate(s, BUSHES):
                for j in b.gap_nodes:
                    left, right = insertion_service.detach(b, j, LEFT), insertion_service.detach(b, j, RIGHT)
                    assert left != right
                    assert set(left.gap_nodes) == set(right.gap_nodes) == set(b.gap_nodes) - {j}
                    fiber = insertion_service.fiber(b)
                    assert fiber.is_face_of(insertion_service.fiber(left))
                    assert fiber.is_face_of(insertion_service.fiber(right))

    def test_detach_needs_a_hole(self, s11):
        with pytest.raises(InputError):
            insertion_service.detach(Bush.from_codes(s11, "L1.L1"), 2, LEFT)

    def test_extremal_trees(self, s120):
        for b in sbase_service.enumerate(s120, BUSHES):
            left, right = insertion_service.left_tree(b), insertion_service.right_tree(b)
            assert left.is_tree and right.is_tree
            if b.is_tree:
                assert left == right == b

    @pytest.mark.parametrize("values", [(1, 2, 0), (2, 1, 0), (1, 1, 1)])
    def test_rotation_graph_is_hasse(self, values):
        s = SComposition(values)
        lattice = lattice_service.sweak_lattice(s)
        edges = {(lattice.index(t), lattice.index(u)) for t, u in insertion_service.rotation_graph(s)}
        assert edges == set(lattice.covers)
