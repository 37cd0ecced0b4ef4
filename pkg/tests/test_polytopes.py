from fractions import Fraction

import pytest

from app.core.exceptions import DimensionMismatch, InputError
from app.core.ppl_backend import INFEASIBLE, OPTIMAL, UNBOUNDED, hull, solve_lp
from app.models.polyhedron import HPolyhedron
from app.models.vpolytope import VPolytope, minkowski_sum


def square():
    return VPolytope.from_points(2, [(0, 0), (1, 0), (0, 1), (1, 1), (Fraction(1, 2), Fraction(1, 2))])


class TestHPolyhedron:
    def test_empty_and_dimension(self):
        empty = HPolyhedron.build(2, [((1, 0), -1), ((-1, 0), -1)], [])
        assert empty.is_empty
        assert empty.dimension == -1
        line = HPolyhedron.build(2, [((1, 0), 1)], [((1, -1), 0)])
        assert line.dimension == 1

    def test_implicit_equalities(self):
        # x <= 0 and -x <= 0 pin x to zero
        poly = HPolyhedron.build(2, [((1, 0), 0), ((-1, 0), 0), ((0, 1), 1)], [])
        assert poly.dimension == 1
        assert len(poly.implicit_indices) == 2
        assert poly.contains_in_relative_interior((0, 0))
        assert not poly.contains_in_relative_interior((0, 1))

    def test_canonical_ignores_redundancy(self):
        a = HPolyhedron.build(2, [((1, 0), 1), ((0, 1), 1), ((1, 1), 5)], [])
        b = HPolyhedron.build(2, [((2, 0), 2), ((0, 1), 1)], [])
        assert a.canonical == b.canonical
        assert a.same_set(b)

    def test_faces_of_triangle(self):
        triangle = HPolyhedron.build(2, [((-1, 0), 0), ((0, -1), 0), ((1, 1), 1)], [])
        dims = sorted(face.dimension for face in triangle.faces())
        assert dims == [0, 0, 0, 1, 1, 1, 2]
        point = triangle.relative_interior_point
        assert triangle.contains_in_relative_interior(point)
        assert triangle.maximize((1, 0)) == 1


class TestVPolytope:
    def test_extreme_points(self):
        assert len(square().vertices) == 4
        assert square().dimension == 2
        assert square().f_vector() == (4, 4, 1)

    def test_minkowski(self):
        seg = VPolytope.from_points(2, [(0, 0), (1, 0)])
        other = VPolytope.from_points(2, [(0, 0), (0, 1)])
        assert seg.minkowski(other).key == square().key
        assert minkowski_sum([seg, other], 2).key == square().key
        assert minkowski_sum([], 2).vertices == ((0, 0),)

    def test_translation(self):
        moved = square().translate((3, -1))
        assert moved.same_up_to_translation(square())
        assert moved.key != square().key

    def test_errors(self):
        with pytest.raises(InputError):
            VPolytope.from_points(2, [])
        with pytest.raises(DimensionMismatch):
            VPolytope.from_points(2, [(0, 0, 0)])
        with pytest.raises(InputError):
            square().scale(0)

    def test_hrep_round_trip(self):
        h = square().to_hpolyhedron()
        assert h.contains((Fraction(1, 2), 1))
        assert not h.contains((2, 0))
        assert square().contains(square().centroid())

    def test_faces(self):
        edges = square().faces_of_dimension(1)
        assert len(edges) == 4
        assert all(edge.is_face_of(square()) for edge in edges)
        assert square().face_maximizing((1, 1)).vertices == ((1, 1),)

    def test_flat_polytope_in_space(self):
        triangle = VPolytope.from_points(3, [(0, 0, 1), (1, 0, 1), (0, 1, 1), (Fraction(1, 3), Fraction(1, 3), 1)])
        assert len(triangle.vertices) == 3
        assert triangle.dimension == 2
        assert len(triangle.hull_equations) == 1
        assert len(triangle.facets) == 3
        assert triangle.f_vector() == (3, 3, 1)


class TestPplBackend:
    def test_lp_statuses(self):
        assert solve_lp(1, (1,), [(1,), (-1,)], [0, -1]).status == INFEASIBLE
        assert solve_lp(2, (1, 0), [(0, 1)], [1]).status == UNBOUNDED
        result = solve_lp(2, (1, 1), [(2, 1), (1, 3)], [1, 1], [], [])
        assert result.status == OPTIMAL
        assert result.value == Fraction(3, 5)
        assert result.x == (Fraction(2, 5), Fraction(1, 5))

    def test_feasibility_only(self):
        result = solve_lp(2, None, [], [], [(1, 1)], [Fraction(1, 2)])
        assert result.feasible
        assert sum(result.x) == Fraction(1, 2)

    def test_constant_rows(self):
        assert solve_lp(1, None, [(0,)], [-1]).status == INFEASIBLE
        assert solve_lp(1, None, [], [], [(0,)], [0]).feasible

    def test_hull_of_rational_points(self):
        h = hull(2, [(0, 0), (Fraction(1, 2), 0), (0, Fraction(1, 2)), (Fraction(1, 8), Fraction(1, 8))])
        assert h.vertices == ((0, 0), (0, Fraction(1, 2)), (Fraction(1, 2), 0))
        assert h.equalities == ()
        assert sorted(h.inequalities) == [((-1, 0), 0), ((0, -1), 0), ((2, 2), 1)]
