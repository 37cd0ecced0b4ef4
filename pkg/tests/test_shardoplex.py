from fractions import Fraction

import pytest

from app.core.exceptions import DegenerateConfig, InputError, NonPositiveLambda
from app.models.arc import SArc
from app.models.bush import SComposition
from app.models.vpolytope import VPolytope
from app.services.arc_service import arc_service
from app.services.congruence_service import SYLVESTER, congruence_service
from app.services.shardoplex_service import AlternatingMatching, shardoplex_service
from app.services.sbase_service import TRUNKS, sbase_service


def lifting_of(s, alpha, pairs):
    return shardoplex_service.lifting(s, alpha, AlternatingMatching(tuple(pairs)))


class TestShardPolytopes:
    def test_liftings(self, s120):
        assert lifting_of(s120, SArc.of(2, 3, r=2), [(2, 3)]) == -1
        alpha = SArc.of(1, 3, B=[2])
        assert lifting_of(s120, alpha, [(1, 2)]) == 0
        assert lifting_of(s120, alpha, [(1, 3)]) == -1
        assert lifting_of(s120, alpha, []) == 0

    def test_matchings(self, s1111):
        matchings = shardoplex_service.alternating_matchings(s1111, SArc.of(1, 4, A=[2, 3]))
        assert matchings[0].pairs == ()
        assert all(a < b for m in matchings for a, b in m.pairs)
        assert str(AlternatingMatching(((1, 2), (3, 4)))) == "{1<2<3<4}"

    def test_shard_polytope_vertex(self, s1111):
        poly = shardoplex_service.shard_polytope(s1111, SArc.of(1, 4, A=[2, 3]))
        assert (1, 0, 0, -1) in poly.vertices

    def test_segment(self, s1111):
        poly = shardoplex_service.shard_polytope(s1111, SArc.of(1, 2))
        assert poly.key == VPolytope.from_points(4, [(0, 0, 0, 0), (1, -1, 0, 0)]).key

    def test_local_shard_polytopes(self, s120):
        alpha = SArc.of(1, 3, B=[2])
        triangle = VPolytope.from_points(3, [(0, 0, 0), (1, -1, 0), (1, 0, -1)])
        edge = VPolytope.from_points(3, [(0, 0, 0), (1, -1, 0)])
        assert shardoplex_service.local_shard_polytope(s120, alpha, (1, 1, 2)).key == triangle.key
        assert shardoplex_service.local_shard_polytope(s120, alpha, (1, 1, 1)).key == edge.key
        full = shardoplex_service.full_trunk(s120, alpha)
        assert shardoplex_service.local_shard_polytope(s120, alpha, full).key == triangle.key


class TestShardoplexes:
    def test_one_cell_per_trunk(self, s120):
        alpha = SArc.of(1, 3, B=[2])
        complex_ = shardoplex_service.shardoplex(s120, alpha)
        assert set(complex_.cells) == set(sbase_service.trunk_indices(s120))
        assert len(complex_.cells) == sbase_service.count(s120, TRUNKS)
        assert complex_.check_complex()
        assert shardoplex_service.check_separation(complex_)

    def test_cellwise_sum_matches_quotientoplex(self, s120):
        first, second = SArc.of(1, 2), SArc.of(2, 3, r=1)
        summed = shardoplex_service.minkowski_cellwise(
            shardoplex_service.shardoplex(s120, first), shardoplex_service.shardoplex(s120, second)
        )
        direct = shardoplex_service.quotientoplex(s120, [first, second])
        assert {q: p.key for q, p in summed.cells.items()} == {q: p.key for q, p in direct.cells.items()}
        assert summed.lambdas == direct.lambdas

    def test_scale_and_translate(self, s120):
        alpha = SArc.of(1, 2)
        base = shardoplex_service.shardoplex(s120, alpha)
        doubled = shardoplex_service.scale(base, 2)
        assert doubled.lambdas[alpha] == 2
        moved = shardoplex_service.minkowski_cellwise(base, shardoplex_service.point_family(s120, (1, 0, -1)))
        for q in base.cells:
            assert moved.cells[q].same_up_to_translation(base.cells[q])

    def test_mismatched_families(self, s120, s210):
        with pytest.raises(InputError):
            shardoplex_service.minkowski_cellwise(
                shardoplex_service.shardoplex(s120, SArc.of(1, 2)),
                shardoplex_service.point_family(s210, (0, 0, 0)),
            )


class TestQuotientoplexes:
    def test_lambdas(self, s120):
        down = congruence_service.downward_closure(s120, [SArc.of(1, 3, B=[2])])
        coefficients = shardoplex_service.validate_lambdas(s120, down, {SArc.of(1, 2): "1/2"})
        assert coefficients[SArc.of(1, 2)] == Fraction(1, 2)
        assert coefficients[SArc.of(1, 3, B=[2])] == 1
        with pytest.raises(NonPositiveLambda):
            shardoplex_service.validate_lambdas(s120, down, {SArc.of(1, 2): 0})
        with pytest.raises(InputError):
            shardoplex_service.validate_lambdas(s120, down, {SArc.of(2, 3, r=1): 1})

    def test_tamari(self, s1111):
        down = congruence_service.named_downset(s1111, SYLVESTER)
        complex_ = shardoplex_service.quotientoplex(s1111, down)
        assert complex_.f_vector[0] == 14
        assert shardoplex_service.skeleton_matches_quotient(s1111, complex_)

    def test_skeleton_all_congruences(self, s120):
        for down in congruence_service.all_congruences(s120):
            complex_ = shardoplex_service.quotientoplex(s120, down)
            assert complex_.check_complex()
            assert shardoplex_service.skeleton_matches_quotient(s120, complex_)
            support = shardoplex_service.support_polytope(s120, complex_.lambdas)
            assert shardoplex_service.support_matches(complex_, support, samples=10)

    def test_scaled_lambdas_keep_vertices(self, s120):
        down = arc_service.all_arcs(s120)
        lambdas = {alpha: Fraction(k + 1, 2) for k, alpha in enumerate(down)}
        complex_ = shardoplex_service.quotientoplex(s120, down, lambdas)
        assert complex_.f_vector[0] == 8
        assert shardoplex_service.skeleton_matches_quotient(s120, complex_)

    def test_dual_vertex_degenerate(self, s120):
        with pytest.raises(DegenerateConfig):
            shardoplex_service.dual_vertex(s120, {SArc.of(1, 2): Fraction(1)}, (0, 0, 0))


class TestZonotopes:
    def test_dilation_factors(self, s120, s1111):
        assert shardoplex_service.dilation_factors(s120) == {(1, 2): 2, (1, 3): 1, (2, 3): 3}
        factors = shardoplex_service.dilation_factors(s1111)
        assert all(c == 2 ** (4 - j + i - 1) for (i, j), c in factors.items())

    @pytest.mark.parametrize("values", [(1, 2, 0), (2, 1, 0), (1, 1, 1)])
    def test_support_is_dilation_zonotope(self, values):
        assert shardoplex_service.zonotope_support_check(SComposition(values), samples=10)

    def test_normal_equivalence(self):
        square = VPolytope.from_points(2, [(0, 0), (1, 0), (0, 1), (1, 1)])
        triangle = VPolytope.from_points(2, [(0, 0), (1, 0), (0, 1)])
        assert shardoplex_service.normally_equivalent(square, square.scale(3))
        assert not shardoplex_service.normally_equivalent(square, triangle)
