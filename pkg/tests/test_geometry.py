import pytest

from app.models.arc import SArc
from app.models.polyhedron import HPolyhedron
from app.services.congruence_service import SYLVESTER, congruence_service
from app.services.geometry_service import geometry_service
from app.services.insertion_service import insertion_service
from app.services.lattice_service import lattice_service
from app.services.sbase_service import BUSHES, sbase_service


class TestShards:
    def test_shard_inequalities(self, s120):
        shard = geometry_service.shard(s120, SArc.of(1, 3, B=[2])).polyhedron
        expected = HPolyhedron.build(3, [((1, -1, 0), 0)], [((1, 0, -1), 1)])
        assert shard.same_set(expected)
        assert shard.dimension == 2

    def test_shard_bushes(self, s120):
        alpha = SArc.of(1, 3, B=[2])
        bushes = geometry_service.shard_bushes(s120, alpha)
        assert bushes
        assert all(not b.is_tree for b in bushes)
        assert geometry_service.check_shard_decomposition(s120, alpha, samples=20)


class TestFoams:
    def test_permutahedral_foam(self, s111):
        foam = geometry_service.foam(s111)
        assert foam.f_vector == (1, 6, 6)
        assert len(foam.maximal) == 6

    def test_foam_cells_are_bushes(self, s120):
        foam = geometry_service.foam(s120)
        assert foam.f_vector[0] == 2
        assert foam.f_vector[-1] == 8
        assert sum(foam.f_vector) == sbase_service.count(s120, BUSHES)
        for b in sbase_service.enumerate(s120, BUSHES):
            assert foam.label(insertion_service.fiber(b).normalized().canonical) is not None

    def test_complex_axioms(self, s120):
        foam = geometry_service.foam(s120)
        assert geometry_service.check_complex(foam, samples=40)

    def test_dual_graph_is_hasse(self, s120, s111):
        for s in (s120, s111):
            foam = geometry_service.foam(s)
            assert geometry_service.dual_matches_lattice(foam, lattice_service.sweak_lattice(s))

    def test_cap(self, s120):
        from app.core.exceptions import CapExceeded

        with pytest.raises(CapExceeded):
            geometry_service.foam(s120, cap=3)


class TestQuotientFoams:
    def test_sylvester(self, s1111):
        downset = congruence_service.named_downset(s1111, SYLVESTER)
        congruence = congruence_service.congruence_from_downset(s1111, downset)
        qfoam = geometry_service.foam_of_congruence(congruence)
        assert len(qfoam.maximal) == 14
        assert geometry_service.dual_matches_lattice(qfoam, congruence_service.quotient(congruence))

    def test_walls(self, s120):
        for downset in congruence_service.all_congruences(s120):
            qfoam = geometry_service.quotient_foam(s120, downset)
            assert geometry_service.check_walls(s120, downset, qfoam)

    def test_wall_arc_of_stitch(self, s120):
        for b in sbase_service.enumerate(s120, BUSHES):
            if b.rank == s120.n - 1:
                alpha = geometry_service.wall_arc(b)
                assert insertion_service.fiber(b).is_subset_of(geometry_service.shard(s120, alpha).polyhedron)
