import pytest

from app.core.exceptions import CapExceeded, IndexOutOfRange, InputError, MalformedBush
from app.models.bush import Attachment, Bush, SComposition
from app.services.insertion_service import insertion_service
from app.services.lattice_service import lattice_service
from app.services.sbase_service import BUSHES, TREES, TRUNKS, sbase_service


class TestCompositions:
    def test_capacities(self, s120, s210):
        assert sbase_service.capacities(s120) == ((1, 2, 4, 4), (1, 2, 3, 3))
        assert sbase_service.capacities(s210) == ((1, 3, 4, 4), (1, 3, 3, 3))
        assert sbase_service.capacities(SComposition.of(0)) == ((1, 1), (1, 1))

    def test_parse(self):
        assert SComposition.parse("1, 2,0") == SComposition.of(1, 2, 0)
        assert str(SComposition.of(1, 2, 0)) == "1,2,0"
        with pytest.raises(InputError):
            SComposition.parse("1,a")
        with pytest.raises(InputError):
            SComposition.of(1, -1)


class TestBushes:
    def test_hole(self, s11):
        b = sbase_service.build_bush(s11, [Attachment.leaf(1), Attachment.gap(1)])
        assert sbase_service.holes(b) == [(1, 2)]
        assert b.rank == 1
        assert not b.is_tree

    def test_out_of_range(self, s11):
        with pytest.raises(IndexOutOfRange):
            sbase_service.build_bush(s11, [Attachment.leaf(1), Attachment.leaf(3)])

    def test_codes(self, s11):
        b = Bush.from_codes(s11, "L1.G1")
        assert b.code == "L1.G1"
        assert b == Bush(s11, (Attachment.leaf(1), Attachment.gap(1)))
        with pytest.raises(InputError):
            Attachment.from_code("X2")

    def test_leaf_count(self, s120):
        for b in sbase_service.enumerate(s120, BUSHES):
            gapped = [x for x in b.gap_nodes if s120[x] != 0]
            assert b.leaf_count == s120.S[-1] - len(gapped)


class TestEnumeration:
    @pytest.mark.parametrize(
        "values, trees, trunks",
        [((1, 2, 0), 8, 2), ((2, 1, 0), 12, 4), ((1, 1, 1), 6, 1), ((1,), 1, 1), ((0, 0), 1, 1)],
    )
    def test_counts(self, values, trees, trunks):
        s = SComposition(values)
        assert len(sbase_service.enumerate(s, TREES)) == trees == sbase_service.count(s, TREES)
        assert len(sbase_service.enumerate(s, TRUNKS)) == trunks == sbase_service.count(s, TRUNKS)

    def test_duplicate_free(self, s210):
        bushes = sbase_service.enumerate(s210, BUSHES)
        assert len(bushes) == len(set(bushes)) == sbase_service.count(s210, BUSHES)

    def test_ranks(self, s120, s210):
        for s in (s120, s210):
            assert all(t.rank == s.n for t in sbase_service.enumerate(s, TREES))
            low = min([i for i in range(1, s.n + 1) if s[i] != 0] + [s.n])
            assert all(b.rank == low for b in sbase_service.enumerate(s, TRUNKS))
            assert all(sbase_service.is_trunk(b) for b in sbase_service.enumerate(s, TRUNKS))

    def test_trunk_rank_example(self, s210):
        assert sbase_service.trunk_from_index(s210, (1, 1, 1)).rank == 1

    def test_cap(self, s120):
        with pytest.raises(CapExceeded):
            sbase_service.enumerate(s120, TREES, cap=3)


class TestStructure:
    def test_worked_example(self, worked_example):
        s, x = worked_example
        b = insertion_service.insert(s, x)
        assert sbase_service.holes(b) == [(1, 5), (2, 4), (5, 6)]
        assert sbase_service.ascents(b) == [(1, 2), (3, 9), (4, 7)]
        assert sbase_service.descents(b) == [(2, 7), (5, 8), (8, 9)]
        assert sbase_service.zigzag(b, 2, "left") == [2, 4, 5, 6]
        assert sbase_service.zigzag(b, 3, "right") == [3, 5, 8, 9]

    def test_tree_criterion_agrees(self, s120, s210):
        for s in (s120, s210):
            for t in sbase_service.enumerate(s, TREES):
                assert sbase_service.holes(t) == []
                assert sbase_service.ascents(t) == sbase_service.tree_ascents(t)
                assert sbase_service.descents(t) == sbase_service.tree_descents(t)

    def test_bottom_has_no_descents(self, s120):
        lattice = lattice_service.sweak_lattice(s120)
        assert sbase_service.descents(lattice.labels[lattice.bottom]) == []

    def test_zigzag_side(self, s11):
        t = Bush.from_codes(s11, "L1.L1")
        with pytest.raises(InputError):
            sbase_service.zigzag(t, 1, "up")

    def test_children_round_trip(self, s210):
        for b in sbase_service.enumerate(s210, BUSHES):
            assert sbase_service.bush_from_children(s210, sbase_service.children_lists(b)) == b

    def test_malformed_children(self, s11):
        with pytest.raises(MalformedBush):
            sbase_service.bush_from_children(s11, [[1], [None, None], [None, None]])
