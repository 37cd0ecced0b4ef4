import pytest

from app.core.exceptions import DoublingFailed, InputError
from app.models.bush import SComposition
from app.services.check_service import ALL, ANCHOR_S, EXTRA_DESK, check_service, desk_compositions
from app.services.lattice_service import lattice_service


class TestSuiteSelection:
    def test_single_suite(self, s120):
        report = check_service.run(s120, "counting")
        assert report.passed
        assert report.suite == "counting"
        assert report.s == "1,2,0"
        assert [r.name for r in report.results] == ["count_trees", "count_trunks", "count_arcs"]
        assert report.failures == []

    def test_comma_separated_suites(self, s111):
        report = check_service.run(s111, "counting, lattice")
        names = {r.name for r in report.results}
        assert {"count_trees", "is_lattice", "join_formula"} <= names
        assert report.passed

    @pytest.mark.parametrize("suite", ["nope", "", "counting,nope", " , "])
    def test_unknown_suite(self, s11, suite):
        with pytest.raises(InputError):
            check_service.run(s11, suite)

    def test_report_carries_seed(self, s11):
        assert check_service.run(s11, "counting").seed == 0

    def test_all_names_every_suite(self):
        assert check_service._suite_names(ALL) == list(check_service.suites)


class TestChecks:
    def test_fibers_and_worked_example(self, s11):
        report = check_service.run(s11, "fibers")
        assert report.passed
        assert {r.name for r in report.results} == {"fiber_partition", "worked_example"}

    def test_canonical_and_dual(self, s120):
        assert check_service.run(s120, "canonical,dual").passed

    def test_forcing_counts_congruences_on_the_small_example(self, s120):
        results = check_service.check_forcing(s120)
        counts = [r for r in results if r.name == "congruence_count"]
        assert len(counts) == 1 and counts[0].passed
        assert counts[0].detail == "13 congruences"

    def test_classical_only_on_all_ones(self, s111, s120):
        results = check_service.check_classical(s111)
        assert [r.name for r in results] == ["weak_order", "arcs", "sylvester"]
        assert all(r.passed for r in results)
        assert check_service.check_classical(s120) == []

    def test_anchor_skipped_elsewhere(self, s120):
        assert check_service.check_anchor(s120) == []

    def test_invariant_violation_becomes_failed_result(self, s11, monkeypatch):
        def broken(s, facial=False):
            raise DoublingFailed("no doubling found", witness="L1.L1")

        monkeypatch.setattr(lattice_service, "verify_doubling_sequence", broken)
        report = check_service.run(s11, "doubling")
        assert not report.passed
        (failure,) = report.failures
        assert failure.criterion == 12
        assert "DoublingFailed" in failure.detail
        assert "witness L1.L1" in failure.detail

    @pytest.mark.slow
    def test_quotients_small(self, s120):
        report = check_service.run(s120, "quotients")
        assert report.passed
        assert len(report.results) == 13

    @pytest.mark.slow
    def test_anchor(self):
        report = check_service.run(SComposition(ANCHOR_S), "anchor")
        assert report.passed, report.failures


class TestDesk:
    def test_desk_compositions(self):
        values = [s.values for s in desk_compositions()]
        assert len(values) == len(set(values))
        assert (0,) in values and (3, 3, 3) in values
        for extra in EXTRA_DESK:
            assert extra in values
        assert len(values) == 4 + 16 + 64 + 3

    def test_run_desk_on_given_compositions(self, s11, s120):
        reports = check_service.run_desk("counting", [s11, s120])
        assert [r.s for r in reports] == ["1,1", "1,2,0"]
        assert all(r.passed for r in reports)
