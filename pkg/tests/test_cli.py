import logging

import orjson
import pytest
from typer.testing import CliRunner

from app.main import app
from app.services.cache_service import cache

pytestmark = pytest.mark.integration

runner = CliRunner()


@pytest.fixture(autouse=True)
def restore_logging():
    """The CLI rebinds the root handlers to the runner's streams; put the originals back."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def invoke(*args):
    return runner.invoke(app, list(args))


def payload(result):
    assert result.exit_code == 0, result.output
    return orjson.loads(result.stdout)


class TestEnumerate:
    def test_trees_json(self):
        bushes = payload(invoke("enumerate", "--s", "1,2,0", "--what", "trees"))
        assert len(bushes) == 8

    def test_trunks_text(self):
        result = invoke("enumerate", "--s", "1,2,0", "--what", "trunks", "--out", "text")
        assert result.exit_code == 0
        assert len(result.stdout.split()) == 2

    def test_unknown_kind(self):
        assert invoke("enumerate", "--s", "1,2,0", "--what", "forests").exit_code == 2

    def test_cap_exceeded(self):
        result = invoke("--enumeration-cap", "3", "enumerate", "--s", "1,2,0")
        assert result.exit_code == 3

    @pytest.mark.parametrize("s", ["1,x,0", "1,-1", ""])
    def test_bad_composition(self, s):
        assert invoke("enumerate", "--s", s).exit_code == 2

    def test_bad_output_format(self):
        assert invoke("enumerate", "--s", "1,1", "--out", "dot").exit_code == 2


class TestCaching:
    def test_second_run_is_a_hit(self):
        first = invoke("lattice", "--s", "1,1,1")
        second = invoke("lattice", "--s", "1,1,1")
        assert first.exit_code == second.exit_code == 0
        assert first.stdout == second.stdout
        assert cache.stats["hits"] == 1
        assert cache.stats["sets"] == 1

    def test_no_cache(self):
        first = invoke("--no-cache", "lattice", "--s", "1,1,1")
        second = invoke("--no-cache", "lattice", "--s", "1,1,1")
        assert first.stdout == second.stdout
        assert cache.stats["sets"] == 0
        assert cache.stats["hits"] == 0

    def test_output_format_is_part_of_the_key(self):
        as_json = invoke("lattice", "--s", "1,1,1")
        as_dot = invoke("lattice", "--s", "1,1,1", "--out", "dot")
        assert as_json.stdout != as_dot.stdout
        assert cache.stats["hits"] == 0


class TestCommands:
    def test_insert(self):
        data = payload(invoke("insert", "--s", "1,1", "--x", "0,1"))
        assert data["x"] == ["0", "1"]
        assert "code" in data and data["fiber"]

    def test_insert_rejects_wrong_length(self):
        assert invoke("insert", "--s", "1,1", "--x", "0,1,2").exit_code == 2

    def test_lattice_dot(self):
        result = invoke("lattice", "--s", "1,1,1", "--out", "dot")
        assert result.exit_code == 0
        assert result.stdout.count("->") == 6
        assert "rankdir=BT" in result.stdout

    def test_lattice_json(self):
        data = payload(invoke("lattice", "--s", "1,2,0"))
        assert data["size"] == 8
        assert data["s"] == [1, 2, 0]

    def test_congruence_count(self):
        data = payload(invoke("congruences", "--s", "1,2,0", "--count"))
        assert data["count"] == 13
        assert data["downsets"] == []

    def test_congruence_list(self):
        data = payload(invoke("congruences", "--s", "1,2,0", "--list"))
        assert len(data["downsets"]) == 13

    def test_unknown_family(self):
        assert invoke("congruences", "--s", "1,1,1", "--family", "nope").exit_code == 2

    def test_sylvester_quotient_round_trip(self, tmp_path):
        down = invoke("congruences", "--s", "1,1,1,1", "--family", "sylvester")
        path = tmp_path / "sylvester.json"
        path.write_text(down.stdout)
        data = payload(invoke("quotient", "--s", "1,1,1,1", "--downset", str(path)))
        assert data["lattice"]["size"] == 14

    def test_downset_for_another_composition(self, tmp_path):
        path = tmp_path / "down.json"
        path.write_bytes(orjson.dumps({"s": [1, 1], "arcs": []}))
        assert invoke("quotient", "--s", "1,1,1", "--downset", str(path)).exit_code == 2

    def test_downset_not_closed(self, tmp_path):
        path = tmp_path / "down.json"
        path.write_bytes(orjson.dumps([{"i": 1, "j": 3, "A": [2], "B": [], "r": 1}]))
        assert invoke("quotient", "--s", "1,1,1", "--downset", str(path)).exit_code == 2

    def test_foam_off(self):
        result = invoke("foam", "--s", "1,1,1", "--out", "off")
        assert result.exit_code == 0
        assert result.stdout.startswith("OFF\n")

    def test_quotientoplex_skeleton(self, tmp_path):
        down = invoke("congruences", "--s", "1,1,1", "--family", "sylvester")
        path = tmp_path / "tamari.json"
        path.write_text(down.stdout)
        data = payload(invoke("quotientoplex", "--s", "1,1,1", "--downset", str(path)))
        assert data["f_vector"][0] == 5
        assert len(data["skeleton"]) == 5


class TestCheck:
    def test_passing_suite(self):
        data = payload(invoke("check", "--s", "1,2,0", "--suite", "counting"))
        assert data["passed"]
        assert data["seed"] == 0

    def test_text_table(self):
        result = invoke("check", "--s", "1,1", "--suite", "counting", "--out", "text")
        assert result.exit_code == 0
        assert "PASS" in result.stdout

    def test_needs_exactly_one_target(self):
        assert invoke("check", "--suite", "counting").exit_code == 2

    def test_unknown_suite(self):
        assert invoke("check", "--s", "1,1", "--suite", "nope").exit_code == 2

    def test_failure_exits_four(self, monkeypatch):
        from app.services.check_service import check_service

        monkeypatch.setattr(
            check_service, "suites", {"counting": lambda s: [check_service._result(1, "broken", s, False, "x")]}
        )
        assert invoke("check", "--s", "1,1", "--suite", "counting").exit_code == 4
