import networkx as nx
import orjson
import pytest
from pydantic import BaseModel, ValidationError

from app.core.exceptions import (
    CapExceeded,
    DoublingFailed,
    InputError,
    InvariantViolation,
    NotADownSet,
    SWeakError,
)
from app.models.arc import SArc
from app.schemas.lattice import LatticeSchema
from app.services.cache_service import CacheService, cache
from app.services.congruence_service import SYLVESTER, congruence_service
from app.services.error_handler import ErrorCategory, error_handler
from app.services.export_service import export_service
from app.services.geometry_service import geometry_service
from app.services.lattice_service import lattice_service
from app.services.shardoplex_service import shardoplex_service


class TestCache:
    def test_hit_after_set(self):
        assert cache.get("lattice", s="1,1") is None
        cache.set("lattice", {"artifact": "x"}, s="1,1")
        assert cache.get("lattice", s="1,1") == {"artifact": "x"}
        stats = cache.get_stats()
        assert stats["hits"] == 1 and stats["misses"] == 1 and stats["total_entries"] == 1

    def test_key_depends_on_params(self):
        cache.set("lattice", {"artifact": "a"}, s="1,1", seed=0)
        assert cache.get("lattice", s="1,1", seed=1) is None
        assert cache._generate_key("k", a=1, b=2) == cache._generate_key("k", b=2, a=1)

    def test_corrupt_entry(self):
        cache.set("foam", {"artifact": "y"}, s="1")
        path = cache._path(cache._generate_key("foam", s="1"))
        path.write_bytes(b"{not json")
        assert cache.get("foam", s="1") is None
        assert cache.stats["corrupt"] == 1
        assert not path.exists()

    def test_disabled(self, tmp_path):
        off = CacheService(cache_dir=str(tmp_path / "off"), enabled=False)
        off.set("k", {"v": 1})
        assert off.get("k") is None
        assert not (tmp_path / "off").exists()

    def test_delete_and_clear(self):
        cache.set("k", [1, 2])
        assert cache.delete("k")
        assert not cache.delete("k")
        cache.set("k", [1])
        cache.clear()
        assert cache.get_stats()["total_entries"] == 0


class TestErrorHandler:
    @pytest.mark.parametrize(
        "error, category, code",
        [
            (InputError("bad"), ErrorCategory.USAGE, 2),
            (NotADownSet("missing"), ErrorCategory.USAGE, 2),
            (CapExceeded("trees", 10, 5), ErrorCategory.CAP, 3),
            (InvariantViolation("broken"), ErrorCategory.INVARIANT, 4),
            (SWeakError("other"), ErrorCategory.SYSTEM, 1),
            (RuntimeError("boom"), ErrorCategory.SYSTEM, 1),
        ],
    )
    def test_exit_codes(self, error, category, code):
        report = error_handler.handle_error(error, operation="test", context={"s": "1"})
        assert report["category"] == category.value
        assert report["exit_code"] == code == error_handler.exit_code(error)

    def test_validation_error_is_usage(self):
        class Model(BaseModel):
            n: int

        with pytest.raises(ValidationError) as info:
            Model.model_validate({"n": "x"})
        assert error_handler.exit_code(info.value) == 2

    def test_witness_and_history(self):
        report = error_handler.handle_error(DoublingFailed("not a doubling", witness=["L1.L1"]))
        assert "L1.L1" in report["witness"]
        assert "stack_trace" in report
        stats = error_handler.get_error_statistics()
        assert stats["total_errors"] == 1
        assert stats["by_category"] == {"invariant": 1}


class TestExport:
    def test_json_is_deterministic(self, s111):
        schema = LatticeSchema.from_lattice(s111, lattice_service.sweak_lattice(s111))
        first, second = export_service.to_json(schema), export_service.to_json(schema)
        assert first == second
        assert first.endswith(b"\n")
        assert export_service.from_json(first, LatticeSchema) == schema
        with pytest.raises(InputError):
            export_service.from_json(b"{", LatticeSchema)

    def test_hasse_dot(self, s111):
        dot = export_service.hasse_dot(lattice_service.sweak_lattice(s111))
        assert dot.startswith("digraph")
        assert dot.count("->") == 6
        assert "rankdir=BT" in dot

    def test_digraph_dot_sorted(self):
        graph = nx.DiGraph([("b", "a"), ("a", "c")])
        dot = export_service.digraph_dot(graph, "g")
        assert dot.index("a -> c") < dot.index("b -> a")

    def test_off_foam(self, s111):
        text = export_service.complex_off(geometry_service.foam(s111))
        lines = text.splitlines()
        assert lines[0] == "OFF"
        vertices, faces, _ = map(int, lines[1].split())
        assert faces == 6
        assert len(lines) == 2 + vertices + faces

    def test_off_quotientoplex(self, s111):
        down = congruence_service.named_downset(s111, SYLVESTER)
        text = export_service.trunk_complex_off(shardoplex_service.quotientoplex(s111, down))
        assert text.splitlines()[1].split()[:2] == ["5", "1"]

    def test_off_dimension_limit(self):
        from app.models.bush import SComposition

        s = SComposition.of(1, 1, 1, 1, 1)
        with pytest.raises(InputError):
            export_service.trunk_complex_off(shardoplex_service.shardoplex(s, SArc.of(1, 2)))

    def test_sum_zero_basis(self):
        basis = export_service.sum_zero_basis(4)
        assert basis.shape == (4, 3)
        assert abs(basis.sum(axis=0)).max() < 1e-9

    def test_json_list_payload(self):
        assert orjson.loads(export_service.to_json([SArc.of(1, 2).as_dict()])) == [
            {"A": [], "B": [], "i": 1, "j": 2, "r": 1}
        ]
