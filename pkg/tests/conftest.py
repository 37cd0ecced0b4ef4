"""Shared fixtures for the sweak test suite."""

import pytest

from app.core.config import settings
from app.models.bush import SComposition
from app.services.cache_service import cache
from app.services.error_handler import error_handler


@pytest.fixture
def s120():
    return SComposition.of(1, 2, 0)


@pytest.fixture
def s210():
    return SComposition.of(2, 1, 0)


@pytest.fixture
def s111():
    return SComposition.of(1, 1, 1)


@pytest.fixture
def s1111():
    return SComposition.of(1, 1, 1, 1)


@pytest.fixture
def s11():
    return SComposition.of(1, 1)


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Point the result cache at a fresh directory for every test."""
    monkeypatch.setattr(settings, "cache_dir", str(tmp_path / "cache"))
    monkeypatch.setattr(settings, "cache_enabled", True)
    monkeypatch.setattr(settings, "seed", 0)
    monkeypatch.setattr(settings, "enumeration_cap", settings.enumeration_cap)
    monkeypatch.setattr(settings, "arc_cap", settings.arc_cap)
    cache.configure(cache_dir=str(tmp_path / "cache"), enabled=True)
    cache.stats = {"hits": 0, "misses": 0, "sets": 0, "corrupt": 0}
    yield
    error_handler.clear_error_history()


@pytest.fixture
def worked_example():
    """The nine-node insertion example with its point."""
    s = SComposition.of(1, 2, 2, 0, 2, 2, 1, 2, 1)
    x = ("5", "6", "3", "5", "4", "4", "11/2", "3/2", "1/4")
    return s, x
