"""
Cache Service for computed artifacts

Results are stored on disk as JSON, content-addressed by the sha256 of the
command name and its parameters, so a repeated run with the same
configuration reads back byte-identical output.
"""

import hashlib
import logging
import os
import shutil
import tempfile
from pathlib import Path
from typing import Any, Dict, Optional

import orjson
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt, wait_fixed

from app.core.config import settings

logger = logging.getLogger(__name__)

DUMP_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2


class CacheService:
    """On-disk JSON cache with atomic writes."""

    def __init__(self, cache_dir: Optional[str] = None, enabled: Optional[bool] = None, retries: Optional[int] = None):
        self.cache_dir = Path(cache_dir or settings.cache_dir)
        self.enabled = settings.cache_enabled if enabled is None else enabled
        self.retries = retries or settings.cache_write_retries
        self.stats = {"hits": 0, "misses": 0, "sets": 0, "corrupt": 0}

    def configure(self, cache_dir: Optional[str] = None, enabled: Optional[bool] = None) -> None:
        if cache_dir is not None:
            self.cache_dir = Path(cache_dir)
        if enabled is not None:
            self.enabled = enabled

    def _generate_key(self, key: str, **kwargs) -> str:
        """sha256 over the key and its sorted parameters."""
        payload = orjson.dumps({"key": key, "params": kwargs}, option=orjson.OPT_SORT_KEYS)
        return hashlib.sha256(payload).hexdigest()

    def _path(self, cache_key: str) -> Path:
        return self.cache_dir / cache_key[:2] / f"{cache_key}.json"

    def get(self, key: str, **kwargs) -> Optional[Any]:
        """Read a cached value; corrupt entries are removed and reported as misses."""
        if not self.enabled:
            return None
        path = self._path(self._generate_key(key, **kwargs))
        if not path.exists():
            self.stats["misses"] += 1
            return None
        try:
            value = orjson.loads(path.read_bytes())
        except (orjson.JSONDecodeError, OSError) as e:
            logger.warning(f"Discarding corrupt cache entry {path.name}: {e}")
            self.stats["corrupt"] += 1
            self.stats["misses"] += 1
            path.unlink(missing_ok=True)
            return None
        self.stats["hits"] += 1
        return value

    def set(self, key: str, value: Any, **kwargs) -> None:
        """Write atomically: dump to a temp file next to the target, then rename."""
        if not self.enabled:
            return
        path = self._path(self._generate_key(key, **kwargs))
        data = orjson.dumps(value, option=DUMP_OPTIONS)
        for attempt in Retrying(
            stop=stop_after_attempt(self.retries),
            wait=wait_fixed(0.05),
            retry=retry_if_exception_type(OSError),
            reraise=True,
        ):
            with attempt:
                self._write(path, data)
        self.stats["sets"] += 1

    def _write(self, path: Path, data: bytes) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
            os.replace(tmp, path)
        except OSError:
            Path(tmp).unlink(missing_ok=True)
            raise

    def delete(self, key: str, **kwargs) -> bool:
        path = self._path(self._generate_key(key, **kwargs))
        if path.exists():
            path.unlink()
            return True
        return False

    def clear(self) -> None:
        """Remove every entry and reset the statistics."""
        if self.cache_dir.exists():
            shutil.rmtree(self.cache_dir)
        self.stats = {"hits": 0, "misses": 0, "sets": 0, "corrupt": 0}

    def get_stats(self) -> Dict[str, Any]:
        total_requests = self.stats["hits"] + self.stats["misses"]
        hit_rate = (self.stats["hits"] / total_requests * 100) if total_requests > 0 else 0
        entries = len(list(self.cache_dir.glob("*/*.json"))) if self.cache_dir.exists() else 0
        return {
            **self.stats,
            "hit_rate_percentage": round(hit_rate, 2),
            "total_entries": entries,
            "total_requests": total_requests,
        }


# Global cache instance
cache = CacheService()
