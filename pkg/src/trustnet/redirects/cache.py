"""Cached mappings from a cleaned original URL key to its final target key.

Clients report the chains they follow; the server answers future batch
lookups from this cache instead of refetching. A mapping stays alive as
long as somebody keeps asking for it: every hit refreshes
``last_requested_at``, and eviction removes only mappings that nobody has
requested within the TTL.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, replace
from typing import Iterable, Protocol

DEFAULT_MAPPING_TTL = 7 * 24 * 3600.0  # seconds since last request


class InvalidMapping(ValueError):
    """Raised for self-mappings (original and target keys identical)."""


@dataclass(frozen=True)
class RedirectMapping:
    original_key: str
    target_key: str
    created_at: float
    last_requested_at: float

    def __post_init__(self) -> None:
        if self.original_key == self.target_key:
            raise InvalidMapping(f"self-mapping for {self.original_key!r}")
        if self.last_requested_at < self.created_at:
            raise ValueError("last_requested_at precedes created_at")


class MappingStore(Protocol):
    """Cache contract shared by the in-memory and persistent backends."""

    def put_mapping(self, original_key: str, target_key: str, now: float | None = None) -> RedirectMapping: ...

    def get_mappings(self, originals: Iterable[str], now: float | None = None) -> dict[str, str]: ...

    def evict_mappings(self, now: float | None = None, ttl: float = DEFAULT_MAPPING_TTL) -> int: ...


class InMemoryMappingCache:
    """Thread-safe in-process implementation of the mapping cache."""

    def __init__(self) -> None:
        self._entries: dict[str, RedirectMapping] = {}
        self._lock = threading.Lock()

    def put_mapping(
        self, original_key: str, target_key: str, now: float | None = None
    ) -> RedirectMapping:
        """Insert or refresh; on a conflicting target the latest one wins."""
        if original_key == target_key:
            raise InvalidMapping(f"self-mapping for {original_key!r}")
        now = time.time() if now is None else now
        with self._lock:
            existing = self._entries.get(original_key)
            if existing is None:
                mapping = RedirectMapping(original_key, target_key, now, now)
            else:
                mapping = replace(
                    existing,
                    target_key=target_key,
                    last_requested_at=max(existing.last_requested_at, now),
                )
            self._entries[original_key] = mapping
            return mapping

    def get_mappings(
        self, originals: Iterable[str], now: float | None = None
    ) -> dict[str, str]:
        """Targets for the hits only; every hit's last-requested time moves to now."""
        now = time.time() if now is None else now
        hits: dict[str, str] = {}
        with self._lock:
            for key in originals:
                entry = self._entries.get(key)
                if entry is None:
                    continue
                self._entries[key] = replace(
                    entry, last_requested_at=max(entry.last_requested_at, now)
                )
                hits[key] = entry.target_key
        return hits

    def evict_mappings(
        self, now: float | None = None, ttl: float = DEFAULT_MAPPING_TTL
    ) -> int:
        """Drop every mapping not requested within ``ttl``; returns the count."""
        if ttl <= 0:
            raise ValueError("ttl must be positive")
        now = time.time() if now is None else now
        with self._lock:
            stale = [
                key
                for key, entry in self._entries.items()
                if now - entry.last_requested_at > ttl
            ]
            for key in stale:
                del self._entries[key]
        return len(stale)

    def snapshot(self) -> dict[str, RedirectMapping]:
        with self._lock:
            return dict(self._entries)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)
