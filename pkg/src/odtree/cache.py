"""Memoization of subproblem solutions keyed by instance subset and depth.

Keys carry the exact sorted member-id bytes, so equal instance sets always
collide into one entry and distinct sets never share one: the dict hash
plays the digest role and byte equality resolves collisions exactly.
"""

from __future__ import annotations

from collections import OrderedDict
from typing import NamedTuple


class CacheKey(NamedTuple):
    ids: bytes      # sorted member instance ids, canonical byte form
    depth: int      # remaining depth budget
    gap: int        # permissible-gap budget the entry was certified under


class CacheContradiction(RuntimeError):
    """A stored bound exceeds a stored exact optimum: solver bug."""


class SubproblemCache:
    """Exact results are globally reusable; bound entries only certify that
    no tree scores below them."""

    def __init__(self, capacity: int | None = None):
        self.capacity = capacity
        self._entries: OrderedDict[CacheKey, object] = OrderedDict()

    def __len__(self) -> int:
        return len(self._entries)

    def lookup(self, key: CacheKey, cutoff: int):
        """Return a stored result usable at ``cutoff``, else None.

        An exact entry is always usable.  A bound entry is usable only
        when it already proves that nothing below ``cutoff`` exists.
        """
        entry = self._entries.get(key)
        if entry is None:
            return None
        if self.capacity is not None:
            self._entries.move_to_end(key)
        if entry.exact or entry.score >= cutoff:
            return entry
        return None

    def store(self, key: CacheKey, result) -> None:
        old = self._entries.get(key)
        if old is not None:
            if old.exact:
                if not result.exact and result.score > old.score:
                    raise CacheContradiction(
                        f"bound {result.score} exceeds stored exact optimum {old.score}")
                return
            if result.exact and result.score < old.score:
                raise CacheContradiction(
                    f"exact optimum {result.score} below stored bound {old.score}")
            if not result.exact and result.score <= old.score:
                return
        self._entries[key] = result
        if self.capacity is not None:
            self._entries.move_to_end(key)
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)
