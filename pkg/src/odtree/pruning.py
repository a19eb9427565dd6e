"""Similarity-bound pruning primitives for one feature's threshold search.

All interval arithmetic lives in 1-based threshold-index space; the
similarity arithmetic lives in sorted-instance-position space.  The two
meet only in :func:`a_lower` / :func:`a_upper`, which translate "move at
least ``delta`` instances" into surviving threshold indices.

Moving a threshold from ``u`` to ``u'`` shifts exactly ``|z(u) - z(u')|``
instances between the two sides, so the solved score at ``u`` lower-bounds
every neighbor: a threshold whose shift distance is below ``delta =
max(1, theta_u - ub)`` cannot reach a score below ``ub``.  Survivors are
therefore the thresholds at shift distance >= ``delta``; keeping the
boundary makes every drop strictly certified even when the ``max(1, .)``
floor applies.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .dataset import SplitCandidates


class Interval(NamedTuple):
    """Inclusive 1-based threshold index interval; empty iff lo > hi."""

    lo: int
    hi: int

    @property
    def empty(self) -> bool:
        return self.lo > self.hi


class SplitRecord(NamedTuple):
    theta: int
    theta_l: int
    theta_r: int
    exact_l: bool
    exact_r: bool


class ComputedSplits:
    """Evaluated threshold indices with their scores, ordered for bisection."""

    def __init__(self) -> None:
        self._keys: list[int] = []
        self._recs: dict[int, SplitRecord] = {}

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, w: int) -> bool:
        return w in self._recs

    def insert(self, w: int, rec: SplitRecord) -> None:
        bisect.insort(self._keys, w)
        self._recs[w] = rec

    def get(self, w: int) -> SplitRecord:
        return self._recs[w]

    def neighbors(self, iv: Interval) -> tuple[int | None, int | None]:
        """Closest computed indices strictly outside [lo..hi]: (max < lo, min > hi)."""
        keys = self._keys
        i = bisect.bisect_left(keys, iv.lo)
        u = keys[i - 1] if i > 0 else None
        j = bisect.bisect_right(keys, iv.hi)
        v = keys[j] if j < len(keys) else None
        return u, v


@dataclass
class ZeroMarkers:
    """Dominance frontiers from exactly-zero one-sided scores.

    ``m_l`` is one past the right-most index whose left subtree scored an
    exact zero (everything at or below it is dominated); ``m_r`` mirrors
    it on the right.  ``m_l`` only grows and ``m_r`` only shrinks.
    """

    m: int
    m_l: int = 0
    m_r: int = field(default=-1)

    def __post_init__(self) -> None:
        if self.m_r == -1:
            self.m_r = self.m + 1

    def mark_left_zero(self, w: int) -> None:
        self.m_l = max(self.m_l, w + 1)

    def mark_right_zero(self, w: int) -> None:
        self.m_r = min(self.m_r, w - 1)


def neighbors_of(iv: Interval, computed: ComputedSplits) -> tuple[int | None, int | None]:
    """Closest computed split indices flanking ``iv``."""
    return computed.neighbors(iv)


def slb(theta_old: int, removed_count: int) -> int:
    """Score floor for a shrunken dataset: the removed instances could at
    best all have been misclassified."""
    if removed_count < 0:
        raise ValueError("removed_count must be non-negative")
    return max(0, theta_old - removed_count)


def a_lower(u: int, delta: int, cands: SplitCandidates) -> int | None:
    """Largest threshold index at or below which a split moves at least
    ``delta`` instances out of the left side of ``u``; None if no such
    threshold exists."""
    target = cands.z(u) - delta
    if target < 1:
        return None
    t = int(np.searchsorted(cands.cum, target, side="right"))
    t = min(t, cands.m)
    return t if t >= 1 else None


def a_upper(u: int, delta: int, cands: SplitCandidates) -> int | None:
    """Mirror of :func:`a_lower` on the right side: smallest surviving
    threshold index, or None."""
    target = cands.z(u) + delta
    size = int(cands.cum[-1])
    if target > size:
        return None
    t = int(np.searchsorted(cands.cum, target, side="left")) + 1
    return t if t <= cands.m else None


def prune_nb(iv: Interval, w: int, delta: int, cands: SplitCandidates) -> list[Interval]:
    """Split ``iv`` around the freshly evaluated ``w``, dropping every
    threshold within shift distance ``delta`` (always at least ``w``
    itself).  Returns the surviving sub-intervals, left first."""
    out: list[Interval] = []
    a = a_lower(w, delta, cands)
    if a is not None and iv.lo <= a:
        out.append(Interval(iv.lo, min(a, iv.hi)))
    b = a_upper(w, delta, cands)
    if b is not None and b <= iv.hi:
        out.append(Interval(max(b, iv.lo), iv.hi))
    return out


def prune_is(iv: Interval, u: int | None, v: int | None, delta_u: int, delta_v: int,
             zm: ZeroMarkers, cands: SplitCandidates) -> Interval:
    """Shrink ``iv`` using the flanking computed splits and zero markers.

    Absent neighbors and non-positive deltas contribute nothing.  The
    result may be empty.
    """
    lo, hi = iv
    if u is not None and delta_u >= 1:
        t = a_upper(u, delta_u, cands)
        lo = max(lo, t if t is not None else cands.m + 1)
    if v is not None and delta_v >= 1:
        t = a_lower(v, delta_v, cands)
        hi = min(hi, t if t is not None else 0)
    lo = max(lo, zm.m_l)
    hi = min(hi, zm.m_r)
    return Interval(lo, hi)


def prune_sp(iv: Interval, ub: int, theta_ul: int | None, theta_vr: int | None) -> Interval:
    """Drop the whole interval when the flanking one-sided scores already
    overshoot ``ub``; otherwise return it unchanged."""
    if theta_ul is not None and theta_vr is not None and theta_ul + theta_vr > ub:
        return Interval(1, 0)
    return iv
