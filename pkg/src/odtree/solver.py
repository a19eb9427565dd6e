"""Depth-bounded optimal tree search: recursive subproblem solving with
upper-bound management, interval pruning, and tree reconstruction.

Subproblem contract (the load-bearing invariant of the whole search):
``_solve(view, depth, cutoff, gap)`` returns either

* an exact result: an achieved, reconstructible score within ``gap`` of
  the subproblem optimum (equal to it when ``gap == 0``), or
* a bound: ``exact=False`` with ``score`` a certified lower bound on the
  optimum, at least ``cutoff`` when ``gap == 0``.

Every pruning rule consumes scores monotonically (a smaller score prunes
less), so bound results are always safe to feed back into the search.
Incumbents are only ever taken from fully exact split evaluations, which
keeps returned trees reconstructible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import tree as tree_mod
from .cache import CacheKey, SubproblemCache
from .dataset import Dataset, SubsetView
from .depth2 import LEAF, d2_split
from .pruning import ComputedSplits, Interval, SplitRecord, ZeroMarkers, prune_is, prune_nb, prune_sp


class SolverInternalError(RuntimeError):
    """An internal consistency check failed; indicates a solver bug."""


@dataclass(frozen=True)
class SolverConfig:
    max_depth: int
    max_gap: float = 0          # >= 1: absolute misclassifications; < 1: fraction of n
    time_limit: float | None = None
    enable_nb: bool = True
    enable_is: bool = True
    enable_sp: bool = True
    enable_d2: bool = True
    enable_cache: bool = True
    eta_rule: str = "min"       # "min" (default) or "max": relaxed right-child cutoff
    cache_capacity: int | None = None

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.max_gap < 0:
            raise ValueError("max_gap must be >= 0")
        if self.eta_rule not in ("min", "max"):
            raise ValueError("eta_rule must be 'min' or 'max'")


def resolve_max_gap(max_gap: float, n: int) -> int:
    """Absolute gap budget: fractions below one become ``floor(fraction * n)``."""
    if max_gap < 0:
        raise ValueError("max_gap must be >= 0")
    if 0 < max_gap < 1:
        return int(max_gap * n)
    return int(max_gap)


def distribute_gap(total_gap: int) -> tuple[int, int, int]:
    """Split a gap budget: half is spent at the current depth, the rest is
    divided over the two subproblems (left child gets the odd unit)."""
    local = total_gap // 2
    remaining = total_gap - local
    left = (remaining + 1) // 2
    return local, left, remaining - left


@dataclass(slots=True)
class SubproblemResult:
    """Outcome of one subproblem: see the module docstring for the contract.

    ``lower`` is a certified lower bound on the true optimum (equal to
    ``score`` for exact zero-gap results and for bounds).
    """

    score: int
    exact: bool
    lower: int
    label: int | None = None                      # dense label when a leaf
    split: tuple[int, float] | None = None        # (feature, threshold)
    left: "SubproblemResult | None" = None
    right: "SubproblemResult | None" = None
    timed_out: bool = False


@dataclass
class SearchStats:
    ct_calls: int = 0
    branch_calls: int = 0
    split_evals: int = 0
    d2split_calls: int = 0
    d2_swept: int = 0
    cache_hits: int = 0
    cache_misses: int = 0
    nb_events: int = 0
    is_events: int = 0
    sp_events: int = 0
    intervals_processed: int = 0
    elapsed: float = 0.0
    timed_out: bool = False
    trace: list[tuple[float, int]] = field(default_factory=list)

    def counters(self) -> dict:
        """Deterministic counter snapshot (no wall-clock fields)."""
        return {
            "ct_calls": self.ct_calls,
            "branch_calls": self.branch_calls,
            "split_evals": self.split_evals,
            "d2split_calls": self.d2split_calls,
            "cache_hits": self.cache_hits,
            "cache_misses": self.cache_misses,
            "nb_events": self.nb_events,
            "is_events": self.is_events,
            "sp_events": self.sp_events,
            "intervals_processed": self.intervals_processed,
            "trace_scores": [s for _, s in self.trace],
        }

    def as_dict(self) -> dict:
        out = self.counters()
        out["d2_swept"] = self.d2_swept
        out["elapsed"] = self.elapsed
        out["timed_out"] = self.timed_out
        out["trace"] = [[t, s] for t, s in self.trace]
        return out


@dataclass
class FitResult:
    tree: tree_mod.Node
    score: int
    gap: int              # certified distance to the optimum (score - proven lower bound)
    stats: SearchStats
    result: SubproblemResult
    timed_out: bool


def _leaf_result(view: SubsetView) -> SubproblemResult:
    score, label = view.leaf_score()
    return SubproblemResult(score, True, score, label=label)


class Solver:
    """One search over one dataset; holds the cache, stats, and deadline."""

    def __init__(self, dataset: Dataset, config: SolverConfig):
        self.dataset = dataset
        self.config = config
        self.stats = SearchStats()
        self.cache = SubproblemCache(config.cache_capacity)
        self.result_observer = None   # callable(view, depth, cutoff, result), for instrumentation
        self._inf = dataset.n + 1     # scores never reach it
        self._deadline: float | None = None
        self._t0 = 0.0
        self._timed_out = False
        self._root_active = False
        self._root_best = 0

    # -- public entry points -------------------------------------------------

    def solve(self, view: SubsetView | None = None, depth: int | None = None,
              cutoff: int | None = None) -> SubproblemResult:
        """Solve a subproblem from the top: installs the deadline, resolves
        the gap budget, and records the anytime trace."""
        if view is None:
            view = self.dataset.root_view()
        if depth is None:
            depth = self.config.max_depth
        if cutoff is None:
            cutoff = self._inf
        gap = resolve_max_gap(self.config.max_gap, view.size)
        self._t0 = time.monotonic()
        self._deadline = None if self.config.time_limit is None else self._t0 + self.config.time_limit
        self._timed_out = False
        self._root_active = True
        self._root_best = self._inf
        try:
            result = self._solve(view, depth, cutoff, gap, root=True)
        finally:
            self._root_active = False
        self.stats.elapsed = time.monotonic() - self._t0
        self.stats.timed_out = self._timed_out
        return result

    def fit(self) -> FitResult:
        """Train on the full dataset and reconstruct the resulting tree."""
        view = self.dataset.root_view()
        result = self.solve(view)
        t = reconstruct_tree(result, view)
        gap = result.score - max(0, result.lower)
        return FitResult(t, result.score, gap, self.stats, result, self._timed_out)

    def split_eval(self, view: SubsetView, depth: int, f: int, tau: float,
                   ub: int | None = None) -> tuple[SubproblemResult, SubproblemResult]:
        """Evaluate one fixed split: left child solved at ``ub``, right child
        at the hybrid relaxed cutoff (slack taken over the full threshold
        range)."""
        if ub is None:
            ub = self._inf
        cands = view.split_candidates(f)
        w = cands.index_of(tau)
        gap = resolve_max_gap(self.config.max_gap, view.size)
        _, gap_l, gap_r = distribute_gap(gap)
        return self._eval_split(view, depth, f, cands, w, ub, Interval(1, cands.m),
                                gap_l, gap_r)

    # -- internals -------------------------------------------------------------

    def _now(self) -> float:
        return time.monotonic() - self._t0

    def _expired(self) -> bool:
        if self._timed_out:
            return True
        if self._deadline is not None and time.monotonic() > self._deadline:
            self._timed_out = True
        return self._timed_out

    def _note_incumbent(self, score: int) -> None:
        if self._root_active and score < self._root_best:
            self._root_best = score
            self.stats.trace.append((self._now(), score))

    def _observe(self, view, depth, cutoff, result) -> None:
        if self.result_observer is not None:
            self.result_observer(view, depth, cutoff, result)

    def _solve(self, view: SubsetView, depth: int, cutoff: int, gap: int,
               root: bool = False) -> SubproblemResult:
        st = self.stats
        st.ct_calls += 1
        leaf = _leaf_result(view)
        if root:
            self._note_incumbent(leaf.score)
        if depth == 0 or leaf.score == 0:
            self._observe(view, depth, cutoff, leaf)
            return leaf
        if cutoff <= 0:
            result = SubproblemResult(0, False, 0)
            self._observe(view, depth, cutoff, result)
            return result

        key = None
        if self.config.enable_cache:
            key = CacheKey(view.ids_key, depth, gap)
            entry = self.cache.lookup(key, cutoff)
            if entry is not None:
                st.cache_hits += 1
                self._observe(view, depth, cutoff, entry)
                return entry
            st.cache_misses += 1

        local_gap, gap_l, gap_r = distribute_gap(gap)
        best = leaf
        floor: float = leaf.score
        for f in range(self.dataset.p):
            if self._expired():
                break
            ub = min(best.score, cutoff)
            fbest, ffloor = self._branch(view, depth, f, best.score, ub,
                                         local_gap, gap_l, gap_r, gap, root)
            floor = min(floor, ffloor)
            if fbest is not None and fbest.score < best.score:
                best = fbest
                if root:
                    self._note_incumbent(best.score)
            if best.score == 0:
                break

        if self._timed_out:
            result = replace(best, exact=False, lower=0, timed_out=True)
            self._observe(view, depth, cutoff, result)
            return result

        if best.score < cutoff or floor >= best.score:
            result = replace(best, lower=min(best.score, int(floor)))
        else:
            bound = int(floor)
            result = SubproblemResult(bound, False, bound)
        if key is not None:
            self.cache.store(key, result)
        self._observe(view, depth, cutoff, result)
        return result

    def _branch(self, view: SubsetView, depth: int, f: int, theta_init: int, ub: int,
                local_gap: int, gap_l: int, gap_r: int, gap_total: int,
                root: bool) -> tuple[SubproblemResult | None, float]:
        """Search feature ``f``'s thresholds under Alg.-style interval pruning.

        Returns the best exact split result found (None if the leaf was
        never beaten) and the certified floor over this feature's split
        options.
        """
        cfg = self.config
        st = self.stats
        st.branch_calls += 1
        cands = view.split_candidates(f)
        m = cands.m
        if m == 0:
            return None, float("inf")

        theta_opt = theta_init
        best: SubproblemResult | None = None
        zm = ZeroMarkers(m)
        computed = ComputedSplits()
        stack = [Interval(1, m)]
        floor = float("inf")

        while stack:
            if self._expired():
                break
            iv = stack.pop()
            st.intervals_processed += 1
            u, v = computed.neighbors(iv)
            if cfg.enable_is:
                delta_u = computed.get(u).theta - (ub - local_gap) if u is not None else 0
                delta_v = computed.get(v).theta - (ub - local_gap) if v is not None else 0
                shrunk = prune_is(iv, u, v, delta_u, delta_v, zm, cands)
                if shrunk != iv:
                    st.is_events += 1
                    floor = min(floor, ub - gap_total)
                    iv = shrunk
                    if iv.empty:
                        continue
            if cfg.enable_sp and u is not None and v is not None:
                kept = prune_sp(iv, ub - local_gap, computed.get(u).theta_l,
                                computed.get(v).theta_r)
                if kept.empty:
                    st.sp_events += 1
                    floor = min(floor, ub - gap_total)
                    continue
            if iv.empty:
                continue

            w = (iv.lo + iv.hi) // 2
            res_l, res_r = self._eval_split(view, depth, f, cands, w, ub, iv, gap_l, gap_r)
            if self._timed_out:
                break
            st.split_evals += 1
            theta_w = res_l.score + res_r.score
            floor = min(floor, res_l.lower + res_r.lower)

            if res_l.exact and res_l.score == 0:
                zm.mark_left_zero(w)
            if res_r.exact and res_r.score == 0:
                zm.mark_right_zero(w)
            if res_l.exact and res_r.exact and theta_w < theta_opt:
                theta_opt = theta_w
                best = SubproblemResult(theta_w, True, res_l.lower + res_r.lower,
                                        split=(f, cands.tau(w)), left=res_l, right=res_r)
                ub = min(ub, theta_w)
                if root:
                    self._note_incumbent(theta_w)
                if theta_opt == 0:
                    break

            if cfg.enable_nb:
                delta = max(1, theta_w - (ub - local_gap))
                pieces = prune_nb(iv, w, delta, cands)
                covered = sum(p.hi - p.lo + 1 for p in pieces)
                if covered < (iv.hi - iv.lo):   # dropped more than w itself
                    st.nb_events += 1
                    floor = min(floor, ub - gap_total)
            else:
                pieces = [p for p in (Interval(iv.lo, w - 1), Interval(w + 1, iv.hi))
                          if not p.empty]
            stack.extend(pieces)   # left pushed first: right explored first
            computed.insert(w, SplitRecord(theta_w, res_l.score, res_r.score,
                                           res_l.exact, res_r.exact))

        return best, floor

    def _eval_split(self, view: SubsetView, depth: int, f, cands, w: int, ub: int,
                    iv: Interval, gap_l: int, gap_r: int
                    ) -> tuple[SubproblemResult, SubproblemResult]:
        if depth == 2 and self.config.enable_d2:
            theta_l, spec_l, theta_r, spec_r = d2_split(view, f, w, cands, self.stats)
            return self._result_from_spec(theta_l, spec_l), self._result_from_spec(theta_r, spec_r)

        if depth == 1:
            # Children are leaves; score them from label slices directly.
            z_w = cands.z(w)
            y = self.dataset.y[view.order[f]]
            res_l = self._leaf_from_labels(y[:z_w])
            res_r = self._leaf_from_labels(y[z_w:])
            return res_l, res_r

        left_view, right_view = view.split(f, w)
        res_l = self._solve(left_view, depth - 1, ub, gap_l)
        if self._timed_out:
            return res_l, SubproblemResult(0, False, 0)
        z_w = cands.z(w)
        eta_sides = (z_w - cands.z(iv.lo), cands.z(iv.hi) - z_w)
        eta = min(eta_sides) if self.config.eta_rule == "min" else max(eta_sides)
        ub_r = max(ub - res_l.score, eta)
        if ub_r <= 0:
            # Right side provably uninteresting; an unsolved zero bound is
            # always a valid lower bound and never poisons pruning.
            res_r = SubproblemResult(0, False, 0)
            self._observe(right_view, depth - 1, ub_r, res_r)
        else:
            res_r = self._solve(right_view, depth - 1, ub_r, gap_r)
        return res_l, res_r

    def _leaf_from_labels(self, labels: np.ndarray) -> SubproblemResult:
        hist = np.bincount(labels, minlength=self.dataset.label_count)
        label = int(np.argmax(hist))
        score = int(len(labels) - hist[label])
        return SubproblemResult(score, True, score, label=label)

    def _result_from_spec(self, score: int, spec) -> SubproblemResult:
        if spec[0] == LEAF:
            return SubproblemResult(score, True, score, label=spec[1])
        _, f2, tau, lab_l, lab_r, s_ll, s_lr = spec
        left = SubproblemResult(s_ll, True, s_ll, label=lab_l)
        right = SubproblemResult(s_lr, True, s_lr, label=lab_r)
        return SubproblemResult(score, True, score, split=(f2, tau), left=left, right=right)


def reconstruct_tree(result: SubproblemResult, view: SubsetView) -> tree_mod.Node:
    """Materialize the tree recorded in a result chain and verify it by
    replaying it over the view."""
    ds = view.dataset

    def build(res: SubproblemResult) -> tree_mod.Node:
        if res.split is None:
            if res.label is None:
                raise SolverInternalError("result without split or label")
            return tree_mod.Leaf(ds.labels[res.label])
        f, tau = res.split
        return tree_mod.Branch(f, tau, build(res.left), build(res.right))

    root = build(result)
    ids = view.member_ids()
    preds = tree_mod.predict(root, ds.X[ids])
    actual = ds.decode_labels(ds.y[ids])
    mis = sum(1 for p, a in zip(preds, actual) if p != a)
    if mis != result.score:
        raise SolverInternalError(
            f"replayed tree scores {mis}, solver reported {result.score}")
    return root


def fit(dataset: Dataset, config: SolverConfig) -> FitResult:
    """Convenience one-shot training entry point."""
    return Solver(dataset, config).fit()
