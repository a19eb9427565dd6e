"""Reference implementations used to check and contextualize the solver:
an exhaustive enumeration oracle, a greedy top-down heuristic, and tree
evaluation.

The oracle deliberately avoids the solver's machinery: it recounts label
slices per threshold instead of maintaining running counts and never
prunes.  It shares only the view/threshold enumeration so that both
searches range over the identical split space.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from . import tree as tree_mod
from .dataset import SubsetView

DEFAULT_BUDGET = 2_000_000


class BudgetExceededError(RuntimeError):
    """Raised when the enumeration would exceed its operation budget."""


def _leaf_of(view: SubsetView) -> tuple[int, tree_mod.Leaf]:
    score, label = view.leaf_score()
    return score, tree_mod.Leaf(view.dataset.labels[label])


def brute_force_odt(view: SubsetView, depth: int,
                    budget: int = DEFAULT_BUDGET) -> tuple[int, tree_mod.Node]:
    """Exact optimum by enumerating every (feature, threshold) at every node.

    Ties break like the solver's: the leaf wins unless a split is strictly
    better; among splits, the first strictly better one in (feature,
    threshold) order wins.  Memoized on (instance set, depth); the budget
    counts split evaluations and guards against infeasible instances.
    """
    evals = 0
    memo: dict[tuple[bytes, int], tuple[int, tree_mod.Node]] = {}

    def rec(v: SubsetView, d: int) -> tuple[int, tree_mod.Node]:
        nonlocal evals
        best_score, best_tree = _leaf_of(v)
        if d == 0 or best_score == 0:
            return best_score, best_tree
        key = (v.ids_key, d)
        hit = memo.get(key)
        if hit is not None:
            return hit
        for f in range(v.dataset.p):
            cands = v.split_candidates(f)
            for t in range(1, cands.m + 1):
                evals += 1
                if evals > budget:
                    raise BudgetExceededError(
                        f"enumeration exceeded {budget} split evaluations; "
                        "use a smaller instance or raise the budget")
                lv, rv = v.split(f, t)
                sl, tl = rec(lv, d - 1)
                sr, tr = rec(rv, d - 1)
                if sl + sr < best_score:
                    best_score = sl + sr
                    best_tree = tree_mod.Branch(f, cands.tau(t), tl, tr)
                    if best_score == 0:
                        memo[key] = (best_score, best_tree)
                        return best_score, best_tree
        memo[key] = (best_score, best_tree)
        return best_score, best_tree

    return rec(view, depth)


def _gini(counts: np.ndarray, total: int) -> float:
    if total == 0:
        return 0.0
    p = counts / total
    return 1.0 - float(np.dot(p, p))


def greedy_tree(view: SubsetView, depth: int) -> tree_mod.Node:
    """Top-down induction minimizing weighted Gini impurity at each node,
    stopping at the depth limit or purity."""
    ds = view.dataset
    score, leaf = _leaf_of(view)
    if depth == 0 or score == 0:
        return leaf
    best = None   # (impurity, f, t)
    for f in range(ds.p):
        cands = view.split_candidates(f)
        y_sorted = ds.y[view.order[f]]
        for t in range(1, cands.m + 1):
            z = cands.z(t)
            left = np.bincount(y_sorted[:z], minlength=ds.label_count)
            right = view.histogram - left
            impurity = (z * _gini(left, z) + (view.size - z) * _gini(right, view.size - z)) / view.size
            if best is None or impurity < best[0] - 1e-12:
                best = (impurity, f, t)
    if best is None:
        return leaf
    _, f, t = best
    lv, rv = view.split(f, t)
    return tree_mod.Branch(f, view.split_candidates(f).tau(t),
                           greedy_tree(lv, depth - 1), greedy_tree(rv, depth - 1))


def evaluate(node: tree_mod.Node, view: SubsetView) -> tuple[int, float]:
    """Misclassification count and accuracy of a tree over a view."""
    if view.size == 0:
        raise ValueError("cannot evaluate on an empty view")
    ds = view.dataset
    mf = tree_mod.max_feature(node)
    if mf >= ds.p:
        raise ValueError(f"tree references feature {mf}, data has {ds.p} features")
    ids = view.member_ids()
    preds = tree_mod.predict(node, ds.X[ids])
    actual = ds.decode_labels(ds.y[ids])
    mis = sum(1 for pr, ac in zip(preds, actual) if pr != ac)
    return mis, 1.0 - mis / view.size


def label_frequencies(view: SubsetView) -> Counter:
    """Original-domain label histogram, mostly for reporting."""
    ds = view.dataset
    return Counter(ds.decode_labels(ds.y[view.member_ids()]))
