"""Specialized evaluator for both depth-one children of a root split.

For a fixed root split the per-label totals of each side are counted
once; then, for every candidate second feature, one sweep over the view
in that feature's sorted order maintains running per-label counts from
which all four candidate leaves follow: the left leaf of a side is the
running count itself and the right leaf is the side total minus it.
Sweeping both sides in the same pass keeps the cost at one visit per
instance per second feature.

Candidate leaves are scored only at genuine threshold positions, i.e.
where the value id changes within the side; the no-second-split option is
seeded as the initial best of each side.  The sweep is compiled with
numba when available; a vectorized numpy path provides identical results
otherwise.
"""

from __future__ import annotations

import numpy as np

from .dataset import SplitCandidates, SubsetView

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional speedup
    njit = None

# Subtree spec: ("leaf", label) or
# ("split", feature, threshold, left_label, right_label, left_score, right_score)
LEAF = "leaf"
SPLIT = "split"


def _d2_sweep(order, vids, ys, mask, f1, z_w, fq_l, fq_r, leaf_l, leaf_r):
    """Scan every second feature once, scoring both sides' candidate splits.

    ``mask`` must be a zeroed byte array over dataset instance ids; the
    first ``z_w`` members of ``order[f1]`` form the left side.  Starting
    from the sides' leaf scores, returns per side: best score, winning
    second feature, split position within the side, and the value ids
    below/at the boundary (-1s when the leaf stands).
    """
    n_labels = fq_l.shape[0]
    p, size = order.shape
    for j in range(z_w):
        mask[order[f1, j]] = 1
    n_l = z_w
    n_r = size - z_w
    best_l = leaf_l
    best_r = leaf_r
    f2_l = k_l = pv_l = cv_l = -1
    f2_r = k_r = pv_r = cv_r = -1
    c_l = np.zeros(n_labels, np.int64)
    c_r = np.zeros(n_labels, np.int64)
    for f2 in range(p):
        if best_l + best_r == 0:
            break
        for c in range(n_labels):
            c_l[c] = 0
            c_r[c] = 0
        cnt_l = 0
        cnt_r = 0
        prev_l = -1
        prev_r = -1
        for i in range(size):
            v = vids[f2, i]
            y = ys[f2, i]
            if mask[order[f2, i]]:
                if cnt_l > 0 and v != prev_l:
                    max_below = 0
                    max_above = 0
                    for c in range(n_labels):
                        if c_l[c] > max_below:
                            max_below = c_l[c]
                        rest = fq_l[c] - c_l[c]
                        if rest > max_above:
                            max_above = rest
                    total = (cnt_l - max_below) + (n_l - cnt_l - max_above)
                    if total < best_l:
                        best_l = total
                        f2_l, k_l, pv_l, cv_l = f2, cnt_l, prev_l, v
                prev_l = v
                c_l[y] += 1
                cnt_l += 1
            else:
                if cnt_r > 0 and v != prev_r:
                    max_below = 0
                    max_above = 0
                    for c in range(n_labels):
                        if c_r[c] > max_below:
                            max_below = c_r[c]
                        rest = fq_r[c] - c_r[c]
                        if rest > max_above:
                            max_above = rest
                    total = (cnt_r - max_below) + (n_r - cnt_r - max_above)
                    if total < best_r:
                        best_r = total
                        f2_r, k_r, pv_r, cv_r = f2, cnt_r, prev_r, v
                prev_r = v
                c_r[y] += 1
                cnt_r += 1
    return best_l, f2_l, k_l, pv_l, cv_l, best_r, f2_r, k_r, pv_r, cv_r


if njit is not None:
    _d2_sweep = njit(cache=True)(_d2_sweep)


def _best_second_split(vids: np.ndarray, ys: np.ndarray, fq: np.ndarray,
                       reps: np.ndarray, f2: int):
    """Vectorized best single split of one side along ``f2``; None when
    unsplittable (numpy fallback path)."""
    n_side = len(vids)
    pos = np.nonzero(vids[1:] != vids[:-1])[0] + 1
    if pos.size == 0:
        return None
    max_left = None
    max_right = None
    for label, total in enumerate(fq):
        cum = np.cumsum(ys == label)[pos - 1]
        if max_left is None:
            max_left = cum
            max_right = total - cum
        else:
            np.maximum(max_left, cum, out=max_left)
            np.maximum(max_right, total - cum, out=max_right)
    score_ll = pos - max_left
    score_lr = (n_side - pos) - max_right
    totals = score_ll + score_lr
    b = int(np.argmin(totals))
    k = int(pos[b])
    tau = float((reps[vids[k - 1]] + reps[vids[k]]) / 2.0)
    left_counts = np.bincount(ys[:k], minlength=len(fq))
    lab_l = int(np.argmax(left_counts))
    lab_r = int(np.argmax(fq - left_counts))
    return int(totals[b]), (SPLIT, f2, tau, lab_l, lab_r, int(score_ll[b]), int(score_lr[b]))


def _side_spec(score, f2, k, below_vid, at_vid, side_labels, fq, reps):
    """Materialize a winning split of one side as a subtree spec."""
    tau = float((reps[below_vid] + reps[at_vid]) / 2.0)
    counts = np.bincount(side_labels[:k], minlength=len(fq))
    lab_l = int(np.argmax(counts))
    lab_r = int(np.argmax(fq - counts))
    s_ll = int(k - counts[lab_l])
    return (SPLIT, f2, tau, lab_l, lab_r, s_ll, int(score - s_ll))


def d2_split(view: SubsetView, f1: int, w: int,
             cands1: SplitCandidates | None = None, stats=None):
    """Optimal depth-<=1 subtrees for both sides of root split ``w`` on ``f1``.

    Returns ``(theta_l, spec_l, theta_r, spec_r)`` where each spec carries
    enough structure to reconstruct the subtree.
    """
    ds = view.dataset
    if cands1 is None:
        cands1 = view.split_candidates(f1)
    z_w = cands1.z(w)
    vids2d, ys2d = view.packed_columns()
    n_l = z_w
    n_r = view.size - z_w

    fq_l = np.bincount(ys2d[f1, :z_w], minlength=ds.label_count).astype(np.int64)
    fq_r = view.histogram.astype(np.int64) - fq_l

    lab = int(np.argmax(fq_l))
    best_l, spec_l = n_l - int(fq_l[lab]), (LEAF, lab)
    lab = int(np.argmax(fq_r))
    best_r, spec_r = n_r - int(fq_r[lab]), (LEAF, lab)

    if stats is not None:
        stats.d2split_calls += 1
        stats.d2_swept += view.size * ds.p

    if best_l + best_r == 0:
        return best_l, spec_l, best_r, spec_r

    if njit is not None:
        mask = np.zeros(ds.n, dtype=np.uint8)
        (best_l, f2_l, k_l, pv_l, cv_l,
         best_r, f2_r, k_r, pv_r, cv_r) = _d2_sweep(
            view.order, vids2d, ys2d, mask, f1, z_w, fq_l, fq_r, best_l, best_r)
        if f2_l >= 0:
            side = ys2d[f2_l][np.asarray(mask[view.order[f2_l]], dtype=bool)]
            spec_l = _side_spec(best_l, f2_l, k_l, pv_l, cv_l, side, fq_l, ds.reps[f2_l])
        if f2_r >= 0:
            side = ys2d[f2_r][~np.asarray(mask[view.order[f2_r]], dtype=bool)]
            spec_r = _side_spec(best_r, f2_r, k_r, pv_r, cv_r, side, fq_r, ds.reps[f2_r])
        return best_l, spec_l, best_r, spec_r

    in_left = np.zeros(ds.n, dtype=bool)
    in_left[view.order[f1, :z_w]] = True
    for f2 in range(ds.p):
        sel = in_left[view.order[f2]]
        vids2, ys2 = vids2d[f2], ys2d[f2]
        if best_l > 0:
            found = _best_second_split(vids2[sel], ys2[sel], fq_l, ds.reps[f2], f2)
            if found is not None and found[0] < best_l:
                best_l, spec_l = found
        if best_r > 0:
            found = _best_second_split(vids2[~sel], ys2[~sel], fq_r, ds.reps[f2], f2)
            if found is not None and found[0] < best_r:
                best_r, spec_r = found
        if best_l + best_r == 0:
            break

    return best_l, spec_l, best_r, spec_r
