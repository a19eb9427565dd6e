"""Dataset loading, validation, and order-preserving subset views.

The solver never touches raw feature values during the search.  At
construction time every feature column is sorted once and collapsed into
integer *value ids* (consecutive values closer than ``epsilon`` share an
id).  Subset views carry, for every feature, the member instance ids in
sorted order, so splitting preserves sortedness without re-sorting.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

DEFAULT_EPSILON = 1e-7


class DatasetError(ValueError):
    """Raised for malformed input data (parse errors, bad shapes)."""


def dedupe_values(values, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Collapse an ascending value sequence into run representatives.

    A new run starts whenever a value exceeds the current run's first
    value (its representative) by more than ``epsilon``.  Consecutive
    retained entries therefore differ by more than ``epsilon`` and every
    input value lies within ``epsilon`` of its representative.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    reps: list[float] = []
    rep = None
    for v in np.asarray(values, dtype=np.float64):
        if rep is None or v - rep > epsilon:
            rep = float(v)
            reps.append(rep)
    return np.asarray(reps, dtype=np.float64)


def midpoints(unique_values) -> np.ndarray:
    """Split thresholds for an ascending unique-value list: consecutive midpoints."""
    u = np.asarray(unique_values, dtype=np.float64)
    return (u[:-1] + u[1:]) / 2.0


class Dataset:
    """Immutable classification dataset with per-feature sorted orderings.

    Labels are re-encoded as dense integers ``0..label_count-1`` in first
    appearance order; the original label values are kept for output.
    """

    def __init__(self, X: np.ndarray, y: np.ndarray, labels: list,
                 feature_names: list[str], epsilon: float = DEFAULT_EPSILON):
        self.X = X
        self.y = y
        self.labels = labels
        self.feature_names = feature_names
        self.epsilon = epsilon
        self.n, self.p = X.shape
        self.label_count = len(labels)

        # One-time per-feature preprocessing: sorted order (value asc,
        # instance id asc on ties), epsilon-run representatives, and the
        # value id of every instance.
        self.order = np.empty((self.p, self.n), dtype=np.int32)
        self.value_ids = np.empty((self.p, self.n), dtype=np.int32)
        self.reps: list[np.ndarray] = []
        ids = np.arange(self.n)
        for f in range(self.p):
            col = X[:, f]
            order_f = np.lexsort((ids, col)).astype(np.int32)
            self.order[f] = order_f
            reps_f = dedupe_values(np.unique(col), epsilon)
            self.reps.append(reps_f)
            self.value_ids[f] = np.searchsorted(reps_f, col, side="right") - 1

    @classmethod
    def from_arrays(cls, X, y, feature_names: list[str] | None = None,
                    epsilon: float = DEFAULT_EPSILON) -> "Dataset":
        """Build a dataset from a feature matrix and a label vector."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise DatasetError(f"feature matrix must be 2-dimensional, got shape {X.shape}")
        n, p = X.shape
        if n < 1 or p < 1:
            raise DatasetError(f"need at least one row and one feature, got shape {X.shape}")
        if not np.isfinite(X).all():
            raise DatasetError("feature values must be finite")
        y_list = list(y)
        if len(y_list) != n:
            raise DatasetError(f"label count {len(y_list)} does not match row count {n}")
        labels: list = []
        index: dict = {}
        y_dense = np.empty(n, dtype=np.int64)
        for i, v in enumerate(y_list):
            if v not in index:
                index[v] = len(labels)
                labels.append(v)
            y_dense[i] = index[v]
        if feature_names is None:
            feature_names = [f"f{j}" for j in range(p)]
        return cls(X, y_dense, labels, list(feature_names), epsilon)

    def root_view(self) -> "SubsetView":
        return SubsetView(self, self.order)

    def decode_labels(self, dense: np.ndarray) -> list:
        return [self.labels[int(i)] for i in dense]


def _parse_label_cell(cells: list[str]):
    # Labels stay as strings unless every label parses as an integer;
    # the caller decides after seeing the whole column.
    return cells


def load_csv(path, label=None, epsilon: float = DEFAULT_EPSILON) -> Dataset:
    """Load a classification dataset from a CSV file.

    A header row is assumed present iff any cell of the first row is
    non-numeric.  ``label`` selects the label column by name or 0-based
    index; the default is the last column.
    """
    if not os.path.exists(path):
        raise DatasetError(f"no such file: {path}")
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DatasetError(f"{path}: empty file")

    def _numeric(cell: str) -> bool:
        try:
            float(cell)
            return True
        except ValueError:
            return False

    has_header = not all(_numeric(c) for c in rows[0])
    header = rows[0] if has_header else None
    data_rows = rows[1:] if has_header else rows
    if not data_rows:
        raise DatasetError(f"{path}: no data rows")

    width = len(data_rows[0])
    for i, row in enumerate(data_rows):
        if len(row) != width:
            rownum = i + 1 + (1 if has_header else 0)
            raise DatasetError(f"{path}: row {rownum} has {len(row)} cells, expected {width}")

    if label is None:
        label_idx = width - 1
    elif isinstance(label, int) or (isinstance(label, str) and label.lstrip("-").isdigit()):
        label_idx = int(label)
        if not 0 <= label_idx < width:
            raise DatasetError(f"label column index {label_idx} out of range for {width} columns")
    else:
        if header is None:
            raise DatasetError(f"label column {label!r} given by name but file has no header")
        try:
            label_idx = header.index(label)
        except ValueError:
            raise DatasetError(f"label column {label!r} not found in header {header}") from None

    feature_idx = [j for j in range(width) if j != label_idx]
    if not feature_idx:
        raise DatasetError(f"{path}: no feature columns besides the label")
    n = len(data_rows)
    X = np.empty((n, len(feature_idx)), dtype=np.float64)
    raw_labels: list[str] = []
    for i, row in enumerate(data_rows):
        rownum = i + 1 + (1 if has_header else 0)
        for k, j in enumerate(feature_idx):
            cell = row[j].strip()
            if cell == "":
                raise DatasetError(f"{path}: row {rownum} has a missing value in column {j}")
            try:
                X[i, k] = float(cell)
            except ValueError:
                raise DatasetError(
                    f"{path}: row {rownum} column {j}: non-numeric feature value {cell!r}"
                ) from None
        cell = row[label_idx].strip()
        if cell == "":
            raise DatasetError(f"{path}: row {rownum} has a missing label")
        raw_labels.append(cell)
    if not np.isfinite(X).all():
        raise DatasetError(f"{path}: feature values must be finite")

    try:
        labels: list = [int(c) for c in raw_labels]
    except ValueError:
        labels = raw_labels
    if header is not None:
        names = [header[j] for j in feature_idx]
    else:
        names = [f"f{j}" for j in feature_idx]
    return Dataset.from_arrays(X, labels, names, epsilon)


@dataclass
class SplitCandidates:
    """Candidate thresholds for one feature restricted to one view.

    ``unique_values`` holds the epsilon-run representatives present in the
    view (ascending).  Threshold indices are 1-based: threshold ``t`` lies
    between ``unique_values[t-1]`` and ``unique_values[t]``.  ``cum[k]`` is
    the number of view instances with value at or below representative
    ``k`` (0-based), so ``z(t) == cum[t-1]``: the sorted position of the
    last instance below threshold ``t``.
    """

    feature: int
    unique_values: np.ndarray
    thresholds: np.ndarray
    cum: np.ndarray

    @property
    def m(self) -> int:
        return len(self.thresholds)

    def z(self, t: int) -> int:
        return int(self.cum[t - 1])

    def tau(self, t: int) -> float:
        return float(self.thresholds[t - 1])

    def index_of(self, tau: float) -> int:
        """1-based index of an existing threshold value."""
        t = int(np.searchsorted(self.thresholds, tau))
        for cand in (t, t - 1, t + 1):
            if 0 <= cand < self.m and np.isclose(self.thresholds[cand], tau, rtol=0, atol=1e-12):
                return cand + 1
        raise ValueError(f"{tau!r} is not a split threshold of feature {self.feature}")


class SubsetView:
    """A subset of a dataset with per-feature sorted member orderings.

    ``order[f]`` lists the member instance ids ascending by the value of
    feature ``f`` (ties by instance id).  Splitting produces two views
    whose orderings preserve the relative order of surviving instances.
    """

    __slots__ = ("dataset", "order", "size", "_cands", "_packed", "_hist", "_ids_key")

    def __init__(self, dataset: Dataset, order: np.ndarray):
        self.dataset = dataset
        self.order = order
        self.size = order.shape[1]
        self._cands: dict[int, SplitCandidates] = {}
        self._packed = None
        self._hist = None
        self._ids_key = None

    @property
    def histogram(self) -> np.ndarray:
        """Per-label instance counts."""
        if self._hist is None:
            self._hist = np.bincount(self.dataset.y[self.order[0]],
                                     minlength=self.dataset.label_count)
        return self._hist

    @property
    def ids_key(self) -> bytes:
        """Canonical byte string of the sorted member instance ids."""
        if self._ids_key is None:
            self._ids_key = np.sort(self.order[0]).tobytes()
        return self._ids_key

    def member_ids(self) -> np.ndarray:
        return np.sort(self.order[0])

    def packed_columns(self) -> tuple[np.ndarray, np.ndarray]:
        """Member value ids and labels aligned with ``order``, as (p, size)
        matrices; built once per view."""
        if self._packed is None:
            ds = self.dataset
            self._packed = (np.take_along_axis(ds.value_ids, self.order, axis=1),
                            ds.y[self.order])
        return self._packed

    def sorted_columns(self, f: int) -> tuple[np.ndarray, np.ndarray]:
        """Member value ids and labels in feature-``f`` sorted order."""
        vids, ys = self.packed_columns()
        return vids[f], ys[f]

    def split_candidates(self, f: int) -> SplitCandidates:
        cands = self._cands.get(f)
        if cands is None:
            ds = self.dataset
            vids = self.sorted_columns(f)[0]
            change = np.nonzero(np.diff(vids))[0]
            cum = np.concatenate([change + 1, [self.size]]).astype(np.int64)
            present = vids[cum - 1]
            uniq = ds.reps[f][present]
            cands = SplitCandidates(f, uniq, midpoints(uniq), cum)
            self._cands[f] = cands
        return cands

    def split(self, f: int, t: int) -> tuple["SubsetView", "SubsetView"]:
        """Partition at threshold index ``t`` of feature ``f``.

        The left view holds exactly the instances at sorted positions
        ``1..z(t)`` on ``f``; both sides inherit sorted orderings.
        """
        ds = self.dataset
        zl = self.split_candidates(f).z(t)
        mask = np.zeros(ds.n, dtype=bool)
        mask[self.order[f, :zl]] = True
        sel = mask[self.order]
        left = self.order[sel].reshape(ds.p, zl)
        right = self.order[~sel].reshape(ds.p, self.size - zl)
        return SubsetView(ds, left), SubsetView(ds, right)

    def leaf_score(self) -> tuple[int, int]:
        """Misclassifications and majority label (ties: lowest label id)."""
        if self.size == 0:
            raise ValueError("leaf score of an empty view")
        hist = self.histogram
        label = int(np.argmax(hist))
        return self.size - int(hist[label]), label


def compute_unique_values(view: SubsetView, f: int, epsilon: float) -> np.ndarray:
    """Epsilon-deduplicated unique values of feature ``f`` within a view."""
    if view.size == 0:
        raise ValueError("unique values of an empty view")
    return dedupe_values(view.dataset.X[view.order[f], f], epsilon)


def leaf_score(view: SubsetView) -> tuple[int, int]:
    return view.leaf_score()
