import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odtree import (
    Dataset,
    DatasetError,
    compute_unique_values,
    dedupe_values,
    load_csv,
    midpoints,
)

from conftest import make_dataset, random_dataset

EXAMPLE_VALUES = [0.4, 0.5, 0.5, 0.7, 0.8, 1.0]


def _write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestLoadCsv:
    def test_dense_label_reencoding(self, tmp_path):
        path = _write(tmp_path, "x,y,label\n1.0,2.0,cat\n3.0,4.0,dog\n5.0,6.0,cat\n")
        ds = load_csv(path)
        assert ds.n == 3 and ds.p == 2
        assert list(ds.y) == [0, 1, 0]
        assert ds.labels == ["cat", "dog"]

    def test_single_row(self, tmp_path):
        ds = load_csv(_write(tmp_path, "1.5,0\n"))
        assert ds.n == 1 and ds.p == 1 and ds.label_count == 1

    def test_missing_cell_names_row(self, tmp_path):
        path = _write(tmp_path, "a,b,label\n1,2,x\n3,x_only\n")
        with pytest.raises(DatasetError, match="row 3"):
            load_csv(path)

    def test_non_numeric_feature_cell(self, tmp_path):
        path = _write(tmp_path, "1,2,0\n1,oops,1\n")
        with pytest.raises(DatasetError, match="non-numeric"):
            load_csv(path)

    def test_empty_file(self, tmp_path):
        with pytest.raises(DatasetError, match="empty"):
            load_csv(_write(tmp_path, ""))

    def test_header_autodetected(self, tmp_path):
        with_header = load_csv(_write(tmp_path, "a,b,label\n1,2,0\n3,4,1\n", "h.csv"))
        without = load_csv(_write(tmp_path, "1,2,0\n3,4,1\n", "n.csv"))
        assert with_header.n == without.n == 2
        assert with_header.feature_names == ["a", "b"]

    def test_label_column_by_name_and_index(self, tmp_path):
        path = _write(tmp_path, "label,a,b\n0,1.0,2.0\n1,3.0,4.0\n")
        by_name = load_csv(path, label="label")
        by_index = load_csv(path, label=0)
        assert by_name.p == by_index.p == 2
        assert list(by_name.y) == list(by_index.y)
        with pytest.raises(DatasetError, match="not found"):
            load_csv(path, label="nope")

    def test_integer_labels_parsed_as_int(self, tmp_path):
        ds = load_csv(_write(tmp_path, "1.0,7\n2.0,9\n"))
        assert ds.labels == [7, 9]


class TestUniqueValues:
    def test_epsilon_dedup_keeps_spread_values(self):
        assert list(dedupe_values(sorted(EXAMPLE_VALUES), 1e-7)) == [0.4, 0.5, 0.7, 0.8, 1.0]

    def test_sub_epsilon_run_collapses(self):
        assert list(dedupe_values([1.0, 1.0 + 5e-8], 1e-7)) == [1.0]

    def test_single_value(self):
        assert list(dedupe_values([3.0], 1e-7)) == [3.0]

    def test_view_variant_matches(self):
        ds = make_dataset([[v] for v in EXAMPLE_VALUES], [0] * 6)
        got = compute_unique_values(ds.root_view(), 0, 1e-7)
        assert list(got) == [0.4, 0.5, 0.7, 0.8, 1.0]

    @given(st.lists(st.floats(0, 100), min_size=1, max_size=40),
           st.floats(1e-9, 0.5))
    @settings(max_examples=60, deadline=None)
    def test_dedup_postconditions(self, values, epsilon):
        values = sorted(values)
        reps = dedupe_values(values, epsilon)
        assert all(b - a > epsilon for a, b in zip(reps, reps[1:]))
        # every value lies within epsilon of its run representative
        idx = np.searchsorted(reps, values, side="right") - 1
        assert all(0 <= v - reps[i] <= epsilon or v == reps[i]
                   for v, i in zip(values, idx))


class TestThresholds:
    def test_paper_example_midpoints(self):
        ds = make_dataset([[v] for v in EXAMPLE_VALUES], [0, 1, 0, 1, 0, 0])
        cands = ds.root_view().split_candidates(0)
        assert list(cands.unique_values) == [0.4, 0.5, 0.7, 0.8, 1.0]
        assert list(cands.thresholds) == [0.45, 0.6, 0.75, 0.9]
        assert cands.m == 4

    def test_constant_feature_has_no_thresholds(self):
        assert list(midpoints([2.0])) == []
        ds = make_dataset([[2.0], [2.0]], [0, 1])
        assert ds.root_view().split_candidates(0).m == 0

    def test_two_values_single_midpoint(self):
        assert list(midpoints([0.0, 1.0])) == [0.5]

    def test_threshold_count_invariant(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            ds = random_dataset(rng, int(rng.integers(2, 40)), 3, 2, "grid")
            view = ds.root_view()
            for f in range(ds.p):
                cands = view.split_candidates(f)
                assert cands.m == len(cands.unique_values) - 1

    def test_midpoints_exact(self):
        rng = np.random.default_rng(1)
        u = np.sort(rng.random(17))
        got = midpoints(u)
        assert all(got[k] == (u[k] + u[k + 1]) / 2 for k in range(16))


class TestSplitView:
    def test_paper_example_split_sizes(self):
        ds = make_dataset([[v] for v in EXAMPLE_VALUES], [0, 1, 0, 1, 0, 0])
        view = ds.root_view()
        cands = view.split_candidates(0)
        left, right = view.split(0, cands.index_of(0.75))
        assert (left.size, right.size) == (4, 2)
        left, right = view.split(0, cands.index_of(0.45))
        assert left.size == 1

    def test_partition_property(self):
        rng = np.random.default_rng(2)
        for _ in range(15):
            ds = random_dataset(rng, int(rng.integers(3, 50)), int(rng.integers(1, 4)), 2, "mixed")
            view = ds.root_view()
            for f in range(ds.p):
                cands = view.split_candidates(f)
                for t in range(1, cands.m + 1):
                    left, right = view.split(f, t)
                    lids, rids = set(left.order[0]), set(right.order[0])
                    assert not lids & rids
                    assert lids | rids == set(view.order[0])
                    tau = cands.tau(t)
                    assert all(ds.X[i, f] <= tau for i in lids)
                    assert all(ds.X[i, f] > tau for i in rids)
                    for g in range(ds.p):
                        for side in (left, right):
                            vals = ds.X[side.order[g], g]
                            assert np.all(np.diff(vals) >= 0)

    def test_z_map_matches_split_sizes(self):
        rng = np.random.default_rng(3)
        for _ in range(15):
            ds = random_dataset(rng, int(rng.integers(3, 50)), 2, 2, "grid")
            view = ds.root_view()
            for f in range(ds.p):
                cands = view.split_candidates(f)
                for t in range(1, cands.m + 1):
                    left, _ = view.split(f, t)
                    assert cands.z(t) == left.size

    def test_order_preserved_under_split(self):
        rng = np.random.default_rng(4)
        ds = random_dataset(rng, 40, 3, 2, "grid")
        view = ds.root_view()
        left, right = view.split(0, 1)
        for g in range(ds.p):
            parent = [i for i in view.order[g]]
            for side in (left, right):
                sub = list(side.order[g])
                it = iter(parent)
                assert all(any(x == y for y in it) for x in sub)  # subsequence


class TestLeafScore:
    def test_majority(self):
        ds = make_dataset([[0.0], [1.0], [2.0]], ["a", "a", "b"])
        assert ds.root_view().leaf_score() == (1, 0)

    def test_pure(self):
        ds = make_dataset([[0.0], [1.0], [2.0]], ["a", "a", "a"])
        assert ds.root_view().leaf_score() == (0, 0)

    def test_tie_breaks_to_lowest_label_id(self):
        ds = make_dataset([[0.0], [1.0]], ["a", "b"])
        assert ds.root_view().leaf_score() == (1, 0)

    def test_exactly_size_minus_max_count(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            ds = random_dataset(rng, int(rng.integers(1, 30)), 1, 3, "grid")
            view = ds.root_view()
            score, label = view.leaf_score()
            counts = np.bincount(ds.y, minlength=3)
            assert score == ds.n - counts.max()
            assert counts[label] == counts.max()


def test_from_arrays_validation():
    with pytest.raises(DatasetError):
        Dataset.from_arrays(np.empty((0, 2)), [])
    with pytest.raises(DatasetError):
        Dataset.from_arrays([[np.nan]], [0])
    with pytest.raises(DatasetError):
        Dataset.from_arrays([[1.0], [2.0]], [0])
