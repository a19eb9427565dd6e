"""Shared fixtures: randomized instance corpus with frozen oracle scores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest

from odtree import Dataset, brute_force_odt


@dataclass
class Instance:
    name: str
    dataset: Dataset
    depth: int
    oracle_score: int


def make_dataset(rows, labels, epsilon: float = 1e-7) -> Dataset:
    return Dataset.from_arrays(np.asarray(rows, dtype=float), labels, epsilon=epsilon)


def random_dataset(rng: np.random.Generator, n: int, p: int, n_labels: int,
                   style: str = "continuous") -> Dataset:
    if style == "continuous":
        X = np.round(rng.random((n, p)) * 4.0, 2)
    elif style == "grid":
        X = rng.integers(0, 5, (n, p)).astype(float)
    else:  # mixed: some duplicate-heavy columns, some continuous
        X = np.empty((n, p))
        for j in range(p):
            if j % 2 == 0:
                X[:, j] = rng.integers(0, 4, n).astype(float)
            else:
                X[:, j] = np.round(rng.random(n) * 2.0, 2)
    y = rng.integers(0, n_labels, n)
    return Dataset.from_arrays(X, y)


def synth_blobs(n: int, p: int, n_labels: int, seed: int,
                noise: float = 0.15) -> Dataset:
    """Cluster-structured synthetic data with label noise."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, 2.0, (n_labels, p))
    y = rng.integers(0, n_labels, n)
    X = centers[y] + rng.normal(0.0, 1.0, (n, p))
    flip = rng.random(n) < noise
    y[flip] = rng.integers(0, n_labels, int(flip.sum()))
    return Dataset.from_arrays(np.round(X, 4), y)


def build_corpus() -> list[Instance]:
    """Deterministic randomized corpus: 210 instances covering
    n in [4, 64], p in [1, 4], labels in {2, 3}, depth in {1, 2, 3}."""
    rng = np.random.default_rng(20260810)
    styles = ("continuous", "grid", "mixed")
    out: list[Instance] = []

    def add(n, p, n_labels, depth, style):
        ds = random_dataset(rng, n, p, n_labels, style)
        out.append(Instance(f"rand-{len(out)}-n{n}p{p}L{n_labels}d{depth}", ds, depth, -1))

    for i in range(80):
        add(int(rng.integers(4, 65)), int(rng.integers(1, 5)),
            int(rng.integers(2, 4)), 1, styles[i % 3])
    for i in range(85):
        add(int(rng.integers(4, 65)), int(rng.integers(1, 5)),
            int(rng.integers(2, 4)), 2, styles[i % 3])
    for i in range(41):
        add(int(rng.integers(4, 25)), int(rng.integers(1, 4)),
            int(rng.integers(2, 4)), 3, styles[i % 3])
    # corner cases the random draws may miss
    add(4, 1, 2, 1, "continuous")
    add(64, 4, 3, 2, "continuous")
    add(24, 3, 3, 3, "grid")
    out.append(Instance("pure", make_dataset([[0.1], [0.2], [0.9]], ["a", "a", "a"]), 2, -1))

    for inst in out:
        inst.oracle_score = brute_force_odt(inst.dataset.root_view(), inst.depth)[0]
    return out


_CORPUS: list[Instance] | None = None


def get_corpus() -> list[Instance]:
    global _CORPUS
    if _CORPUS is None:
        _CORPUS = build_corpus()
    return _CORPUS


@pytest.fixture(scope="session")
def corpus() -> list[Instance]:
    return get_corpus()
