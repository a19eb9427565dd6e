"""Decision tree structure, prediction, and canonical JSON (de)serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Leaf:
    label: object  # original label domain: int or str


@dataclass(frozen=True)
class Branch:
    feature: int
    threshold: float
    left: "Node"
    right: "Node"


Node = Leaf | Branch


def depth(node: Node) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(depth(node.left), depth(node.right))


def max_feature(node: Node) -> int:
    """Largest feature id referenced by the tree; -1 for a bare leaf."""
    if isinstance(node, Leaf):
        return -1
    return max(node.feature, max_feature(node.left), max_feature(node.right))


def predict_one(node: Node, x) -> object:
    while isinstance(node, Branch):
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.label


def predict(node: Node, X: np.ndarray) -> list:
    """Route every row of ``X`` through the tree; returns original-domain labels."""
    X = np.asarray(X, dtype=np.float64)
    out: list = [None] * len(X)
    idx = np.arange(len(X))

    def walk(node: Node, rows: np.ndarray) -> None:
        if len(rows) == 0:
            return
        if isinstance(node, Leaf):
            for r in rows:
                out[r] = node.label
            return
        go_left = X[rows, node.feature] <= node.threshold
        walk(node.left, rows[go_left])
        walk(node.right, rows[~go_left])

    walk(node, idx)
    return out


def to_dict(node: Node) -> dict:
    if isinstance(node, Leaf):
        label = node.label
        if isinstance(label, np.integer):
            label = int(label)
        return {"type": "leaf", "label": label}
    return {
        "type": "branch",
        "feature": int(node.feature),
        "threshold": float(node.threshold),
        "left": to_dict(node.left),
        "right": to_dict(node.right),
    }


def from_dict(obj: dict) -> Node:
    kind = obj.get("type")
    if kind == "leaf":
        return Leaf(obj["label"])
    if kind == "branch":
        return Branch(int(obj["feature"]), float(obj["threshold"]),
                      from_dict(obj["left"]), from_dict(obj["right"]))
    raise ValueError(f"unknown tree node type: {kind!r}")


def dumps(node: Node) -> str:
    """Canonical JSON text; thresholds keep full round-trip precision."""
    return json.dumps(to_dict(node), indent=2) + "\n"


def loads(text: str) -> Node:
    return from_dict(json.loads(text))
