"""Provably optimal depth-bounded classification trees on continuous features."""

from .baseline import BudgetExceededError, brute_force_odt, evaluate, greedy_tree
from .dataset import (
    DEFAULT_EPSILON,
    Dataset,
    DatasetError,
    SplitCandidates,
    SubsetView,
    compute_unique_values,
    dedupe_values,
    leaf_score,
    load_csv,
    midpoints,
)
from .solver import (
    FitResult,
    SearchStats,
    Solver,
    SolverConfig,
    SubproblemResult,
    distribute_gap,
    fit,
    reconstruct_tree,
    resolve_max_gap,
)
from .tree import Branch, Leaf, Node, from_dict, dumps, loads, predict, to_dict

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "Branch",
    "DEFAULT_EPSILON",
    "Dataset",
    "DatasetError",
    "FitResult",
    "Leaf",
    "Node",
    "SearchStats",
    "Solver",
    "SolverConfig",
    "SplitCandidates",
    "SubproblemResult",
    "SubsetView",
    "brute_force_odt",
    "compute_unique_values",
    "dedupe_values",
    "distribute_gap",
    "dumps",
    "evaluate",
    "fit",
    "from_dict",
    "greedy_tree",
    "leaf_score",
    "load_csv",
    "loads",
    "midpoints",
    "predict",
    "reconstruct_tree",
    "resolve_max_gap",
    "to_dict",
]
