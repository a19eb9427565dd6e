"""Command-line interface: train, evaluate, and ablation-benchmark.

Output contract: the tree JSON goes to ``--out`` when given, otherwise to
stdout (with the human summary moved to stderr so stdout stays parseable).
Exit codes: 0 success, 1 input/parse errors, 2 timeout (best tree still
emitted).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

from . import tree as tree_mod
from .baseline import evaluate
from .dataset import DatasetError, load_csv
from .solver import Solver, SolverConfig

ABLATION_CONFIGS = {
    "none": dict(enable_nb=False, enable_is=False, enable_sp=False),
    "nb": dict(enable_nb=True, enable_is=False, enable_sp=False),
    "is": dict(enable_nb=False, enable_is=True, enable_sp=False),
    "sp": dict(enable_nb=False, enable_is=False, enable_sp=True),
    "all": {},
}


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=int, required=True, help="maximum tree depth")
    p.add_argument("--max-gap", type=float, default=0.0,
                   help="permissible optimality gap: >=1 absolute, <1 fraction of n")
    p.add_argument("--label", default=None, help="label column (name or 0-based index)")
    p.add_argument("--time-limit", type=float, default=None, help="seconds")
    p.add_argument("--seed", type=int, default=None,
                   help="reserved; the algorithm is deterministic")


def _add_flag_toggles(p: argparse.ArgumentParser) -> None:
    for name in ("nb", "is", "sp", "d2", "cache"):
        p.add_argument(f"--disable-{name}", action="store_true")
    p.add_argument("--eta-rule", choices=("min", "max"), default="min")


def _config_from_args(args) -> SolverConfig:
    return SolverConfig(
        max_depth=args.depth,
        max_gap=args.max_gap,
        time_limit=args.time_limit,
        enable_nb=not args.disable_nb,
        enable_is=not args.disable_is,
        enable_sp=not args.disable_sp,
        enable_d2=not args.disable_d2,
        enable_cache=not args.disable_cache,
        eta_rule=args.eta_rule,
    )


def cmd_train(args) -> int:
    try:
        ds = load_csv(args.data, label=args.label)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    solver = Solver(ds, _config_from_args(args))
    fitted = solver.fit()

    text = tree_mod.dumps(fitted.tree)
    summary_stream = sys.stdout
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        summary_stream = sys.stderr

    stats = fitted.stats
    mis, acc = evaluate(fitted.tree, ds.root_view())
    lines = [
        f"misclassifications: {fitted.score}",
        f"accuracy: {acc:.6f}",
        f"gap: {fitted.gap}",
        f"elapsed_s: {stats.elapsed:.3f}",
        f"timed_out: {str(fitted.timed_out).lower()}",
    ]
    lines += [f"{k}: {v}" for k, v in stats.counters().items() if k != "trace_scores"]
    print("\n".join(lines), file=summary_stream)

    if args.stats_json:
        payload = stats.as_dict()
        payload["score"] = fitted.score
        payload["gap"] = fitted.gap
        payload["depth"] = args.depth
        with open(args.stats_json, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return 2 if fitted.timed_out else 0


def cmd_evaluate(args) -> int:
    try:
        with open(args.tree) as fh:
            node = tree_mod.loads(fh.read())
        ds = load_csv(args.data, label=args.label)
        mis, acc = evaluate(node, ds.root_view())
    except (DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"misclassifications: {mis}")
    print(f"accuracy: {acc:.6f}")
    return 0


def _bench_inputs(path: str) -> list[str]:
    if os.path.isdir(path):
        return sorted(
            os.path.join(path, name) for name in os.listdir(path) if name.endswith(".csv")
        )
    if path.endswith(".csv"):
        return [path]
    with open(path) as fh:
        return [line.strip() for line in fh if line.strip()]


def cmd_bench(args) -> int:
    try:
        files = _bench_inputs(args.inputs)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not files:
        print("error: no datasets to benchmark", file=sys.stderr)
        return 1

    out_fh = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(out_fh)
    writer.writerow(["dataset", "config", "runtime_s", "score",
                     "d2split_calls", "split_evals", "ct_calls"])
    failures = 0
    for path in files:
        name = os.path.splitext(os.path.basename(path))[0]
        try:
            ds = load_csv(path, label=args.label)
        except DatasetError as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            failures += 1
            continue
        for cfg_name, overrides in ABLATION_CONFIGS.items():
            config = SolverConfig(max_depth=args.depth, max_gap=args.max_gap,
                                  time_limit=args.time_limit, **overrides)
            solver = Solver(ds, config)
            t0 = time.monotonic()
            fitted = solver.fit()
            runtime = time.monotonic() - t0
            st = fitted.stats
            writer.writerow([name, cfg_name, f"{runtime:.4f}", fitted.score,
                             st.d2split_calls, st.split_evals, st.ct_calls])
            if cfg_name == "all" and args.trace_dir:
                os.makedirs(args.trace_dir, exist_ok=True)
                trace_path = os.path.join(args.trace_dir, f"{name}_trace.csv")
                with open(trace_path, "w", newline="") as tf:
                    tw = csv.writer(tf)
                    tw.writerow(["elapsed_s", "incumbent"])
                    for t, s in st.trace:
                        tw.writerow([f"{t:.6f}", s])
    if args.out:
        out_fh.close()
    return 0 if failures < len(files) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="odtree",
        description="Provably optimal depth-bounded classification trees on continuous features",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a tree on a CSV dataset")
    p_train.add_argument("data", help="CSV file")
    _add_common_flags(p_train)
    _add_flag_toggles(p_train)
    p_train.add_argument("--out", default=None, help="write the tree JSON here (default: stdout)")
    p_train.add_argument("--stats-json", default=None, help="write search statistics here")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("evaluate", help="score a tree JSON against a CSV dataset")
    p_eval.add_argument("tree", help="tree JSON file")
    p_eval.add_argument("data", help="CSV file")
    p_eval.add_argument("--label", default=None)
    p_eval.set_defaults(func=cmd_evaluate)

    p_bench = sub.add_parser("bench", help="pruning-ablation benchmark over datasets")
    p_bench.add_argument("inputs", help="CSV file, directory of CSVs, or list file")
    _add_common_flags(p_bench)
    p_bench.add_argument("--out", default=None, help="results CSV (default: stdout)")
    p_bench.add_argument("--trace-dir", default=None,
                         help="write per-dataset anytime traces into this directory")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
