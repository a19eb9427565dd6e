import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { toCsv } from "./csv.js";
import { maxFeature, parseTree, predictOne, type Label, type TreeNode } from "./tree.js";

export interface EstimatorOptions {
  /** Maximum tree depth (required). */
  depth: number;
  /** Permissible optimality gap: >= 1 absolute, < 1 fraction of n. */
  maxGap?: number;
  /** Solve time limit in seconds. */
  timeLimit?: number;
  disableNb?: boolean;
  disableIs?: boolean;
  disableSp?: boolean;
  disableD2?: boolean;
  disableCache?: boolean;
  /** Command prefix for the solver CLI. Default: ["python3", "-m", "odtree.cli"]. */
  solverCommand?: string[];
}

export interface TrainingStats {
  score: number;
  gap: number;
  elapsed: number;
  timedOut: boolean;
  [key: string]: unknown;
}

export class SolverProcessError extends Error {
  constructor(message: string, readonly exitCode: number | null, readonly stderr: string) {
    super(message);
    this.name = "SolverProcessError";
  }
}

/**
 * Scikit-style classifier delegating training to the solver CLI.
 *
 * Data crosses the process boundary as a CSV file; the fitted model
 * comes back as the solver's canonical tree JSON, which this class keeps
 * verbatim (so serialization is bit-identical to the CLI's output) and
 * routes predictions through locally.
 */
export class OptimalTreeClassifier {
  private readonly options: EstimatorOptions;
  private tree: TreeNode | null = null;
  private treeText: string | null = null;
  private stats: TrainingStats | null = null;
  private featureCount = 0;

  constructor(options: EstimatorOptions) {
    if (!Number.isInteger(options.depth) || options.depth < 0) {
      throw new Error(`depth must be a non-negative integer, got ${options.depth}`);
    }
    if (options.maxGap !== undefined && options.maxGap < 0) {
      throw new Error("maxGap must be non-negative");
    }
    this.options = { ...options };
  }

  get fitted(): boolean {
    return this.tree !== null;
  }

  /** Training misclassification count of the fitted tree. */
  get trainScore(): number {
    return this.requireStats().score;
  }

  /** Certified distance between the fitted score and the true optimum. */
  get provenGap(): number {
    return this.requireStats().gap;
  }

  get timedOut(): boolean {
    return this.requireStats().timedOut;
  }

  /** The solver's tree JSON, byte-for-byte as the CLI emitted it. */
  serializedTree(): string {
    if (this.treeText === null) {
      throw new Error("estimator is not fitted");
    }
    return this.treeText;
  }

  trainingStats(): TrainingStats {
    return { ...this.requireStats() };
  }

  fit(X: readonly (readonly number[])[], y: readonly Label[]): this {
    this.validateMatrix(X, null);
    if (X.length === 0) {
      throw new Error("cannot fit on an empty dataset");
    }
    if (y.length !== X.length) {
      throw new Error(`label count ${y.length} does not match row count ${X.length}`);
    }

    const workdir = mkdtempSync(join(tmpdir(), "odtree-"));
    try {
      const dataPath = join(workdir, "train.csv");
      const treePath = join(workdir, "tree.json");
      const statsPath = join(workdir, "stats.json");
      writeFileSync(dataPath, toCsv(X, y));

      const args = [
        "train", dataPath,
        "--depth", String(this.options.depth),
        "--out", treePath,
        "--stats-json", statsPath,
      ];
      if (this.options.maxGap !== undefined) {
        args.push("--max-gap", String(this.options.maxGap));
      }
      if (this.options.timeLimit !== undefined) {
        args.push("--time-limit", String(this.options.timeLimit));
      }
      if (this.options.disableNb) args.push("--disable-nb");
      if (this.options.disableIs) args.push("--disable-is");
      if (this.options.disableSp) args.push("--disable-sp");
      if (this.options.disableD2) args.push("--disable-d2");
      if (this.options.disableCache) args.push("--disable-cache");

      const result = this.runSolver(args);
      const text = readFileSync(treePath, "utf8");
      const raw = JSON.parse(readFileSync(statsPath, "utf8")) as Record<string, unknown>;

      this.tree = parseTree(text);
      this.treeText = text;
      this.featureCount = X[0].length;
      this.stats = {
        ...raw,
        score: raw.score as number,
        gap: raw.gap as number,
        elapsed: raw.elapsed as number,
        timedOut: (raw.timed_out as boolean) || result.timedOut,
      };
      return this;
    } finally {
      rmSync(workdir, { recursive: true, force: true });
    }
  }

  predict(X: readonly (readonly number[])[]): Label[] {
    if (this.tree === null) {
      throw new Error("estimator is not fitted");
    }
    this.validateMatrix(X, this.featureCount);
    if (maxFeature(this.tree) >= this.featureCount) {
      throw new Error("tree references a feature outside the training arity");
    }
    return X.map((row) => predictOne(this.tree as TreeNode, row));
  }

  /** Mean accuracy of predictions against the given labels. */
  score(X: readonly (readonly number[])[], y: readonly Label[]): number {
    const preds = this.predict(X);
    if (y.length !== preds.length) {
      throw new Error(`label count ${y.length} does not match row count ${preds.length}`);
    }
    if (preds.length === 0) {
      throw new Error("cannot score an empty dataset");
    }
    let correct = 0;
    for (let i = 0; i < preds.length; i++) {
      if (preds[i] === y[i]) correct++;
    }
    return correct / preds.length;
  }

  private runSolver(args: string[]): { timedOut: boolean } {
    const command = this.options.solverCommand ?? ["python3", "-m", "odtree.cli"];
    const proc = spawnSync(command[0], [...command.slice(1), ...args], {
      encoding: "utf8",
      maxBuffer: 64 * 1024 * 1024,
    });
    if (proc.error) {
      throw new SolverProcessError(
        `failed to launch solver CLI (${command.join(" ")}): ${proc.error.message}`,
        null, "");
    }
    if (proc.status !== 0 && proc.status !== 2) {
      throw new SolverProcessError(
        `solver CLI exited with code ${proc.status}: ${proc.stderr}`,
        proc.status, proc.stderr ?? "");
    }
    return { timedOut: proc.status === 2 };
  }

  private validateMatrix(X: readonly (readonly number[])[], arity: number | null): void {
    const width = arity ?? X[0]?.length ?? 0;
    for (let i = 0; i < X.length; i++) {
      const row = X[i];
      if (row.length !== width) {
        throw new Error(`row ${i} has ${row.length} values, expected ${width}`);
      }
      for (const v of row) {
        if (typeof v !== "number" || !Number.isFinite(v)) {
          throw new Error(`row ${i} contains a non-finite value`);
        }
      }
    }
  }

  private requireStats(): TrainingStats {
    if (this.stats === null) {
      throw new Error("estimator is not fitted");
    }
    return this.stats;
  }
}
