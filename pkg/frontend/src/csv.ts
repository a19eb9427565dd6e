import type { Label } from "./tree.js";

/**
 * Serialize a feature matrix and label vector to the CSV dialect the
 * solver ingests. A header row is always written so that string labels
 * survive the CLI's header auto-detection.
 */
export function toCsv(X: readonly (readonly number[])[], y: readonly Label[]): string {
  const p = X[0]?.length ?? 0;
  const header = [...Array.from({ length: p }, (_, j) => `f${j}`), "label"];
  const lines = [header.join(",")];
  for (let i = 0; i < X.length; i++) {
    lines.push([...X[i].map((v) => String(v)), String(y[i])].join(","));
  }
  return lines.join("\n") + "\n";
}
