/**
 * Decision tree JSON schema shared with the solver CLI, plus prediction.
 *
 * A row is routed left iff `x[feature] <= threshold`. Labels keep the
 * domain the solver serialized (strings, or numbers for integer labels).
 */

export type Label = string | number;

export interface LeafNode {
  type: "leaf";
  label: Label;
}

export interface BranchNode {
  type: "branch";
  feature: number;
  threshold: number;
  left: TreeNode;
  right: TreeNode;
}

export type TreeNode = LeafNode | BranchNode;

export function parseTree(text: string): TreeNode {
  const node = JSON.parse(text) as TreeNode;
  validateNode(node);
  return node;
}

function validateNode(node: TreeNode): void {
  if (node.type === "leaf") {
    if (node.label === undefined) {
      throw new Error("leaf node without a label");
    }
    return;
  }
  if (node.type === "branch") {
    if (!Number.isInteger(node.feature) || node.feature < 0) {
      throw new Error(`invalid feature id: ${node.feature}`);
    }
    validateNode(node.left);
    validateNode(node.right);
    return;
  }
  throw new Error(`unknown node type: ${(node as { type: string }).type}`);
}

export function predictOne(node: TreeNode, row: readonly number[]): Label {
  let current = node;
  while (current.type === "branch") {
    current = row[current.feature] <= current.threshold ? current.left : current.right;
  }
  return current.label;
}

export function maxFeature(node: TreeNode): number {
  if (node.type === "leaf") {
    return -1;
  }
  return Math.max(node.feature, maxFeature(node.left), maxFeature(node.right));
}

export function treeDepth(node: TreeNode): number {
  if (node.type === "leaf") {
    return 0;
  }
  return 1 + Math.max(treeDepth(node.left), treeDepth(node.right));
}
