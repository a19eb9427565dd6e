export { toCsv } from "./csv.js";
export {
  OptimalTreeClassifier,
  SolverProcessError,
  type EstimatorOptions,
  type TrainingStats,
} from "./estimator.js";
export {
  maxFeature,
  parseTree,
  predictOne,
  treeDepth,
  type BranchNode,
  type Label,
  type LeafNode,
  type TreeNode,
} from "./tree.js";
