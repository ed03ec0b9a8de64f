/**
 * The labeled/unlabeled/test mismatch protocol.
 *
 * From the train split: a `labeledFraction` share of the target-class
 * instances becomes labeled data; the remaining target instances plus
 * unknown-class instances form the unlabeled pool at an exact
 * target:unknown ratio of (1 - mismatch):mismatch. The test split
 * contributes target-class instances only. Target class ids are remapped
 * to 0..K-1 in list order; unknown instances carry ground truth -1.
 */

import { mulberry32, shuffled } from './rng';
import { Role } from './wade';

export interface PartitionSpec {
  targets: number[];
  unknowns: number[];
  mismatch: number;
  labeledFraction: number;
  seed: number;
  /** optional cap on the unlabeled pool size (ratio preserved) */
  maxUnlabeled?: number;
}

export interface PartitionRow {
  split: 'train' | 'test';
  sourceIndex: number;
  role: Role;
  label: number;
  groundTruth: number;
  isTarget: 0 | 1;
}

export interface PartitionCounts {
  labeled: number;
  unlabeledTarget: number;
  unlabeledUnknown: number;
  test: number;
}

export function validateSpec(spec: PartitionSpec): void {
  if (spec.targets.length < 2) throw new Error('at least two target classes required');
  if (new Set(spec.targets).size !== spec.targets.length) {
    throw new Error('duplicate target classes');
  }
  const overlap = spec.targets.filter((t) => spec.unknowns.includes(t));
  if (overlap.length > 0) throw new Error(`classes in both lists: ${overlap}`);
  if (!(spec.labeledFraction > 0 && spec.labeledFraction < 1)) {
    throw new Error('labeledFraction must be in (0, 1)');
  }
  if (!(spec.mismatch >= 0 && spec.mismatch <= 1)) {
    throw new Error('mismatch must be in [0, 1]');
  }
  if (spec.mismatch > 0 && spec.unknowns.length === 0) {
    throw new Error('mismatch > 0 needs at least one unknown class');
  }
}

function indicesOf(labels: ArrayLike<number>, classes: readonly number[]): number[] {
  const wanted = new Set(classes);
  const out: number[] = [];
  for (let i = 0; i < labels.length; i++) {
    if (wanted.has(labels[i])) out.push(i);
  }
  return out;
}

export function buildPartition(
  trainLabels: ArrayLike<number>,
  testLabels: ArrayLike<number>,
  spec: PartitionSpec,
): { rows: PartitionRow[]; counts: PartitionCounts } {
  validateSpec(spec);
  const rand = mulberry32(spec.seed);
  const remap = new Map(spec.targets.map((c, i) => [c, i]));

  const targetTrain = shuffled(indicesOf(trainLabels, spec.targets), rand);
  const unknownTrain = shuffled(indicesOf(trainLabels, spec.unknowns), rand);

  const nLabeled = Math.round(spec.labeledFraction * targetTrain.length);
  if (nLabeled < spec.targets.length) {
    throw new Error(
      `labeled pool of ${nLabeled} cannot cover ${spec.targets.length} target classes`,
    );
  }
  const targetPool = targetTrain.slice(nLabeled);

  let nTargetU: number;
  let nUnknown: number;
  if (spec.mismatch === 1) {
    nTargetU = 0;
    nUnknown = Math.min(spec.maxUnlabeled ?? unknownTrain.length, unknownTrain.length);
  } else {
    nTargetU = targetPool.length;
    nUnknown = Math.round((nTargetU * spec.mismatch) / (1 - spec.mismatch));
    if (spec.maxUnlabeled !== undefined && nTargetU + nUnknown > spec.maxUnlabeled) {
      nTargetU = Math.round(spec.maxUnlabeled * (1 - spec.mismatch));
      nUnknown = spec.maxUnlabeled - nTargetU;
    }
    if (nUnknown > unknownTrain.length) {
      nUnknown = unknownTrain.length;
      nTargetU =
        spec.mismatch === 0
          ? nTargetU
          : Math.round((nUnknown * (1 - spec.mismatch)) / spec.mismatch);
    }
  }

  const rows: PartitionRow[] = [];
  for (const src of targetTrain.slice(0, nLabeled)) {
    const id = remap.get(trainLabels[src])!;
    rows.push({ split: 'train', sourceIndex: src, role: 'labeled', label: id, groundTruth: id, isTarget: 1 });
  }
  for (const src of targetPool.slice(0, nTargetU)) {
    const id = remap.get(trainLabels[src])!;
    rows.push({ split: 'train', sourceIndex: src, role: 'unlabeled', label: -1, groundTruth: id, isTarget: 1 });
  }
  for (const src of unknownTrain.slice(0, nUnknown)) {
    rows.push({ split: 'train', sourceIndex: src, role: 'unlabeled', label: -1, groundTruth: -1, isTarget: 0 });
  }
  let nTest = 0;
  for (const src of indicesOf(testLabels, spec.targets)) {
    const id = remap.get(testLabels[src])!;
    rows.push({ split: 'test', sourceIndex: src, role: 'test', label: id, groundTruth: id, isTarget: 1 });
    nTest++;
  }
  return {
    rows,
    counts: { labeled: nLabeled, unlabeledTarget: nTargetU, unlabeledUnknown: nUnknown, test: nTest },
  };
}
