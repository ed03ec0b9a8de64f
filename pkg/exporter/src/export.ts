/**
 * End-to-end export: CIFAR-format images -> encoder features -> WADE v1
 * embeddings plus label sidecar, following the mismatch protocol.
 */

import * as tf from '@tensorflow/tfjs';
import { IMAGE_SIDE, readCifarDir, toImageTensorData } from './cifar';
import { encodeBatch, l2NormalizeRows, loadEncoder } from './encoder';
import { buildPartition, PartitionCounts, PartitionSpec } from './partition';
import { writeSidecar, writeWade } from './wade';

export interface ExportSpec extends PartitionSpec {
  datasetDir: string;
  checkpointDir: string;
  outEmbeddings: string;
  outLabels: string;
  featureLayer?: string;
  batchSize?: number;
}

export interface ExportSummary {
  count: number;
  dim: number;
  counts: PartitionCounts;
}

export async function runExport(spec: ExportSpec): Promise<ExportSummary> {
  const { train, test } = readCifarDir(spec.datasetDir);
  const { rows, counts } = buildPartition(train.labels, test.labels, spec);
  const model = await loadEncoder(spec.checkpointDir, spec.featureLayer);
  const batchSize = spec.batchSize ?? 256;

  let dim = -1;
  let features: Float32Array | null = null;
  for (let start = 0; start < rows.length; start += batchSize) {
    const batch = rows.slice(start, start + batchSize);
    const pixels = new Float32Array(batch.length * IMAGE_SIDE * IMAGE_SIDE * 3);
    batch.forEach((row, i) => {
      const source = row.split === 'train' ? train.images : test.images;
      const one = toImageTensorData(source, [row.sourceIndex]);
      pixels.set(one, i * one.length);
    });
    const encoded = encodeBatch(model, pixels, batch.length, IMAGE_SIDE);
    if (dim < 0) {
      dim = encoded.length / batch.length;
      features = new Float32Array(rows.length * dim);
    }
    features!.set(encoded, start * dim);
  }
  model.dispose();
  tf.disposeVariables();

  const normalized = l2NormalizeRows(features!, rows.length, dim);
  writeWade(spec.outEmbeddings, normalized, rows.length, dim);
  writeSidecar(
    spec.outLabels,
    rows.map((r) => ({
      role: r.role,
      label: r.label,
      groundTruth: r.groundTruth,
      isTarget: r.isTarget,
    })),
  );
  return { count: rows.length, dim, counts };
}
