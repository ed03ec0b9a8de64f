/**
 * Encoder checkpoint IO and batch feature extraction.
 *
 * Checkpoints are tfjs layers models stored as `model.json` (topology +
 * weight specs) plus `weights.bin`, written and read through an explicit
 * in-memory IO handler so no platform-specific file handler is needed.
 * Features are the model's output (pass `featureLayer` to cut the model
 * at a named layer instead, the usual pre-projection convention), then
 * L2-normalized in float64.
 */

import * as fs from 'fs';
import * as path from 'path';
import * as tf from '@tensorflow/tfjs';

export async function saveModel(model: tf.LayersModel, dir: string): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const meta = {
        modelTopology: artifacts.modelTopology,
        weightSpecs: artifacts.weightSpecs,
        format: artifacts.format,
        generatedBy: artifacts.generatedBy,
      };
      fs.writeFileSync(path.join(dir, 'model.json'), JSON.stringify(meta));
      const data = artifacts.weightData as ArrayBuffer;
      fs.writeFileSync(path.join(dir, 'weights.bin'), Buffer.from(data));
      return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: 'JSON' } };
    }),
  );
}

export async function loadEncoder(dir: string, featureLayer?: string): Promise<tf.LayersModel> {
  const meta = JSON.parse(fs.readFileSync(path.join(dir, 'model.json'), 'utf-8'));
  const weights = fs.readFileSync(path.join(dir, 'weights.bin'));
  const model = await tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: meta.modelTopology,
      weightSpecs: meta.weightSpecs,
      weightData: weights.buffer.slice(weights.byteOffset, weights.byteOffset + weights.byteLength),
    }),
  );
  if (!featureLayer) return model;
  const layer = model.getLayer(featureLayer);
  return tf.model({ inputs: model.inputs, outputs: layer.output as tf.SymbolicTensor });
}

/** Run one image batch (HWC floats in [0,1]) through the encoder. */
export function encodeBatch(
  model: tf.LayersModel,
  data: Float32Array,
  count: number,
  side: number,
): Float32Array {
  return tf.tidy(() => {
    const input = tf.tensor4d(data, [count, side, side, 3]);
    const output = model.predict(input) as tf.Tensor;
    const flat = output.reshape([count, -1]);
    return flat.dataSync() as Float32Array;
  });
}

/** Row-wise L2 normalization computed in float64, emitted as float32. */
export function l2NormalizeRows(values: Float32Array, count: number, dim: number): Float32Array {
  const out = new Float32Array(values.length);
  for (let i = 0; i < count; i++) {
    let sq = 0;
    for (let k = 0; k < dim; k++) {
      const v = values[i * dim + k];
      sq += v * v;
    }
    const norm = Math.sqrt(sq);
    if (norm < 1e-12) {
      throw new Error(`embedding row ${i} has zero norm`);
    }
    for (let k = 0; k < dim; k++) {
      out[i * dim + k] = values[i * dim + k] / norm;
    }
  }
  return out;
}
