/**
 * Test fixtures: a synthetic CIFAR-10-format dataset (one deterministic
 * base pattern per class plus per-instance pixel noise) and a small
 * convolutional encoder saved as a checkpoint.
 */

import * as path from 'path';
import * as fs from 'fs';
import * as tf from '@tensorflow/tfjs';
import { IMAGE_BYTES, toImageTensorData, writeCifarFile } from '../src/cifar';
import { saveModel } from '../src/encoder';
import { gaussian, mulberry32, shuffled } from '../src/rng';

function shuffledIndices(n: number, rand: () => number): number[] {
  return shuffled(Array.from({ length: n }, (_, i) => i), rand);
}

export interface SynthSpec {
  nPerClassTrain: number;
  nPerClassTest: number;
  nClasses?: number;
  pixelNoise?: number;
  seed?: number;
  /** make one class pair share most of its pattern (a hard boundary) */
  twin?: { classA: number; classB: number; sharedBlocks: number };
  /** rebuild these classes as per-block blends of the twin pair, i.e.
   *  clusters that sit between the two target classes */
  blendClasses?: number[];
}

export function synthesizeCifarDir(dir: string, spec: SynthSpec): void {
  const nClasses = spec.nClasses ?? 10;
  const noise = spec.pixelNoise ?? 40;
  const rand = mulberry32(spec.seed ?? 0);
  const gauss = gaussian(rand);

  // class patterns need low-frequency structure: a convolutional encoder
  // with pooling averages away per-pixel noise, so each class gets a
  // coarse 4x4 color-block pattern upsampled to 32x32
  const grid = 4;
  const cell = 32 / grid;
  const coarseGrids: number[][][] = [];
  for (let c = 0; c < nClasses; c++) {
    coarseGrids.push(
      Array.from({ length: 3 }, () =>
        Array.from({ length: grid * grid }, () => Math.floor(rand() * 256)),
      ),
    );
  }
  if (spec.twin) {
    // classB copies classA except for a few redrawn blocks per channel
    const { classA, classB, sharedBlocks } = spec.twin;
    for (let ch = 0; ch < 3; ch++) {
      const blocks = shuffledIndices(grid * grid, rand);
      coarseGrids[classB][ch] = coarseGrids[classA][ch].slice();
      for (const b of blocks.slice(sharedBlocks)) {
        coarseGrids[classB][ch][b] = Math.floor(rand() * 256);
      }
    }
    for (const c of spec.blendClasses ?? []) {
      // an in-between pattern: every block drawn from one of the twins
      const lean = 0.25 + rand() * 0.5;
      for (let ch = 0; ch < 3; ch++) {
        coarseGrids[c][ch] = coarseGrids[classA][ch].map((v, b) =>
          rand() < lean ? v : coarseGrids[classB][ch][b],
        );
      }
    }
  }
  const bases: Uint8Array[] = [];
  for (let c = 0; c < nClasses; c++) {
    const base = new Uint8Array(IMAGE_BYTES);
    for (let ch = 0; ch < 3; ch++) {
      for (let y = 0; y < 32; y++) {
        for (let x = 0; x < 32; x++) {
          const block = Math.floor(y / cell) * grid + Math.floor(x / cell);
          base[ch * 1024 + y * 32 + x] = coarseGrids[c][ch][block];
        }
      }
    }
    bases.push(base);
  }

  const emit = (nPerClass: number, file: string) => {
    const n = nPerClass * nClasses;
    const images = new Uint8Array(n * IMAGE_BYTES);
    const labels = new Uint8Array(n);
    // interleave classes so file order is not class order
    for (let i = 0; i < n; i++) {
      const c = i % nClasses;
      labels[i] = c;
      const base = bases[c];
      for (let p = 0; p < IMAGE_BYTES; p++) {
        const v = Math.round(base[p] + gauss() * noise);
        images[i * IMAGE_BYTES + p] = Math.min(255, Math.max(0, v));
      }
    }
    writeCifarFile(file, images, labels);
  };

  fs.mkdirSync(dir, { recursive: true });
  emit(spec.nPerClassTrain, path.join(dir, 'data_batch_1.bin'));
  emit(spec.nPerClassTest, path.join(dir, 'test_batch.bin'));
}

function encoderModel(featureDim: number): tf.LayersModel {
  // tanh conv activations keep intermediate features signed and spread; the
  // sigmoid feature layer keeps cosines positive like a contrastive space
  // (strongly negative runner-up similarities blow up the ratio weight)
  return tf.sequential({
    layers: [
      tf.layers.conv2d({
        inputShape: [32, 32, 3],
        filters: 8,
        kernelSize: 3,
        strides: 2,
        activation: 'tanh',
        name: 'conv_a',
      }),
      tf.layers.conv2d({
        filters: 16,
        kernelSize: 3,
        strides: 2,
        activation: 'tanh',
        name: 'conv_b',
      }),
      tf.layers.flatten({ name: 'flat' }),
      tf.layers.dense({
        units: featureDim,
        activation: 'relu',
        biasInitializer: tf.initializers.constant({ value: 0.2 }),
        name: 'features',
      }),
      tf.layers.dense({ units: 48, name: 'projection_head' }),
    ],
  });
}

/** 4x4 average-pool per channel of HWC image data: the pretext target. */
function coarseTargets(pixels: Float32Array, n: number): Float32Array {
  const out = new Float32Array(n * 48);
  const cell = 8;
  for (let i = 0; i < n; i++) {
    for (let by = 0; by < 4; by++) {
      for (let bx = 0; bx < 4; bx++) {
        const sums = [0, 0, 0];
        for (let y = by * cell; y < (by + 1) * cell; y++) {
          for (let x = bx * cell; x < (bx + 1) * cell; x++) {
            const p = i * 32 * 32 * 3 + (y * 32 + x) * 3;
            sums[0] += pixels[p];
            sums[1] += pixels[p + 1];
            sums[2] += pixels[p + 2];
          }
        }
        for (let ch = 0; ch < 3; ch++) {
          out[i * 48 + (by * 4 + bx) * 3 + ch] = sums[ch] / (cell * cell);
        }
      }
    }
  }
  return out;
}

/**
 * Pretrain a small encoder on a label-free pretext (regress each image's
 * own 4x4 downsample through the projection head), then bake feature
 * standardization plus a constant coordinate into the checkpoint:
 * standardized features f with an appended 1 give cosine (1 + corr(f))/2,
 * i.e. a strictly positive, well-spread similarity structure like a
 * contrastively pretrained space, independent of the random init.
 */
export async function buildEncoderCheckpoint(
  dir: string,
  trainImages?: Uint8Array,
  featureDim = 48,
  epochs = 5,
): Promise<void> {
  const model = encoderModel(featureDim);
  let mean = new Float32Array(featureDim);
  const scale = new Float32Array(featureDim).fill(1);
  if (trainImages !== undefined) {
    const n = trainImages.length / IMAGE_BYTES;
    const indices = Array.from({ length: n }, (_, i) => i);
    const pixels = toImageTensorData(trainImages, indices);
    const inputs = tf.tensor4d(pixels, [n, 32, 32, 3]);
    const targets = tf.tensor2d(coarseTargets(pixels, n), [n, 48]);
    model.compile({ optimizer: tf.train.adam(2e-3), loss: 'meanSquaredError' });
    await model.fit(inputs, targets, { epochs, batchSize: 64, shuffle: true, verbose: 0 });
    targets.dispose();

    const featModel = tf.model({
      inputs: model.inputs,
      outputs: model.getLayer('features').output as tf.SymbolicTensor,
    });
    const feats = featModel.predict(inputs) as tf.Tensor2D;
    const momentArrays = tf.tidy(() => {
      const m = feats.mean(0);
      const centered = feats.sub(m);
      const std = centered.square().mean(0).sqrt();
      return [m.dataSync(), std.dataSync()];
    });
    mean = new Float32Array(momentArrays[0] as Float32Array);
    const std = new Float32Array(momentArrays[1] as Float32Array);
    for (let i = 0; i < featureDim; i++) {
      scale[i] = 1 / ((std[i] + 1e-6) * Math.sqrt(featureDim));
    }
    feats.dispose();
    inputs.dispose();
  }

  // standardize: diag(scale) * (f - mean); then append the constant 1
  const normKernel = tf.buffer([featureDim, featureDim]);
  const normBias = new Float32Array(featureDim);
  for (let i = 0; i < featureDim; i++) {
    normKernel.set(scale[i], i, i);
    normBias[i] = -mean[i] * scale[i];
  }
  const augKernel = tf.buffer([featureDim, featureDim + 1]);
  const augBias = new Float32Array(featureDim + 1);
  for (let i = 0; i < featureDim; i++) augKernel.set(1, i, i);
  augBias[featureDim] = 1;

  const input = tf.input({ shape: [32, 32, 3] });
  let x = input as tf.SymbolicTensor;
  for (const layer of model.layers) {
    if (layer.name === 'projection_head') break;
    x = layer.apply(x) as tf.SymbolicTensor;
  }
  x = tf.layers
    .dense({
      units: featureDim,
      name: 'features_norm',
      weights: [normKernel.toTensor(), tf.tensor1d(normBias)],
    })
    .apply(x) as tf.SymbolicTensor;
  x = tf.layers
    .dense({
      units: featureDim + 1,
      name: 'features_out',
      weights: [augKernel.toTensor(), tf.tensor1d(augBias)],
    })
    .apply(x) as tf.SymbolicTensor;
  const head = tf.layers
    .dense({ units: 16, name: 'projection_head_out' })
    .apply(x) as tf.SymbolicTensor;
  const final = tf.model({ inputs: input, outputs: head });
  await saveModel(final, dir);
  final.dispose();
  model.dispose();
}
