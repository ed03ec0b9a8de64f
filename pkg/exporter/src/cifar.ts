/**
 * CIFAR-10 binary format: each record is 1 label byte followed by 3072
 * pixel bytes (32x32 red plane, then green, then blue). Train batches are
 * data_batch_*.bin, the test split is test_batch.bin.
 */

import * as fs from 'fs';
import * as path from 'path';

export const IMAGE_BYTES = 3072;
export const RECORD_BYTES = IMAGE_BYTES + 1;
export const IMAGE_SIDE = 32;

export interface CifarSplit {
  /** n * 3072 bytes, channel-planar per record */
  images: Uint8Array;
  labels: Uint8Array;
}

export function readCifarFile(file: string): CifarSplit {
  const raw = fs.readFileSync(file);
  if (raw.length === 0 || raw.length % RECORD_BYTES !== 0) {
    throw new Error(`${file}: size ${raw.length} is not a multiple of ${RECORD_BYTES}`);
  }
  const n = raw.length / RECORD_BYTES;
  const images = new Uint8Array(n * IMAGE_BYTES);
  const labels = new Uint8Array(n);
  for (let i = 0; i < n; i++) {
    labels[i] = raw[i * RECORD_BYTES];
    images.set(raw.subarray(i * RECORD_BYTES + 1, (i + 1) * RECORD_BYTES), i * IMAGE_BYTES);
  }
  return { images, labels };
}

function concatSplits(splits: CifarSplit[]): CifarSplit {
  const n = splits.reduce((acc, s) => acc + s.labels.length, 0);
  const images = new Uint8Array(n * IMAGE_BYTES);
  const labels = new Uint8Array(n);
  let offset = 0;
  for (const s of splits) {
    images.set(s.images, offset * IMAGE_BYTES);
    labels.set(s.labels, offset);
    offset += s.labels.length;
  }
  return { images, labels };
}

/** Load `data_batch_*.bin` (train) and `test_batch.bin` from a directory. */
export function readCifarDir(dir: string): { train: CifarSplit; test: CifarSplit } {
  const entries = fs.readdirSync(dir).sort();
  const trainFiles = entries.filter((e) => /^data_batch.*\.bin$/.test(e));
  const testFile = entries.find((e) => e === 'test_batch.bin');
  if (trainFiles.length === 0 || !testFile) {
    throw new Error(`${dir}: expected data_batch*.bin files and test_batch.bin`);
  }
  return {
    train: concatSplits(trainFiles.map((f) => readCifarFile(path.join(dir, f)))),
    test: readCifarFile(path.join(dir, testFile)),
  };
}

export function writeCifarFile(file: string, images: Uint8Array, labels: Uint8Array): void {
  const n = labels.length;
  const raw = Buffer.alloc(n * RECORD_BYTES);
  for (let i = 0; i < n; i++) {
    raw[i * RECORD_BYTES] = labels[i];
    raw.set(images.subarray(i * IMAGE_BYTES, (i + 1) * IMAGE_BYTES), i * RECORD_BYTES + 1);
  }
  fs.writeFileSync(file, raw);
}

/**
 * Gather records into an HWC float tensor buffer in [0, 1] for the
 * selected source indices (planar CHW bytes -> interleaved HWC floats).
 */
export function toImageTensorData(images: Uint8Array, indices: readonly number[]): Float32Array {
  const pixels = IMAGE_SIDE * IMAGE_SIDE;
  const out = new Float32Array(indices.length * pixels * 3);
  indices.forEach((src, i) => {
    const base = src * IMAGE_BYTES;
    const dst = i * pixels * 3;
    for (let p = 0; p < pixels; p++) {
      out[dst + p * 3] = images[base + p] / 255;
      out[dst + p * 3 + 1] = images[base + pixels + p] / 255;
      out[dst + p * 3 + 2] = images[base + 2 * pixels + p] / 255;
    }
  });
  return out;
}
