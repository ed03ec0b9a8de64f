/**
 * WADE v1 embedding files and the label sidecar CSV.
 *
 * WADE layout (little-endian): magic "WADE", u32 version = 1, u64 count,
 * u32 dim, u8 dtype code (0 = float32), then count*dim float32 values
 * row-major. The sidecar is one CSV row per instance with the header
 * `index,role,label,ground_truth,is_target`, indices dense 0..count-1.
 */

import * as fs from 'fs';

export const WADE_HEADER_BYTES = 21;

export type Role = 'labeled' | 'unlabeled' | 'test';

export interface SidecarRow {
  role: Role;
  /** visible class id; -1 for unlabeled rows */
  label: number;
  /** hidden true class id, -1 when unavailable (e.g. unknown categories) */
  groundTruth: number;
  /** 1 = target category, 0 = unknown, -1 = unavailable */
  isTarget: -1 | 0 | 1;
}

export function writeWade(path: string, values: Float32Array, count: number, dim: number): void {
  if (count * dim !== values.length) {
    throw new Error(`WADE payload mismatch: ${values.length} values for ${count}x${dim}`);
  }
  if (count === 0) {
    throw new Error('WADE files must contain at least one embedding');
  }
  const header = Buffer.alloc(WADE_HEADER_BYTES);
  header.write('WADE', 0, 'ascii');
  header.writeUInt32LE(1, 4);
  header.writeBigUInt64LE(BigInt(count), 8);
  header.writeUInt32LE(dim, 16);
  header.writeUInt8(0, 20);

  const payload = Buffer.alloc(values.length * 4);
  for (let i = 0; i < values.length; i++) {
    payload.writeFloatLE(values[i], i * 4);
  }
  fs.writeFileSync(path, Buffer.concat([header, payload]));
}

export function readWade(path: string): { count: number; dim: number; values: Float32Array } {
  const raw = fs.readFileSync(path);
  if (raw.length < WADE_HEADER_BYTES) throw new Error(`${path}: shorter than header`);
  if (raw.toString('ascii', 0, 4) !== 'WADE') throw new Error(`${path}: bad magic`);
  const version = raw.readUInt32LE(4);
  if (version !== 1) throw new Error(`${path}: unsupported version ${version}`);
  const count = Number(raw.readBigUInt64LE(8));
  const dim = raw.readUInt32LE(16);
  const dtype = raw.readUInt8(20);
  if (dtype !== 0) throw new Error(`${path}: unsupported dtype code ${dtype}`);
  const expected = WADE_HEADER_BYTES + count * dim * 4;
  if (raw.length !== expected) {
    throw new Error(`${path}: expected ${expected} bytes, found ${raw.length}`);
  }
  const values = new Float32Array(count * dim);
  for (let i = 0; i < values.length; i++) {
    values[i] = raw.readFloatLE(WADE_HEADER_BYTES + i * 4);
  }
  return { count, dim, values };
}

export function writeSidecar(path: string, rows: readonly SidecarRow[]): void {
  const lines = ['index,role,label,ground_truth,is_target'];
  rows.forEach((row, index) => {
    lines.push(`${index},${row.role},${row.label},${row.groundTruth},${row.isTarget}`);
  });
  fs.writeFileSync(path, lines.join('\n') + '\n');
}

export function readSidecar(path: string): SidecarRow[] {
  const lines = fs.readFileSync(path, 'utf-8').trim().split('\n');
  if (lines[0] !== 'index,role,label,ground_truth,is_target') {
    throw new Error(`${path}: unexpected header ${lines[0]}`);
  }
  return lines.slice(1).map((line, i) => {
    const parts = line.split(',');
    if (parts.length !== 5 || Number(parts[0]) !== i) {
      throw new Error(`${path}: malformed row at line ${i + 2}`);
    }
    return {
      role: parts[1] as Role,
      label: Number(parts[2]),
      groundTruth: Number(parts[3]),
      isTarget: Number(parts[4]) as -1 | 0 | 1,
    };
  });
}
