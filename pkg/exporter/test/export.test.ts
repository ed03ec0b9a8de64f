/**
 * End-to-end exporter contract: synthetic CIFAR-format images plus a
 * pretext-pretrained encoder checkpoint are exported and then validated
 * by the actual training engine (spawned via its CLI) with warnings
 * captured.
 *
 * The real-embedding trend comparison (weighted distillation beating the
 * labeled-only baseline) presumes a genuinely pretrained contrastive
 * encoder over a real dataset; it runs only when WAD_CIFAR10_DIR and
 * WAD_ENCODER_DIR point at such assets and is skipped otherwise.
 */

import { execFileSync } from 'child_process';
import * as fs from 'fs';
import * as os from 'os';
import * as path from 'path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { readWade, readSidecar } from '../src/wade';
import { readCifarDir } from '../src/cifar';
import { runExport, ExportSummary } from '../src/export';
import { buildEncoderCheckpoint, synthesizeCifarDir } from './fixtures';

const tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'export-'));
const datasetDir = path.join(tmp, 'dataset');
const checkpointDir = path.join(tmp, 'encoder');
const outDir = path.join(tmp, 'exported');
let summary: ExportSummary;

beforeAll(async () => {
  synthesizeCifarDir(datasetDir, {
    nPerClassTrain: 120,
    nPerClassTest: 25,
    pixelNoise: 180,
    seed: 7,
    twin: { classA: 3, classB: 5, sharedBlocks: 0 },
    blendClasses: [0, 1, 2, 4, 6, 7, 8, 9],
  });
  const { train } = readCifarDir(datasetDir);
  await buildEncoderCheckpoint(checkpointDir, train.images);
  fs.mkdirSync(outDir, { recursive: true });
  summary = await runExport({
    datasetDir,
    checkpointDir,
    targets: [3, 5],
    unknowns: [0, 1, 2, 4, 6, 7, 8, 9],
    mismatch: 0.6,
    labeledFraction: 0.08,
    seed: 0,
    featureLayer: 'features_out',
    outEmbeddings: path.join(outDir, 'embeddings.wade'),
    outLabels: path.join(outDir, 'labels.csv'),
  });
});

afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

function runPrimary(args: string[], cwd: string): { stdout: string; stderr: string } {
  const stderrFile = path.join(cwd, 'stderr.txt');
  const stdout = execFileSync('python3', ['-m', 'wad.cli', ...args], {
    cwd,
    env: { ...process.env, WAD_LOG: 'info' },
    stdio: ['ignore', 'pipe', fs.openSync(stderrFile, 'w')],
  }).toString();
  return { stdout, stderr: fs.readFileSync(stderrFile, 'utf-8') };
}

describe('exporter contract', () => {
  it('follows the protocol arithmetic (8% labeled, exact 40:60 mix)', () => {
    // 240 target train images -> 19 labeled; pool 221 -> 332 unknowns
    expect(summary.counts.labeled).toBe(Math.round(0.08 * 240));
    expect(summary.counts.unlabeledTarget).toBe(240 - summary.counts.labeled);
    expect(summary.counts.unlabeledUnknown).toBe(
      Math.round((summary.counts.unlabeledTarget * 0.6) / 0.4),
    );
    expect(summary.counts.test).toBe(50);
    const rows = readSidecar(path.join(outDir, 'labels.csv'));
    expect(rows.length).toBe(summary.count);
    expect(rows.filter((r) => r.role === 'labeled').length).toBe(summary.counts.labeled);
    expect(rows.filter((r) => r.role === 'unlabeled' && r.isTarget === 0).length).toBe(
      summary.counts.unlabeledUnknown,
    );
  });

  it('writes unit-norm embeddings at the cut layer width', () => {
    const { count, dim, values } = readWade(path.join(outDir, 'embeddings.wade'));
    expect(count).toBe(summary.count);
    expect(dim).toBe(49); // the standardized 'features_out' layer, not the head
    for (let i = 0; i < count; i++) {
      let sq = 0;
      for (let k = 0; k < dim; k++) sq += values[i * dim + k] ** 2;
      expect(Math.abs(Math.sqrt(sq) - 1)).toBeLessThan(1e-5);
    }
  });

  it('passes the primary loader with zero validation warnings', () => {
    const workDir = path.join(tmp, 'loadcheck');
    fs.mkdirSync(workDir, { recursive: true });
    const config = {
      scenario: {
        paths: { embeddings: path.join(outDir, 'embeddings.wade'), labels: path.join(outDir, 'labels.csv') },
      },
      train: { epochs: 2, batch_size: 32 },
      mode: 'baseline',
      seeds: [0],
      output_dir: path.join(workDir, 'runs'),
    };
    fs.writeFileSync(path.join(workDir, 'config.json'), JSON.stringify(config));
    const { stderr } = runPrimary(['train', '--config', 'config.json'], workDir);
    expect(stderr.toLowerCase()).not.toContain('warning');
    expect(
      fs.existsSync(path.join(workDir, 'runs', 'seed_0', 'baseline', 'checkpoint.wadc')),
    ).toBe(true);
  });

  it('supports end-to-end training on the exported embeddings (3 seeds)', () => {
    const workDir = path.join(tmp, 'e2e');
    fs.mkdirSync(workDir, { recursive: true });
    const config = {
      scenario: {
        paths: { embeddings: path.join(outDir, 'embeddings.wade'), labels: path.join(outDir, 'labels.csv') },
      },
      train: { epochs: 60, batch_size: 32 },
      curriculum: { alpha0: 0.1, total_updates: 5 },
      mode: ['baseline', 'wad'],
      seeds: [0, 1, 2],
      output_dir: path.join(workDir, 'runs'),
    };
    fs.writeFileSync(path.join(workDir, 'config.json'), JSON.stringify(config));
    runPrimary(['train', '--config', 'config.json'], workDir);
    const summaryJson = JSON.parse(
      fs.readFileSync(path.join(workDir, 'runs', 'summary.json'), 'utf-8'),
    );
    const baseline = summaryJson.modes.baseline.mean_accuracy;
    const wad = summaryJson.modes.wad.mean_accuracy;
    console.log(`exported-embedding accuracy: baseline=${baseline} wad=${wad}`);
    // the exported space must carry enough class structure for both modes
    // to clear a far-above-chance bar on the binary task
    expect(baseline).toBeGreaterThan(0.8);
    expect(wad).toBeGreaterThan(0.8);
    expect(summaryJson.deltas_vs_baseline.wad.per_seed).toHaveProperty('0');
  });

  it.skipIf(!process.env.WAD_CIFAR10_DIR || !process.env.WAD_ENCODER_DIR)(
    'real-embedding trend: beats the baseline with a pretrained encoder',
    async () => {
      const workDir = path.join(tmp, 'real');
      fs.mkdirSync(workDir, { recursive: true });
      const realOut = path.join(workDir, 'exported');
      fs.mkdirSync(realOut, { recursive: true });
      await runExport({
        datasetDir: process.env.WAD_CIFAR10_DIR!,
        checkpointDir: process.env.WAD_ENCODER_DIR!,
        targets: [3, 5],
        unknowns: [0, 1, 2, 4, 6, 7, 8, 9],
        mismatch: 0.6,
        labeledFraction: 0.08,
        seed: 0,
        maxUnlabeled: 10_000,
        featureLayer: process.env.WAD_ENCODER_FEATURE_LAYER,
        outEmbeddings: path.join(realOut, 'embeddings.wade'),
        outLabels: path.join(realOut, 'labels.csv'),
      });
      const config = {
        scenario: {
          paths: { embeddings: path.join(realOut, 'embeddings.wade'), labels: path.join(realOut, 'labels.csv') },
        },
        train: { epochs: 100, batch_size: 32 },
        mode: ['baseline', 'wad'],
        seeds: [0, 1, 2],
        output_dir: path.join(workDir, 'runs'),
      };
      fs.writeFileSync(path.join(workDir, 'config.json'), JSON.stringify(config));
      runPrimary(['train', '--config', 'config.json'], workDir);
      const summaryJson = JSON.parse(
        fs.readFileSync(path.join(workDir, 'runs', 'summary.json'), 'utf-8'),
      );
      expect(summaryJson.modes.wad.mean_accuracy).toBeGreaterThan(
        summaryJson.modes.baseline.mean_accuracy,
      );
    },
  );
});
