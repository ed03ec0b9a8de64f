#!/usr/bin/env node
/**
 * CLI: export encoder embeddings of a CIFAR-10-format dataset as
 * WADE v1 + sidecar files.
 *
 *   export --dataset <dir> --checkpoint <dir> --targets 3,5 \
 *          --mismatch 0.6 --out <dir> [--unknowns 0,1,...] \
 *          [--labeled-fraction 0.08] [--seed 0] [--max-unlabeled N] \
 *          [--feature-layer name]
 */

import * as path from 'path';
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';
import { runExport } from './export';

function parseClassList(raw: string): number[] {
  return raw
    .split(',')
    .filter((s) => s.trim() !== '')
    .map((s) => {
      const v = Number(s);
      if (!Number.isInteger(v) || v < 0) throw new Error(`bad class id: ${s}`);
      return v;
    });
}

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .command('export', 'run the export', (cmd) =>
      cmd
        .option('dataset', { type: 'string', demandOption: true, describe: 'CIFAR-format directory' })
        .option('checkpoint', { type: 'string', demandOption: true, describe: 'encoder checkpoint directory' })
        .option('targets', { type: 'string', demandOption: true, describe: 'comma-separated target class ids' })
        .option('unknowns', { type: 'string', describe: 'comma-separated unknown class ids (default: 0..9 minus targets)' })
        .option('mismatch', { type: 'number', demandOption: true })
        .option('labeled-fraction', { type: 'number', default: 0.08 })
        .option('seed', { type: 'number', default: 0 })
        .option('max-unlabeled', { type: 'number' })
        .option('feature-layer', { type: 'string' })
        .option('out', { type: 'string', demandOption: true, describe: 'output directory' }),
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    })
    .parse();

  const targets = parseClassList(args.targets as string);
  const unknowns =
    args.unknowns !== undefined
      ? parseClassList(args.unknowns as string)
      : Array.from({ length: 10 }, (_, i) => i).filter((c) => !targets.includes(c));

  const outDir = args.out as string;
  require('fs').mkdirSync(outDir, { recursive: true });
  const summary = await runExport({
    datasetDir: args.dataset as string,
    checkpointDir: args.checkpoint as string,
    targets,
    unknowns,
    mismatch: args.mismatch as number,
    labeledFraction: args['labeled-fraction'] as number,
    seed: args.seed as number,
    maxUnlabeled: args['max-unlabeled'] as number | undefined,
    featureLayer: args['feature-layer'] as string | undefined,
    outEmbeddings: path.join(outDir, 'embeddings.wade'),
    outLabels: path.join(outDir, 'labels.csv'),
  });
  console.log(
    `exported ${summary.count} embeddings (dim ${summary.dim}): ` +
      `${summary.counts.labeled} labeled, ` +
      `${summary.counts.unlabeledTarget}+${summary.counts.unlabeledUnknown} unlabeled ` +
      `(target+unknown), ${summary.counts.test} test`,
  );
  return 0;
}

if (require.main === module) {
  main(hideBin(process.argv))
    .then((code) => process.exit(code))
    .catch((err) => {
      console.error(`export failed: ${err.message}`);
      process.exit(1);
    });
}
