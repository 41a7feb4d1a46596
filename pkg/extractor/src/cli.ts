#!/usr/bin/env node
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import { DatasetError } from './dataset';
import { extract } from './extract';
import { ModelError } from './model';

export function main(argv: string[]): number {
  const args = yargs(argv)
    .scriptName('boxmon-extract')
    .usage('$0 --model model.json --data data.csv --layers 2,3 --out-dir out/')
    .option('model', { type: 'string', demandOption: true, describe: 'model JSON file' })
    .option('data', { type: 'string', demandOption: true, describe: 'dataset CSV (label,x_1,...,x_d)' })
    .option('layers', { type: 'string', demandOption: true, describe: 'comma-separated layer ids' })
    .option('out-dir', { type: 'string', demandOption: true, describe: 'output directory' })
    .option('unknown', { type: 'boolean', default: false, describe: 'write true_label -1 on every row' })
    .strict()
    .exitProcess(false)
    .parseSync();

  let layers: number[];
  try {
    layers = String(args.layers).split(',').map((part) => {
      const id = Number(part.trim());
      if (!Number.isInteger(id)) {
        throw new ModelError(`layer id "${part.trim()}" is not an integer`);
      }
      return id;
    });
    const written = extract({
      modelPath: args.model,
      dataPath: args.data,
      layers,
      outDir: args.outDir,
      unknown: args.unknown,
    });
    for (const file of written) {
      console.log(file);
    }
    return 0;
  } catch (e) {
    if (e instanceof ModelError || e instanceof DatasetError ||
        (e as NodeJS.ErrnoException).code === 'ENOENT') {
      console.error(`error: ${(e as Error).message}`);
      return 2;
    }
    throw e;
  }
}

if (require.main === module) {
  process.exit(main(hideBin(process.argv)));
}
