import * as fs from 'fs';
import * as path from 'path';

import { readDataset } from './dataset';
import { argmax, forward, loadModel, Model, ModelError } from './model';

export interface ExtractionSpec {
  readonly modelPath: string;
  readonly dataPath: string;
  /** Ids of the layers whose activations get dumped, one file per id. */
  readonly layers: ReadonlyArray<number>;
  readonly outDir: string;
  /** Mark every row as unknown class (true_label -1) regardless of the
   * dataset labels. */
  readonly unknown: boolean;
}

function layerIndices(model: Model, ids: ReadonlyArray<number>): Map<number, number> {
  const index = new Map<number, number>();
  model.layers.forEach((layer, i) => index.set(layer.id, i));
  const missing = ids.filter((id) => !index.has(id));
  if (missing.length > 0) {
    throw new ModelError(`model has no layer id ${missing.join(', ')}`);
  }
  return new Map(ids.map((id) => [id, index.get(id) as number]));
}

/** Run the model over the dataset and write one feature file per requested
 * layer: headerless CSV rows `true_label,predicted_label,f_1,...,f_n` in
 * dataset order, activations dumped as-is. Returns the written paths. */
export function extract(spec: ExtractionSpec): string[] {
  if (spec.layers.length === 0) {
    throw new ModelError('no layers requested');
  }
  const model = loadModel(spec.modelPath);
  const samples = readDataset(spec.dataPath);
  const picked = layerIndices(model, spec.layers);

  const lines = new Map<number, string[]>();
  for (const id of picked.keys()) {
    lines.set(id, []);
  }
  for (const sample of samples) {
    const activations = forward(model, sample.values);
    const predicted = argmax(activations[activations.length - 1]);
    const trueLabel = spec.unknown ? -1 : sample.label;
    for (const [id, i] of picked) {
      const cells = [String(trueLabel), String(predicted)];
      for (const v of activations[i]) {
        cells.push(String(v));
      }
      (lines.get(id) as string[]).push(cells.join(','));
    }
  }

  fs.mkdirSync(spec.outDir, { recursive: true });
  const written: string[] = [];
  for (const id of spec.layers) {
    const file = path.join(spec.outDir, `features_layer${id}.csv`);
    const body = lines.get(id) as string[];
    fs.writeFileSync(file, body.length > 0 ? body.join('\n') + '\n' : '');
    written.push(file);
  }
  return written;
}
