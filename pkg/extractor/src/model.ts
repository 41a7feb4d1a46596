import * as fs from 'fs';

export type Activation = 'linear' | 'relu';

export interface Layer {
  /** Identifier used to request this layer's activations. */
  readonly id: number;
  /** One row per unit; row length equals the previous layer's width. */
  readonly weights: ReadonlyArray<ReadonlyArray<number>>;
  readonly bias: ReadonlyArray<number>;
  readonly activation: Activation;
}

export interface Model {
  readonly layers: ReadonlyArray<Layer>;
}

export class ModelError extends Error {}

function isNumberRow(row: unknown): row is number[] {
  return Array.isArray(row) && row.length > 0 &&
    row.every((v) => typeof v === 'number' && Number.isFinite(v));
}

function checkLayer(raw: unknown, index: number): Layer {
  if (typeof raw !== 'object' || raw === null) {
    throw new ModelError(`layers[${index}]: expected an object`);
  }
  const layer = raw as Record<string, unknown>;
  if (typeof layer.id !== 'number' || !Number.isInteger(layer.id)) {
    throw new ModelError(`layers[${index}]: missing integer id`);
  }
  const weights = layer.weights;
  if (!Array.isArray(weights) || weights.length === 0 || !weights.every(isNumberRow)) {
    throw new ModelError(`layers[${index}]: weights must be a non-empty number matrix`);
  }
  const width = (weights[0] as number[]).length;
  if (!weights.every((row) => (row as number[]).length === width)) {
    throw new ModelError(`layers[${index}]: ragged weight matrix`);
  }
  if (!isNumberRow(layer.bias) || (layer.bias as number[]).length !== weights.length) {
    throw new ModelError(`layers[${index}]: bias length must equal the unit count`);
  }
  if (layer.activation !== 'linear' && layer.activation !== 'relu') {
    throw new ModelError(`layers[${index}]: activation must be "linear" or "relu"`);
  }
  return {
    id: layer.id,
    weights: weights as number[][],
    bias: layer.bias as number[],
    activation: layer.activation,
  };
}

export function parseModel(text: string): Model {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (e) {
    throw new ModelError(`model is not valid JSON: ${(e as Error).message}`);
  }
  if (typeof doc !== 'object' || doc === null || !Array.isArray((doc as Model).layers)) {
    throw new ModelError('model must be an object with a "layers" array');
  }
  const layers = (doc as { layers: unknown[] }).layers.map(checkLayer);
  if (layers.length === 0) {
    throw new ModelError('model has no layers');
  }
  const seen = new Set<number>();
  for (const layer of layers) {
    if (seen.has(layer.id)) {
      throw new ModelError(`duplicate layer id ${layer.id}`);
    }
    seen.add(layer.id);
  }
  // consecutive layers must be shape compatible
  for (let i = 1; i < layers.length; i++) {
    const expect = layers[i - 1].weights.length;
    const got = layers[i].weights[0].length;
    if (got !== expect) {
      throw new ModelError(
        `layers[${i}] (id ${layers[i].id}) expects ${got} inputs, previous layer has ${expect} units`,
      );
    }
  }
  return { layers };
}

export function loadModel(path: string): Model {
  return parseModel(fs.readFileSync(path, 'utf8'));
}

export function inputWidth(model: Model): number {
  return model.layers[0].weights[0].length;
}

/** Run one input through the network, returning each layer's activation
 * vector in model order. */
export function forward(model: Model, input: ReadonlyArray<number>): number[][] {
  if (input.length !== inputWidth(model)) {
    throw new ModelError(
      `input has ${input.length} values, model expects ${inputWidth(model)}`,
    );
  }
  const out: number[][] = [];
  let current = input;
  for (const layer of model.layers) {
    const next = layer.weights.map((row, unit) => {
      let acc = layer.bias[unit];
      for (let j = 0; j < row.length; j++) {
        acc += row[j] * current[j];
      }
      return layer.activation === 'relu' ? Math.max(acc, 0) : acc;
    });
    out.push(next);
    current = next;
  }
  return out;
}

/** Index of the largest output value; the lowest index wins ties. */
export function argmax(values: ReadonlyArray<number>): number {
  let best = 0;
  for (let i = 1; i < values.length; i++) {
    if (values[i] > values[best]) {
      best = i;
    }
  }
  return best;
}
