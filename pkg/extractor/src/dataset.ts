import * as fs from 'fs';
import Papa from 'papaparse';

export interface Sample {
  readonly label: number;
  readonly values: ReadonlyArray<number>;
}

export class DatasetError extends Error {}

/** Read a headerless CSV of `label,x_1,...,x_d` rows. Blank lines and lines
 * starting with '#' are skipped. Every row must carry the same arity. */
export function readDataset(path: string): Sample[] {
  const text = fs.readFileSync(path, 'utf8');
  const parsed = Papa.parse<string[]>(text, { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new DatasetError(`${path}: ${first.message}`);
  }
  const samples: Sample[] = [];
  let width = -1;
  for (let i = 0; i < parsed.data.length; i++) {
    const cells = parsed.data[i];
    if (cells.length > 0 && cells[0].trimStart().startsWith('#')) {
      continue;
    }
    const row = i + 1;
    if (cells.length < 2) {
      throw new DatasetError(`${path}: row ${row}: expected label plus at least one value`);
    }
    const label = Number(cells[0]);
    if (!Number.isInteger(label)) {
      throw new DatasetError(`${path}: row ${row}: label "${cells[0]}" is not an integer`);
    }
    const values = cells.slice(1).map((cell, j) => {
      const v = Number(cell);
      if (cell.trim() === '' || !Number.isFinite(v)) {
        throw new DatasetError(`${path}: row ${row}: value ${j + 1} ("${cell}") is not a finite number`);
      }
      return v;
    });
    if (width === -1) {
      width = values.length;
    } else if (values.length !== width) {
      throw new DatasetError(`${path}: row ${row}: expected ${width} value(s), found ${values.length}`);
    }
    samples.push({ label, values });
  }
  return samples;
}
