/**
 * Trajectory CSV reader.
 *
 * The simulator writes one row per control step with the fixed header
 * t,v_d,v_v,x1,x2,u,delta_hjb,p_batt,wc_norm,wa_norm,xtilde_norm,
 * lambda_min_P,reset_count.  Readers ask for the columns a figure needs
 * and get a named-column error when the file does not provide them.
 */
import { readFileSync } from "fs";

export const TRAJECTORY_COLUMNS = [
  "t", "v_d", "v_v", "x1", "x2", "u", "delta_hjb", "p_batt",
  "wc_norm", "wa_norm", "xtilde_norm", "lambda_min_P", "reset_count",
] as const;

export type ColumnName = (typeof TRAJECTORY_COLUMNS)[number];

export interface Trajectory {
  /** source path, used in error messages and default legend labels */
  path: string;
  columns: Map<string, number[]>;
}

export class MissingColumnError extends Error {
  constructor(public readonly column: string, detail: string) {
    super(`missing column "${column}": ${detail}`);
    this.name = "MissingColumnError";
  }
}

export function readTrajectory(path: string, required: ColumnName[]): Trajectory {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new Error(`${path}: no data rows`);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  for (const col of required) {
    if (!header.includes(col)) {
      throw new MissingColumnError(col, `not in header of ${path}`);
    }
  }
  const indices = required.map((c) => header.indexOf(c));
  const columns = new Map<string, number[]>(required.map((c) => [c, []]));
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    for (let j = 0; j < required.length; j++) {
      const idx = indices[j];
      if (idx >= fields.length || fields[idx].trim() === "") {
        throw new MissingColumnError(
          required[j],
          `row ${i} of ${path} is truncated`,
        );
      }
      const v = Number(fields[idx]);
      if (!Number.isFinite(v)) {
        throw new Error(`${path}: row ${i}, column "${required[j]}" is not a number`);
      }
      columns.get(required[j])!.push(v);
    }
  }
  return { path, columns };
}

export function column(t: Trajectory, name: ColumnName): number[] {
  const c = t.columns.get(name);
  if (!c) {
    throw new MissingColumnError(name, `not loaded from ${t.path}`);
  }
  return c;
}
