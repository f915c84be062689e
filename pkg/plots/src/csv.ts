/**
 * CSV loading with strict schema checks.
 *
 * The harness emits fixed-column CSVs; a figure must refuse to render from a
 * file whose columns do not match, naming the missing column so the mismatch
 * is diagnosable from the error alone.
 */

import { readFileSync } from "fs";
import Papa from "papaparse";

export class SchemaError extends Error {}

export type Row = Record<string, string>;

export function readCsv(path: string, requiredColumns: string[]): Row[] {
  const text = readFileSync(path, "utf-8");
  const parsed = Papa.parse<Row>(text.trim(), { header: true, skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${path}: ${parsed.errors[0].message}`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const col of requiredColumns) {
    if (!fields.includes(col)) {
      throw new SchemaError(`${path}: missing column "${col}" (found: ${fields.join(",")})`);
    }
  }
  return parsed.data;
}

export function num(row: Row, col: string): number {
  const v = row[col];
  if (v === "" || v === undefined) return NaN;
  if (v === "inf") return Infinity;
  if (v === "-inf") return -Infinity;
  return Number(v);
}

export const TRACE_COLUMNS = ["step", "true_loss", "observed_loss", "lr", "grad_norm"];
export const FSWEEP_COLUMNS = ["F", "final_loss", "diverged"];
export const MEDIANS_COLUMNS = ["scheduler", "noise", "median_final_loss"];
export const PERCENTILES_COLUMNS = ["scheduler", "p10", "p50", "p90"];
export const LR_BANDS_COLUMNS = ["scheduler", "step", "p10", "p50", "p90"];
