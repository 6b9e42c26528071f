/**
 * Readers for the netclust output formats.
 *
 * Every reader validates the header/schema and throws SchemaError with the
 * offending file and column, so the CLI can exit nonzero with a usable
 * message instead of rendering garbage.
 */

import { readFileSync } from "fs";
import Papa from "papaparse";

export class SchemaError extends Error {}

export interface SpectrumRow {
  index: number;
  eigenvalue: number;
}

export interface PartitionRow {
  node: number;
  cluster: number;
  discarded: boolean;
}

export interface PositionRow {
  node: number;
  x: number;
  y: number;
}

export interface ClusterInfo {
  id: number;
  size: number;
  conductance: number;
  discarded: boolean;
}

function parseCsv(path: string, columns: string[]): Record<string, number>[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`${path}: cannot read file`);
  }
  // strip '#' comment lines (the writers put a format tag on the first line)
  const body = text
    .split("\n")
    .filter((line) => !line.startsWith("#"))
    .join("\n");
  const parsed = Papa.parse<Record<string, number>>(body, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  for (const col of columns) {
    if (!fields.includes(col)) {
      throw new SchemaError(`${path}: missing column '${col}' (found: ${fields.join(",")})`);
    }
  }
  parsed.data.forEach((row, i) => {
    for (const col of columns) {
      const v = row[col];
      if (typeof v !== "number" || !Number.isFinite(v)) {
        throw new SchemaError(`${path}: row ${i + 1}: column '${col}' is not a finite number`);
      }
    }
  });
  return parsed.data;
}

export function readSpectrumCsv(path: string): SpectrumRow[] {
  const rows = parseCsv(path, ["index", "eigenvalue"]).map((r) => ({
    index: r.index,
    eigenvalue: r.eigenvalue,
  }));
  if (rows.length < 2) {
    throw new SchemaError(`${path}: need at least 2 eigenvalues, got ${rows.length}`);
  }
  return rows;
}

export function readPartitionCsv(path: string): PartitionRow[] {
  return parseCsv(path, ["node", "cluster", "discarded"]).map((r) => ({
    node: r.node,
    cluster: r.cluster,
    discarded: r.discarded !== 0,
  }));
}

export function readPositionsCsv(path: string): Map<number, PositionRow> {
  const out = new Map<number, PositionRow>();
  for (const r of parseCsv(path, ["node", "x", "y"])) {
    out.set(r.node, { node: r.node, x: r.x, y: r.y });
  }
  return out;
}

export function readDiagnosticsJson(path: string): ClusterInfo[] {
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new SchemaError(`${path}: not valid JSON`);
  }
  const doc = raw as { schema?: string; clusters?: unknown[] };
  if (doc.schema !== "netclust-diagnostics-v1") {
    throw new SchemaError(`${path}: expected schema netclust-diagnostics-v1, got ${doc.schema}`);
  }
  if (!Array.isArray(doc.clusters) || doc.clusters.length === 0) {
    throw new SchemaError(`${path}: no clusters`);
  }
  return doc.clusters.map((c, i) => {
    const rec = c as Record<string, unknown>;
    for (const key of ["id", "size", "conductance"]) {
      if (typeof rec[key] !== "number") {
        throw new SchemaError(`${path}: cluster ${i}: missing numeric field '${key}'`);
      }
    }
    return {
      id: rec.id as number,
      size: rec.size as number,
      conductance: rec.conductance as number,
      discarded: Boolean(rec.discarded),
    };
  });
}
