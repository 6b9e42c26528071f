#!/usr/bin/env node
/**
 * netclust-plot <kind> [inputs] --out figure.svg
 *
 * Kinds:
 *   spectrum    --spectrum spectrum.csv
 *   clusters    --partition partition.csv --positions positions.csv
 *   conductance --diagnostics diagnostics.json
 *   sizes       --diagnostics diagnostics.json
 *
 * Exit codes: 0 written, 1 bad arguments, 2 schema/input mismatch.
 */

import { writeFileSync } from "fs";
import { parseArgs } from "node:util";
import {
  SchemaError,
  readDiagnosticsJson,
  readPartitionCsv,
  readPositionsCsv,
  readSpectrumCsv,
} from "./data.js";
import {
  renderClusters,
  renderConductance,
  renderSizes,
  renderSpectrum,
} from "./plots.js";

const USAGE = `usage: netclust-plot <spectrum|clusters|conductance|sizes> [inputs] --out FILE
  spectrum    --spectrum spectrum.csv
  clusters    --partition partition.csv --positions positions.csv
  conductance --diagnostics diagnostics.json
  sizes       --diagnostics diagnostics.json`;

function requireOption(value: string | undefined, name: string): string {
  if (!value) {
    throw new UsageError(`missing required option --${name}`);
  }
  return value;
}

class UsageError extends Error {}

export function run(argv: string[]): number {
  let svg: string;
  try {
    const { values, positionals } = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        spectrum: { type: "string" },
        partition: { type: "string" },
        positions: { type: "string" },
        diagnostics: { type: "string" },
        out: { type: "string" },
      },
    });
    const kind = positionals[0];
    const out = requireOption(values.out, "out");
    switch (kind) {
      case "spectrum":
        svg = renderSpectrum(readSpectrumCsv(requireOption(values.spectrum, "spectrum")));
        break;
      case "clusters":
        svg = renderClusters(
          readPartitionCsv(requireOption(values.partition, "partition")),
          readPositionsCsv(requireOption(values.positions, "positions")),
        );
        break;
      case "conductance":
        svg = renderConductance(
          readDiagnosticsJson(requireOption(values.diagnostics, "diagnostics")),
        );
        break;
      case "sizes":
        svg = renderSizes(readDiagnosticsJson(requireOption(values.diagnostics, "diagnostics")));
        break;
      default:
        throw new UsageError(`unknown plot kind ${kind ?? "(none)"}`);
    }
    writeFileSync(out, svg);
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`error: ${err.message}\n${USAGE}`);
      return 1;
    }
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(run(process.argv.slice(2)));
}
