#!/usr/bin/env node
/**
 * Figure CLI: one command per figure kind.
 *
 *   greedylr-plots trajectory-pair --input trace.csv --out fig.svg [--linear]
 *   greedylr-plots fsweep --input fsweep.csv [--input trace_F0.5.csv ...] --out fig.svg
 *   greedylr-plots median-bar --input percentiles.csv --out fig.svg
 *   greedylr-plots heatmap --input medians.csv --out fig.svg
 *   greedylr-plots lr-bands --input lr_bands.csv --out fig.svg [--scheduler NAME]
 *
 * fsweep discovers sibling trace_F*.csv files when only fsweep.csv is given.
 * Exits nonzero with a column diagnostic on any schema mismatch.
 */

import { SchemaError } from "./csv.js";
import {
  renderFsweep,
  renderHeatmap,
  renderLrBands,
  renderMedianBar,
  renderTrajectoryPair,
} from "./figures.js";

interface Args {
  inputs: string[];
  out: string;
  linear: boolean;
  scheduler: string;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { inputs: [], out: "", linear: false, scheduler: "greedy" };
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--input") args.inputs.push(argv[++i]);
    else if (a === "--out") args.out = argv[++i];
    else if (a === "--linear") args.linear = true;
    else if (a === "--scheduler") args.scheduler = argv[++i];
    else throw new Error(`unknown argument: ${a}`);
  }
  if (args.inputs.length === 0) throw new Error("--input is required");
  if (!args.out) throw new Error("--out is required");
  return args;
}

export function run(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    const args = parseArgs(rest);
    switch (command) {
      case "trajectory-pair":
        renderTrajectoryPair(args.inputs[0], args.out, args.linear);
        break;
      case "fsweep":
        renderFsweep(args.inputs[0], args.out, args.inputs.slice(1), args.linear);
        break;
      case "median-bar":
        renderMedianBar(args.inputs[0], args.out);
        break;
      case "heatmap":
        renderHeatmap(args.inputs[0], args.out);
        break;
      case "lr-bands":
        renderLrBands(args.inputs[0], args.out, args.scheduler);
        break;
      default:
        console.error(`unknown command: ${command ?? "(none)"}; expected one of ` +
          "trajectory-pair | fsweep | median-bar | heatmap | lr-bands");
        return 2;
    }
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${(err as Error).message}`);
      return 3;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(run(process.argv.slice(2)));
}
