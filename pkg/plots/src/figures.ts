/**
 * The five figure kinds, as echarts option builders plus a thin render step.
 *
 * Builders are pure functions of parsed CSV rows so tests can assert on the
 * option structure (panel and cell counts) as well as on the rendered SVG.
 * No statistics are computed here: every number plotted comes straight from
 * a harness CSV.
 */

import { readdirSync } from "fs";
import { dirname, join } from "path";
import type { EChartsOption, SeriesOption } from "echarts";

import {
  FSWEEP_COLUMNS,
  LR_BANDS_COLUMNS,
  MEDIANS_COLUMNS,
  PERCENTILES_COLUMNS,
  Row,
  SchemaError,
  TRACE_COLUMNS,
  num,
  readCsv,
} from "./csv.js";
import { lossAxisType, renderToSvg, writeFigure } from "./render.js";

export interface FigureResult {
  svg: string;
  option: EChartsOption;
}

const PALETTE = ["#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#b279a2"];

// --- trajectory pair ---------------------------------------------------------

export function buildTrajectoryPair(rows: Row[], source: string, linear: boolean): EChartsOption {
  const steps = rows.map((r) => num(r, "step"));
  const lr = rows.map((r, i) => [steps[i], num(r, "lr")]);
  const trueLoss = rows.map((r, i) => [steps[i], num(r, "true_loss")]);
  const observed = rows.map((r, i) => [steps[i], num(r, "observed_loss")]);
  const lossValues = [...trueLoss, ...observed].map((p) => p[1]);
  return {
    color: PALETTE,
    title: [
      { text: "learning rate", left: "center", top: 6, textStyle: { fontSize: 13 } },
      { text: "loss", left: "center", top: "50%", textStyle: { fontSize: 13 } },
    ],
    legend: { bottom: 22, data: ["lr", "true loss", "observed loss"] },
    grid: [
      { left: 70, right: 30, top: 32, height: "34%" },
      { left: 70, right: 30, top: "56%", height: "32%" },
    ],
    xAxis: [
      { type: "value", gridIndex: 0, name: "step" },
      { type: "value", gridIndex: 1, name: "step" },
    ],
    yAxis: [
      { type: "value", gridIndex: 0 },
      { type: lossAxisType(lossValues, linear), gridIndex: 1 },
    ],
    series: [
      { name: "lr", type: "line", xAxisIndex: 0, yAxisIndex: 0, data: lr, showSymbol: false },
      { name: "true loss", type: "line", xAxisIndex: 1, yAxisIndex: 1, data: trueLoss, showSymbol: false },
      { name: "observed loss", type: "line", xAxisIndex: 1, yAxisIndex: 1, data: observed,
        showSymbol: false, lineStyle: { width: 1, opacity: 0.6 } },
    ],
  };
}

export function renderTrajectoryPair(input: string, out: string, linear = false): FigureResult {
  const rows = readCsv(input, TRACE_COLUMNS);
  const option = buildTrajectoryPair(rows, input, linear);
  const svg = renderToSvg(option, [input]);
  writeFigure(out, svg);
  return { svg, option };
}

// --- factor sweep --------------------------------------------------------------

function discoverTraceFiles(fsweepPath: string): string[] {
  const dir = dirname(fsweepPath);
  return readdirSync(dir)
    .filter((f) => /^trace_F.+\.csv$/.test(f))
    .sort()
    .map((f) => join(dir, f));
}

export function renderFsweep(
  input: string,
  out: string,
  traceInputs: string[] = [],
  linear = false,
): FigureResult {
  const sweepRows = readCsv(input, FSWEEP_COLUMNS);
  const diverged = new Map(sweepRows.map((r) => [r.F, r.diverged === "true"]));
  const tracePaths = traceInputs.length > 0 ? traceInputs : discoverTraceFiles(input);
  if (tracePaths.length === 0) {
    throw new SchemaError(`no trace_F*.csv files found next to ${input}`);
  }
  const curves = tracePaths.map((path) => {
    const f = /trace_F(.+)\.csv$/.exec(path)?.[1] ?? path;
    const rows = readCsv(path, TRACE_COLUMNS);
    return { f, path, points: rows.map((r) => [num(r, "step"), num(r, "true_loss")]) };
  });
  const maxLen = Math.max(...curves.map((c) => c.points.length));
  const lossValues = curves.flatMap((c) => c.points.map((p) => p[1]));
  const series: SeriesOption[] = curves.map((c) => {
    // a truncated trace or a majority-diverged factor gets flagged in the legend
    const isDiverged = (diverged.get(c.f) ?? false) || c.points.length < maxLen;
    return {
      name: `F=${c.f}${isDiverged ? " (diverged)" : ""}`,
      type: "line",
      data: c.points,
      showSymbol: false,
    };
  });
  const option: EChartsOption = {
    color: PALETTE,
    title: { text: "loss trajectories by scaling factor", left: "center", top: 6 },
    legend: { bottom: 22 },
    grid: { left: 70, right: 30, top: 40, bottom: 70 },
    xAxis: { type: "value", name: "step" },
    yAxis: { type: lossAxisType(lossValues, linear) },
    series,
  };
  const svg = renderToSvg(option, [input, ...tracePaths]);
  writeFigure(out, svg);
  return { svg, option };
}

// --- median bar ------------------------------------------------------------------

export function renderMedianBar(input: string, out: string): FigureResult {
  const rows = readCsv(input, PERCENTILES_COLUMNS);
  const option: EChartsOption = {
    color: PALETTE,
    title: { text: "median final loss by scheduler", left: "center", top: 6 },
    grid: { left: 70, right: 30, top: 40, bottom: 70 },
    xAxis: { type: "category", data: rows.map((r) => r.scheduler) },
    yAxis: { type: "value", name: "median final loss" },
    series: [{ type: "bar", data: rows.map((r) => num(r, "p50")), barWidth: "55%" }],
  };
  const svg = renderToSvg(option, [input]);
  writeFigure(out, svg);
  return { svg, option };
}

// --- heatmap ----------------------------------------------------------------------

export function renderHeatmap(input: string, out: string): FigureResult {
  const rows = readCsv(input, MEDIANS_COLUMNS);
  const schedulers = [...new Set(rows.map((r) => r.scheduler))].sort();
  const noises = [...new Set(rows.map((r) => r.noise))].sort();
  const cells = rows.map((r) => [
    noises.indexOf(r.noise),
    schedulers.indexOf(r.scheduler),
    Math.log10(num(r, "median_final_loss")),
  ]);
  const values = cells.map((c) => c[2]).filter((v) => Number.isFinite(v));
  const option: EChartsOption = {
    title: { text: "median final loss (log10) by scheduler and noise", left: "center", top: 6 },
    grid: { left: 110, right: 90, top: 40, bottom: 70 },
    xAxis: { type: "category", data: noises },
    yAxis: { type: "category", data: schedulers },
    visualMap: {
      // the widget itself cannot render headlessly; cells stay colored and
      // carry their log10 values as labels instead
      show: false,
      min: Math.min(...values),
      max: Math.max(...values),
      // darker = lower (better) loss
      inRange: { color: ["#08306b", "#4292c6", "#c6dbef", "#f7fbff"] },
    },
    series: [{
      type: "heatmap",
      data: cells,
      label: {
        show: true,
        formatter: (p) => ((p as { value: number[] }).value[2]).toFixed(2),
      },
    }],
  };
  const svg = renderToSvg(option, [input]);
  writeFigure(out, svg);
  return { svg, option };
}

// --- LR percentile bands -------------------------------------------------------------

export function renderLrBands(input: string, out: string, scheduler = "greedy"): FigureResult {
  const rows = readCsv(input, LR_BANDS_COLUMNS).filter((r) => r.scheduler === scheduler);
  if (rows.length === 0) {
    throw new SchemaError(`${input}: no rows for scheduler "${scheduler}"`);
  }
  const pick = (col: string) => rows.map((r) => [num(r, "step"), num(r, col)]);
  const option: EChartsOption = {
    color: PALETTE,
    title: { text: `learning-rate trajectory bands: ${scheduler}`, left: "center", top: 6 },
    legend: { bottom: 22 },
    grid: { left: 70, right: 30, top: 40, bottom: 70 },
    xAxis: { type: "value", name: "step" },
    yAxis: { type: "value", name: "lr" },
    series: [
      { name: "median", type: "line", data: pick("p50"), showSymbol: false,
        lineStyle: { width: 3 } },
      { name: "p10", type: "line", data: pick("p10"), showSymbol: false,
        lineStyle: { type: "dashed", width: 1.5 } },
      { name: "p90", type: "line", data: pick("p90"), showSymbol: false,
        lineStyle: { type: "dashed", width: 1.5 } },
    ],
  };
  const svg = renderToSvg(option, [input]);
  writeFigure(out, svg);
  return { svg, option };
}
