/**
 * Headless SVG rendering.
 *
 * Charts are built as echarts option objects and rendered server-side to SVG
 * strings; animation is disabled so repeated renders of the same data are
 * byte-identical. Every figure carries a footer naming its source CSV files.
 */

import { writeFileSync } from "fs";
import { basename } from "path";
import * as echarts from "echarts";

export const WIDTH = 860;
export const HEIGHT = 560;

export function renderToSvg(option: echarts.EChartsOption, sources: string[],
                            width = WIDTH, height = HEIGHT): string {
  const chart = echarts.init(null as never, undefined, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  const footer = `source: ${sources.map((s) => basename(s)).join(", ")}`;
  chart.setOption({
    animation: false,
    ...option,
    graphic: [
      {
        type: "text",
        left: 8,
        bottom: 4,
        style: { text: footer, fontSize: 10, fill: "#666" },
      },
    ],
  });
  const svg = chart.renderToSVGString();
  chart.dispose();
  return canonicalizeSvg(svg);
}

/**
 * Strip the renderer's per-instance class names (zr0-cls-3 etc.) and the
 * hover-style block that references them. These figures are static, and
 * removing the instance-counter names makes repeated renders byte-identical
 * even within one process.
 */
export function canonicalizeSvg(svg: string): string {
  return svg
    .replace(/<style[^>]*>[\s\S]*?<\/style>/g, "")
    .replace(/ class="zr\d+-cls-\d+"/g, "");
}

export function writeFigure(path: string, svg: string): void {
  writeFileSync(path, svg, "utf-8");
}

/** Loss axes are log-scaled when the data allows it (all values positive). */
export function lossAxisType(values: number[], linear: boolean): "log" | "value" {
  if (linear) return "value";
  return values.every((v) => v > 0 && Number.isFinite(v)) ? "log" : "value";
}
