import { numericColumn, readCsv } from "./csv.js";
import { fixed, tickLabel } from "./format.js";
import { FitDict, readFit } from "./report.js";
import { logScale, extent, linearScale, Scale } from "./scales.js";
import { Svg } from "./svg.js";

export interface DecayOptions {
  csvPath: string;
  reportPath: string;
  column: string;
  title: string;
}

const W = 640;
const H = 440;
const M = { left: 64, right: 20, top: 36, bottom: 48 };

/** Mix-norm decay plot.  Power-law fits get log-log axes, exponential
 * fits get semilog-y; the fitted line is overlaid across its window and
 * the slope/rate is annotated to two decimals. */
export function renderDecay(opts: DecayOptions): string {
  const table = readCsv(opts.csvPath);
  const t = numericColumn(table, "t");
  const v = numericColumn(table, opts.column);
  const fit = readFit(opts.reportPath);

  const pts: Array<[number, number]> = [];
  for (let i = 0; i < t.length; i++) {
    if (v[i]! > 0 && (fit.kind === "exponential" || t[i]! > 0)) {
      pts.push([t[i]!, v[i]!]);
    }
  }
  if (pts.length < 2) {
    throw new Error(`column '${opts.column}' has fewer than 2 plottable points`);
  }

  const [tLo, tHi] = extent(pts.map((p) => p[0]));
  const [vLo, vHi] = extent(pts.map((p) => p[1]));
  const x: Scale =
    fit.kind === "power"
      ? logScale(Math.max(tLo, 1e-12), tHi, M.left, W - M.right)
      : linearScale(tLo, tHi, M.left, W - M.right, 6);
  const y = logScale(vLo, vHi, H - M.bottom, M.top);

  const svg = new Svg(W, H);
  drawAxes(svg, x, y, fit.kind === "power" ? "t (log)" : "t", `${opts.column} (log)`);

  svg.polyline(
    pts.map(([a, b]) => [x(a), y(b)]),
    "#1f77b4",
  );
  for (const [a, b] of pts) svg.circle(x(a), y(b), 2.2, "#1f77b4");

  overlayFit(svg, x, y, fit, Math.max(tLo, fit.t_min), Math.min(tHi, fit.t_max));

  const label = fit.kind === "power" ? "slope" : "rate";
  const value = fit.kind === "power" ? fit.exponent : fit.rate;
  svg.text(W - M.right, M.top - 10, `${label} = ${fixed(value, 2)}`, {
    anchor: "end",
    size: 14,
  });
  svg.text(M.left, M.top - 10, opts.title, { size: 14 });
  return svg.render();
}

function overlayFit(
  svg: Svg,
  x: Scale,
  y: Scale,
  fit: FitDict,
  lo: number,
  hi: number,
): void {
  if (!(hi > lo)) return;
  const value = (t: number) =>
    fit.kind === "power"
      ? fit.intercept * t ** fit.exponent
      : fit.intercept * Math.exp(fit.exponent * t);
  const pts: Array<[number, number]> = [];
  const steps = 64;
  for (let i = 0; i <= steps; i++) {
    const t =
      fit.kind === "power"
        ? lo * (hi / lo) ** (i / steps)
        : lo + ((hi - lo) * i) / steps;
    const val = value(t);
    if (val > 0) pts.push([x(t), y(val)]);
  }
  svg.polyline(pts, "#d62728", 1.5, "6 3");
}

export function drawAxes(svg: Svg, x: Scale, y: Scale, xLabel: string, yLabel: string): void {
  const [x0, x1] = [x(x.domain[0]), x(x.domain[1])];
  const [y0, y1] = [y(y.domain[0]), y(y.domain[1])];
  svg.line(x0, y0, x1, y0, "#000000");
  svg.line(x0, y0, x0, y1, "#000000");
  for (const tv of x.ticks) {
    const xx = x(tv);
    svg.line(xx, y0, xx, y0 + 4, "#000000");
    svg.line(xx, y0, xx, y1, "#dddddd", 0.5);
    svg.text(xx, y0 + 18, tickLabel(tv), { anchor: "middle", size: 11 });
  }
  for (const tv of y.ticks) {
    const yy = y(tv);
    svg.line(x0 - 4, yy, x0, yy, "#000000");
    svg.line(x0, yy, x1, yy, "#dddddd", 0.5);
    svg.text(x0 - 7, yy + 4, tickLabel(tv), { anchor: "end", size: 11 });
  }
  const ymid = (y0 + y1) / 2;
  svg.text((x0 + x1) / 2, y0 + 36, xLabel, { anchor: "middle", size: 12 });
  svg.raw(
    `<text x="16" y="${Math.round(ymid)}" font-size="12" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${Math.round(ymid)})">${yLabel}</text>`,
  );
}
