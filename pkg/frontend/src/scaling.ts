import { numericColumn, readCsv } from "./csv.js";
import { SchemaError } from "./errors.js";
import { fixed } from "./format.js";
import { drawAxes } from "./decay.js";
import { logScale, extent } from "./scales.js";
import { Svg } from "./svg.js";

export interface ScalingOptions {
  csvPath: string;
  title: string;
}

const W = 640;
const H = 440;
const M = { left: 64, right: 20, top: 36, bottom: 48 };

/** t_dis scaling panel from a tdis.csv sweep.
 *
 * Points on log-log axes with a least-squares slope annotation and a
 * reference slope -1/2 guide.  Sweeps over kappa additionally get the
 * heat-only curve ln2 / (4 pi^2 kappa) and a ln(kappa)^2 guide, both
 * anchored at the first sweep point. */
export function renderScaling(opts: ScalingOptions): string {
  const table = readCsv(opts.csvPath);
  const param = table.header[0]!;
  if (param !== "kappa" && param !== "A") {
    throw new SchemaError(
      opts.csvPath,
      1,
      `first column must be the sweep parameter kappa or A, got '${param}'`,
    );
  }
  const xs = numericColumn(table, param);
  const ts = numericColumn(table, "t_dis");
  if (xs.length < 2) {
    throw new SchemaError(opts.csvPath, null, "need at least 2 sweep points");
  }

  const [xLo, xHi] = extent(xs);
  let [tLo, tHi] = extent(ts);
  if (param === "kappa") {
    // Heat curve dominates everything else; keep it in frame.
    tHi = Math.max(tHi, Math.log(2) / (4 * Math.PI * Math.PI * xLo));
  }
  const x = logScale(xLo, xHi, M.left, W - M.right);
  const y = logScale(tLo, tHi, H - M.bottom, M.top);

  const svg = new Svg(W, H);
  drawAxes(svg, x, y, `${param} (log)`, "t_dis (log)");

  // Least-squares slope in log-log coordinates.
  const lx = xs.map(Math.log);
  const ly = ts.map(Math.log);
  const nPts = lx.length;
  const mx = lx.reduce((a, b) => a + b, 0) / nPts;
  const my = ly.reduce((a, b) => a + b, 0) / nPts;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < nPts; i++) {
    sxx += (lx[i]! - mx) ** 2;
    sxy += (lx[i]! - mx) * (ly[i]! - my);
  }
  const slope = sxy / sxx;

  const guide = (fn: (v: number) => number, color: string, dash: string): void => {
    const pts: Array<[number, number]> = [];
    const steps = 48;
    for (let i = 0; i <= steps; i++) {
      const v = xLo * (xHi / xLo) ** (i / steps);
      const tv = fn(v);
      if (tv > 0) pts.push([x(v), y(tv)]);
    }
    svg.polyline(pts, color, 1.2, dash);
  };

  // Reference slope -1/2 anchored at the first point.
  const c12 = ts[0]! * Math.sqrt(xs[0]!);
  guide((v) => c12 / Math.sqrt(v), "#2ca02c", "5 3");
  if (param === "kappa") {
    guide((v) => Math.log(2) / (4 * Math.PI * Math.PI * v), "#7f7f7f", "2 3");
    const cln = ts[0]! / Math.log(xs[0]!) ** 2;
    guide((v) => cln * Math.log(v) ** 2, "#9467bd", "8 3");
  }

  svg.polyline(
    xs.map((v, i) => [x(v), y(ts[i]!)]),
    "#1f77b4",
    1,
  );
  for (let i = 0; i < xs.length; i++) {
    svg.circle(x(xs[i]!), y(ts[i]!), 3, "#1f77b4");
  }

  svg.text(W - M.right, M.top - 10, `slope = ${fixed(slope, 2)}`, {
    anchor: "end",
    size: 14,
  });
  svg.text(M.left, M.top - 10, opts.title, { size: 14 });
  const legendY = M.top + 8;
  svg.text(W - M.right, legendY + 14, "ref slope -1/2", {
    anchor: "end",
    size: 11,
    fill: "#2ca02c",
  });
  if (param === "kappa") {
    svg.text(W - M.right, legendY + 28, "heat ln2/(4pi^2 kappa)", {
      anchor: "end",
      size: 11,
      fill: "#7f7f7f",
    });
    svg.text(W - M.right, legendY + 42, "ln(kappa)^2 guide", {
      anchor: "end",
      size: 11,
      fill: "#9467bd",
    });
  }
  return svg.render();
}
