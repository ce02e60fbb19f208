import { SchemaError } from "./errors.js";
import { fixed, tickLabel } from "./format.js";
import { readReport } from "./report.js";
import { linearScale } from "./scales.js";
import { Svg } from "./svg.js";

export interface FractionOptions {
  reportPath: string;
  title: string;
}

interface FractionPoint {
  kappa: number;
  fraction: number;
}

const W = 640;
const H = 440;
const M = { left: 64, right: 20, top: 36, bottom: 48 };

function points(doc: Record<string, unknown>, key: string, path: string): FractionPoint[] {
  const arr = doc[key];
  if (!Array.isArray(arr)) {
    throw new SchemaError(path, null, `results.${key} missing or not a list`);
  }
  return arr.map((p, i) => {
    const row = p as Record<string, unknown>;
    if (typeof row.kappa !== "number" || typeof row.fraction !== "number") {
      throw new SchemaError(path, null, `results.${key}[${i}] needs {kappa, fraction}`);
    }
    return { kappa: row.kappa, fraction: row.fraction };
  });
}

/** Dissipated-fraction bars vs kappa (log-x positions), cascade flow as
 * filled bars and the smooth-shear contrast, when present, as hollow
 * outlines beside them. */
export function renderFraction(opts: FractionOptions): string {
  const report = readReport(opts.reportPath);
  const results = report.results as Record<string, unknown>;
  const cascade = points(results, "cascade_points", opts.reportPath);
  const contrast = Array.isArray(results.contrast_points)
    ? points(results, "contrast_points", opts.reportPath)
    : [];
  if (cascade.length === 0) {
    throw new SchemaError(opts.reportPath, null, "no cascade points to plot");
  }

  const logs = cascade.map((p) => Math.log10(p.kappa));
  const lo = Math.min(...logs) - 0.5;
  const hi = Math.max(...logs) + 0.5;
  const x = linearScale(lo, hi, M.left, W - M.right, cascade.length + 2);
  const y = linearScale(0, 1, H - M.bottom, M.top, 5);

  const svg = new Svg(W, H);
  const y0 = y(0);
  svg.line(x(lo), y0, x(hi), y0, "#000000");
  svg.line(x(lo), y0, x(lo), y(1), "#000000");
  for (const tv of y.ticks) {
    const yy = y(tv);
    svg.line(x(lo) - 4, yy, x(lo), yy, "#000000");
    svg.line(x(lo), yy, x(hi), yy, "#dddddd", 0.5);
    svg.text(x(lo) - 7, yy + 4, tickLabel(tv), { anchor: "end", size: 11 });
  }

  const slot = (x(hi) - x(lo)) / (cascade.length * 2.5);
  const width = Math.min(40, slot);
  cascade.forEach((p, i) => {
    const cx = x(Math.log10(p.kappa));
    const top = y(p.fraction);
    svg.rect(cx - width / 2, top, width, y0 - top, "#1f77b4");
    svg.text(cx, top - 5, fixed(p.fraction, 3), { anchor: "middle", size: 11 });
    svg.text(cx, y0 + 18, `kappa=${tickLabel(p.kappa)}`, { anchor: "middle", size: 11 });
    const q = contrast[i];
    if (q !== undefined) {
      const qx = cx + width * 0.75;
      const qtop = y(q.fraction);
      svg.raw(
        `<rect x="${(qx - width / 4).toFixed(2)}" y="${qtop.toFixed(2)}" ` +
          `width="${(width / 2).toFixed(2)}" height="${(y0 - qtop).toFixed(2)}" ` +
          `fill="none" stroke="#d62728" stroke-width="1.5"/>`,
      );
    }
  });

  svg.text(M.left, M.top - 10, opts.title, { size: 14 });
  svg.text(W - M.right, M.top - 10, "filled: cascade, outline: smooth shear", {
    anchor: "end",
    size: 11,
  });
  svg.raw(
    `<text x="16" y="${Math.round((y0 + y(1)) / 2)}" font-size="12" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${Math.round((y0 + y(1)) / 2)})">dissipated fraction</text>`,
  );
  return svg.render();
}
