import { diverging } from "./colormap.js";
import { readSnapshot } from "./mlf.js";
import { encodePng } from "./png.js";

export interface SnapshotOptions {
  mlfPath: string;
}

/** Field heatmap: one pixel per grid cell, symmetric diverging scale
 * centered at zero (limits +-max|value|), x2 increasing upward. */
export function renderSnapshotPng(opts: SnapshotOptions): Buffer {
  const { n, values } = readSnapshot(opts.mlfPath);
  let vmax = 0;
  for (const v of values) {
    const a = Math.abs(v);
    if (a > vmax) vmax = a;
  }
  if (vmax === 0) vmax = 1; // uniform zero field renders as all-white
  const rgb = new Uint8Array(n * n * 3);
  for (let row = 0; row < n; row++) {
    // Image rows run top-down; the grid's x2 axis runs bottom-up.
    const i2 = n - 1 - row;
    for (let i1 = 0; i1 < n; i1++) {
      const [r, g, b] = diverging(values[i2 * n + i1]! / vmax);
      const at = (row * n + i1) * 3;
      rgb[at] = r;
      rgb[at + 1] = g;
      rgb[at + 2] = b;
    }
  }
  return encodePng(n, n, rgb);
}
