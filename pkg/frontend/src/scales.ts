/** Minimal deterministic scale helpers (linear and log10). */

export interface Scale {
  (x: number): number;
  ticks: number[];
  domain: [number, number];
}

function niceStep(span: number, target: number): number {
  const raw = span / Math.max(1, target);
  const mag = 10 ** Math.floor(Math.log10(raw));
  const norm = raw / mag;
  const step = norm >= 5 ? 10 : norm >= 2 ? 5 : norm >= 1 ? 2 : 1;
  return step * mag;
}

export function linearScale(
  lo: number,
  hi: number,
  rlo: number,
  rhi: number,
  targetTicks = 5,
): Scale {
  if (!(hi > lo)) hi = lo + 1;
  const f = (x: number) => rlo + ((x - lo) / (hi - lo)) * (rhi - rlo);
  const step = niceStep(hi - lo, targetTicks);
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step) {
    // Snap to the tick grid so floating accumulation cannot shift labels.
    ticks.push(Math.round(v / step) * step);
  }
  return Object.assign(f, { ticks, domain: [lo, hi] as [number, number] });
}

/** Log10 scale; ticks at powers of ten inside the domain. */
export function logScale(lo: number, hi: number, rlo: number, rhi: number): Scale {
  if (!(lo > 0) || !(hi > 0)) {
    throw new Error("log scale needs positive domain");
  }
  if (!(hi > lo)) hi = lo * 10;
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const f = (x: number) => rlo + ((Math.log10(x) - llo) / (lhi - llo)) * (rhi - rlo);
  const ticks: number[] = [];
  for (let e = Math.ceil(llo - 1e-9); e <= lhi + 1e-9; e++) {
    ticks.push(10 ** e);
  }
  if (ticks.length < 2) {
    // Domain inside one decade: fall back to linear ticks.
    ticks.length = 0;
    for (const t of linearScale(lo, hi, 0, 1, 4).ticks) ticks.push(t);
  }
  return Object.assign(f, { ticks, domain: [lo, hi] as [number, number] });
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) throw new Error("no finite values to scale");
  return [lo, hi];
}
