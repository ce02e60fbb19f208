/** Symmetric diverging colormap: blue (negative) -> white (zero) -> red
 * (positive).  Piecewise-linear in RGB; endpoints match a conventional
 * cool/warm ramp. */

const NEG: [number, number, number] = [33, 102, 172];
const MID: [number, number, number] = [255, 255, 255];
const POS: [number, number, number] = [178, 24, 43];

function lerp(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

/** Map u in [-1, 1] to RGB. */
export function diverging(u: number): [number, number, number] {
  const t = Math.max(-1, Math.min(1, u));
  const [from, to, s] = t < 0 ? [MID, NEG, -t] : [MID, POS, t];
  return [lerp(from[0], to[0], s), lerp(from[1], to[1], s), lerp(from[2], to[2], s)];
}
