/** Deterministic number formatting for SVG output.
 *
 * ECMA-262 fully specifies Number -> string, so everything here is
 * byte-stable across runs and platforms.  Coordinates are rounded to a
 * fixed grid to keep files small and diffs readable.
 */

/** Round to 2 decimal places and render without trailing zero noise. */
export function px(x: number): string {
  const r = Math.round(x * 100) / 100;
  // Avoid "-0" so identical geometry always serializes identically.
  return (Object.is(r, -0) ? 0 : r).toString();
}

/** Fixed-decimal label, e.g. slope annotations. */
export function fixed(x: number, digits: number): string {
  return x.toFixed(digits);
}

/** Compact scientific-ish label for tick values. */
export function tickLabel(x: number): string {
  if (x === 0) return "0";
  const ax = Math.abs(x);
  if (ax >= 1e4 || ax < 1e-3) {
    const exp = Math.floor(Math.log10(ax));
    const mant = x / 10 ** exp;
    const m = Math.round(mant * 100) / 100;
    return m === 1 ? `1e${exp}` : m === -1 ? `-1e${exp}` : `${m.toString()}e${exp}`;
  }
  return (Math.round(x * 1e6) / 1e6).toString();
}
