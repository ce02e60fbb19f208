import { describe, expect, it } from "vitest";

import { fixed, px, tickLabel } from "../src/format.js";

describe("px", () => {
  it("rounds to the 0.01 grid", () => {
    expect(px(64.123456)).toBe("64.12");
    expect(px(64.0)).toBe("64");
  });

  it("never emits -0", () => {
    expect(px(-0.001)).toBe("0");
    expect(px(-0)).toBe("0");
  });
});

describe("fixed", () => {
  it("keeps trailing zeros for annotations", () => {
    expect(fixed(-0.5, 2)).toBe("-0.50");
    expect(fixed(1.005, 2)).toBe((1.005).toFixed(2));
  });
});

describe("tickLabel", () => {
  it("uses scientific form outside [1e-3, 1e4)", () => {
    expect(tickLabel(1e-4)).toBe("1e-4");
    expect(tickLabel(1e5)).toBe("1e5");
    expect(tickLabel(0.001)).toBe("0.001");
    expect(tickLabel(10)).toBe("10");
    expect(tickLabel(0)).toBe("0");
  });
});
