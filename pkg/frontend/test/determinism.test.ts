import { describe, expect, it } from "vitest";
import { join } from "node:path";

import { renderDecay } from "../src/decay.js";
import { readFit } from "../src/report.js";
import { renderScaling } from "../src/scaling.js";
import { SAMPLES } from "./paths.js";

/** Every shipped sample must re-render to the identical byte stream.
 * (The decay/scaling/fraction/snapshot suites cover their own samples;
 * this file covers the remaining ones.) */
describe("sample determinism", () => {
  it("pierrehumbert decay (exponential fit) renders twice identically", () => {
    const opts = {
      csvPath: join(SAMPLES, "pierrehumbert_decay", "trajectory.csv"),
      reportPath: join(SAMPLES, "pierrehumbert_decay", "report.json"),
      column: "h_minus_1",
      title: "random shear decay",
    };
    const first = renderDecay(opts);
    expect(renderDecay(opts)).toBe(first);
    const fit = readFit(opts.reportPath);
    expect(fit.kind).toBe("exponential");
    expect(first).toContain(`rate = ${fit.rate.toFixed(2)}`);
  });

  it("cellular A-sweep scaling renders twice identically", () => {
    const opts = {
      csvPath: join(SAMPLES, "cellular_tdis", "tdis.csv"),
      title: "cellular sweep",
    };
    const first = renderScaling(opts);
    expect(renderScaling(opts)).toBe(first);
    expect(first).not.toContain("heat ln2");
  });
});
