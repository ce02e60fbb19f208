import { describe, expect, it } from "vitest";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { numericColumn, readCsv } from "../src/csv.js";
import { renderScaling } from "../src/scaling.js";
import { SAMPLES } from "./paths.js";

function tmpCsv(text: string): string {
  const dir = mkdtempSync(join(tmpdir(), "mixlab-plots-"));
  const path = join(dir, "tdis.csv");
  writeFileSync(path, text);
  return path;
}

const HEAT = (kappa: number) => Math.log(2) / (4 * Math.PI * Math.PI * kappa);

describe("renderScaling", () => {
  it("annotates the log-log slope: heat-law data gives slope = -1.00", () => {
    const kappas = [1e-2, 1e-3, 1e-4];
    const lines = ["kappa,t_dis,worst_probe,balance_residual"];
    for (const k of kappas) lines.push(`${k},${HEAT(k)},mode(1;0),0.0`);
    const svg = renderScaling({ csvPath: tmpCsv(lines.join("\n") + "\n"), title: "heat" });
    expect(svg).toContain("slope = -1.00");
    expect(svg).toContain("heat ln2/(4pi^2 kappa)");
    expect(svg).toContain("ln(kappa)^2 guide");
    expect(svg).toContain("ref slope -1/2");
  });

  it("A sweeps with t ~ A^-1/2 annotate slope = -0.50 and omit kappa guides", () => {
    const lines = ["A,t_dis,worst_probe,balance_residual"];
    for (const a of [4, 8, 16]) lines.push(`${a},${2 / Math.sqrt(a)},mode(1;1),0.0`);
    const svg = renderScaling({ csvPath: tmpCsv(lines.join("\n") + "\n"), title: "cells" });
    expect(svg).toContain("slope = -0.50");
    expect(svg).not.toContain("ln(kappa)^2 guide");
    expect(svg).toContain("ref slope -1/2");
  });

  it("rejects an unknown sweep parameter, naming file and line 1", () => {
    const path = tmpCsv("m,t_dis\n2,1.0\n4,0.5\n");
    let msg = "";
    try {
      renderScaling({ csvPath: path, title: "x" });
    } catch (err) {
      msg = (err as Error).message;
    }
    expect(msg).toContain(`${path}:1:`);
    expect(msg).toContain("'m'");
  });

  it("rejects a single-point sweep", () => {
    const path = tmpCsv("kappa,t_dis\n0.001,1.76\n");
    expect(() => renderScaling({ csvPath: path, title: "x" })).toThrowError(/2 sweep points/);
  });
});

describe("renderScaling on the shipped heat sample", () => {
  const csv = join(SAMPLES, "heat_tdis", "tdis.csv");

  it("sample data lies on the heat curve within 1%", () => {
    const table = readCsv(csv);
    const kappas = numericColumn(table, "kappa");
    const ts = numericColumn(table, "t_dis");
    for (let i = 0; i < kappas.length; i++) {
      const rel = Math.abs(ts[i]! - HEAT(kappas[i]!)) / HEAT(kappas[i]!);
      expect(rel).toBeLessThan(0.01);
    }
  });

  it("re-renders byte-identically", () => {
    const opts = { csvPath: csv, title: "heat baseline" };
    expect(renderScaling(opts)).toBe(renderScaling(opts));
  });
});
