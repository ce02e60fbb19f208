import { readFileSync } from "node:fs";

import { SchemaError } from "./errors.js";

export interface FitDict {
  kind: "power" | "exponential";
  exponent: number;
  rate: number;
  intercept: number;
  r_squared: number;
  t_min: number;
  t_max: number;
  n_points: number;
}

export interface Report {
  scenario: string;
  passed: boolean;
  results: Record<string, unknown>;
  provenance: Record<string, unknown>;
}

export function readReport(path: string): Report {
  let doc: unknown;
  try {
    doc = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new SchemaError(path, null, `not valid JSON (${(err as Error).message})`);
  }
  const rep = doc as Partial<Report>;
  if (
    typeof rep !== "object" ||
    rep === null ||
    typeof rep.scenario !== "string" ||
    typeof rep.passed !== "boolean" ||
    typeof rep.results !== "object"
  ) {
    throw new SchemaError(
      path,
      null,
      "expected a report object {scenario, passed, results, provenance}",
    );
  }
  return rep as Report;
}

/** Pull the fit block out of a report (or a bare `mixlab fit` JSON file). */
export function readFit(path: string): FitDict {
  let doc: unknown;
  try {
    doc = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new SchemaError(path, null, `not valid JSON (${(err as Error).message})`);
  }
  const top = doc as Record<string, unknown>;
  const candidate =
    top.kind !== undefined
      ? top
      : ((top.results as Record<string, unknown> | undefined)?.fit as
          | Record<string, unknown>
          | undefined);
  if (
    candidate === undefined ||
    (candidate.kind !== "power" && candidate.kind !== "exponential")
  ) {
    throw new SchemaError(
      path,
      null,
      "no fit found (expected {kind, ...} at top level or under results.fit)",
    );
  }
  // `mixlab fit` emits exponent_or_rate; reports embed exponent and rate.
  const kind = candidate.kind;
  let exponent = candidate.exponent;
  let rate = candidate.rate;
  const eor = candidate.exponent_or_rate;
  if (typeof exponent !== "number" && typeof eor === "number") {
    exponent = kind === "power" ? eor : -eor;
  }
  if (typeof rate !== "number" && typeof exponent === "number") {
    rate = -exponent;
  }
  if (typeof exponent !== "number" || typeof candidate.intercept !== "number") {
    throw new SchemaError(path, null, "fit block is missing numeric fields");
  }
  return {
    kind,
    exponent,
    rate: rate as number,
    intercept: candidate.intercept,
    r_squared: (candidate.r_squared as number) ?? NaN,
    t_min: (candidate.t_min as number) ?? NaN,
    t_max: (candidate.t_max as number) ?? NaN,
    n_points: (candidate.n_points as number) ?? 0,
  };
}
