#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { cliMain } from "../cli.js";
import { renderDecay } from "../decay.js";

cliMain((argv) => {
  const { values, positionals } = parseArgs({
    args: argv,
    options: {
      out: { type: "string" },
      report: { type: "string" },
      column: { type: "string", default: "h_minus_1" },
      title: { type: "string", default: "mix-norm decay" },
    },
    allowPositionals: true,
  });
  if (positionals.length !== 1 || !values.out || !values.report) {
    throw new Error(
      "usage: plot-decay <trajectory.csv> --report <report.json> --out <fig.svg> " +
        "[--column h_minus_1] [--title ...]",
    );
  }
  const svg = renderDecay({
    csvPath: positionals[0]!,
    reportPath: values.report,
    column: values.column!,
    title: values.title!,
  });
  writeFileSync(values.out, svg);
});
