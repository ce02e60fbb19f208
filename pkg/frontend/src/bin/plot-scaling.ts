#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { cliMain } from "../cli.js";
import { renderScaling } from "../scaling.js";

cliMain((argv) => {
  const { values, positionals } = parseArgs({
    args: argv,
    options: {
      out: { type: "string" },
      title: { type: "string", default: "dissipation-time scaling" },
    },
    allowPositionals: true,
  });
  if (positionals.length !== 1 || !values.out) {
    throw new Error("usage: plot-scaling <tdis.csv> --out <fig.svg> [--title ...]");
  }
  const svg = renderScaling({ csvPath: positionals[0]!, title: values.title! });
  writeFileSync(values.out, svg);
});
