#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { cliMain } from "../cli.js";
import { renderFraction } from "../fraction.js";

cliMain((argv) => {
  const { values, positionals } = parseArgs({
    args: argv,
    options: {
      out: { type: "string" },
      title: { type: "string", default: "anomalous dissipation" },
    },
    allowPositionals: true,
  });
  if (positionals.length !== 1 || !values.out) {
    throw new Error("usage: plot-fraction <report.json> --out <fig.svg> [--title ...]");
  }
  const svg = renderFraction({ reportPath: positionals[0]!, title: values.title! });
  writeFileSync(values.out, svg);
});
