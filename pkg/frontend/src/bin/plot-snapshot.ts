#!/usr/bin/env node
import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { cliMain } from "../cli.js";
import { renderSnapshotPng } from "../snapshot.js";

cliMain((argv) => {
  const { values, positionals } = parseArgs({
    args: argv,
    options: { out: { type: "string" } },
    allowPositionals: true,
  });
  if (positionals.length !== 1 || !values.out) {
    throw new Error("usage: plot-snapshot <snap.mlf> --out <fig.png>");
  }
  writeFileSync(values.out, renderSnapshotPng({ mlfPath: positionals[0]! }));
});
