import { readFileSync } from "node:fs";

import { SchemaError } from "./errors.js";

export interface Table {
  path: string;
  header: string[];
  rows: string[][];
}

/** Strict reader for the simple comma-separated files mixlab writes:
 * one header line, no quoting, no embedded commas. */
export function readCsv(path: string): Table {
  const text = readFileSync(path, "utf8");
  const lines = text.split("\n");
  if (lines.length === 0 || lines[0]!.trim() === "") {
    throw new SchemaError(path, 1, "empty CSV (missing header)");
  }
  const header = lines[0]!.split(",").map((s) => s.trim());
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i]!;
    if (line === "" && i === lines.length - 1) continue; // trailing newline
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(
        path,
        i + 1,
        `expected ${header.length} columns (${header.join(",")}), got ${cells.length}`,
      );
    }
    rows.push(cells);
  }
  if (rows.length === 0) {
    throw new SchemaError(path, 2, "CSV has a header but no data rows");
  }
  return { path, header, rows };
}

/** Extract one column as finite floats, with file/line on any bad cell. */
export function numericColumn(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(
      table.path,
      1,
      `no column '${name}' (have: ${table.header.join(", ")})`,
    );
  }
  return table.rows.map((cells, i) => {
    const v = Number(cells[idx]);
    if (!Number.isFinite(v) && cells[idx] !== "inf" && cells[idx] !== "Infinity") {
      throw new SchemaError(
        table.path,
        i + 2,
        `column '${name}': '${cells[idx]}' is not a number`,
      );
    }
    return cells[idx] === "inf" ? Infinity : v;
  });
}

/** A text column (e.g. worst_probe). */
export function textColumn(table: Table, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(
      table.path,
      1,
      `no column '${name}' (have: ${table.header.join(", ")})`,
    );
  }
  return table.rows.map((cells) => cells[idx]!);
}
