import { readFileSync } from "node:fs";

import { SchemaError } from "./errors.js";

export interface Snapshot {
  n: number;
  /** Row-major, values[i2 * n + i1]; float64 little-endian on disk. */
  values: Float64Array;
}

const MAGIC = "MIXLAB-FIELD v1 n=";

export function readSnapshot(path: string): Snapshot {
  const buf = readFileSync(path);
  const nl = buf.indexOf(0x0a);
  if (nl < 0) {
    throw new SchemaError(path, 1, "missing header line");
  }
  const header = buf.subarray(0, nl).toString("latin1");
  if (!header.startsWith(MAGIC)) {
    throw new SchemaError(path, 1, `bad magic: expected '${MAGIC}<n>', got '${header}'`);
  }
  const n = Number(header.slice(MAGIC.length));
  if (!Number.isInteger(n) || n <= 0) {
    throw new SchemaError(path, 1, `bad grid size in header: '${header}'`);
  }
  const payload = buf.subarray(nl + 1);
  if (payload.length !== n * n * 8) {
    throw new SchemaError(
      path,
      null,
      `payload has ${payload.length} bytes, expected ${n * n * 8} (n=${n})`,
    );
  }
  // Copy to guarantee alignment for the Float64Array view.
  const aligned = new Uint8Array(payload.length);
  aligned.set(payload);
  if (!HOST_LITTLE_ENDIAN) {
    for (let i = 0; i < aligned.length; i += 8) {
      for (let j = 0; j < 4; j++) {
        const tmp = aligned[i + j]!;
        aligned[i + j] = aligned[i + 7 - j]!;
        aligned[i + 7 - j] = tmp;
      }
    }
  }
  return { n, values: new Float64Array(aligned.buffer) };
}

const HOST_LITTLE_ENDIAN = new Uint8Array(new Uint16Array([1]).buffer)[0] === 1;
