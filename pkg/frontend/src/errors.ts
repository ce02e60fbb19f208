/** Schema violations carry the offending file (and line, where known). */
export class SchemaError extends Error {
  constructor(file: string, line: number | null, detail: string) {
    super(line === null ? `${file}: ${detail}` : `${file}:${line}: ${detail}`);
    this.name = "SchemaError";
  }
}
