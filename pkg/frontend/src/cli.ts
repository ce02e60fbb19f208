/** Shared wrapper: schema/usage failures exit 2 with a stderr message. */
export function cliMain(run: (argv: string[]) => void): void {
  try {
    run(process.argv.slice(2));
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    process.exitCode = 2;
  }
}
