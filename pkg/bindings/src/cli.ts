/** Locating and running the seldkit CLI, the only interface to the library. */

import { execFile } from "node:child_process";
import { promisify } from "node:util";

const execFileAsync = promisify(execFile);

export interface CliCommand {
  cmd: string;
  baseArgs: string[];
}

/**
 * The CLI entry point: SELDKIT_CLI (split on whitespace) when set, otherwise
 * the installed `seldkit` script with `python3 -m seldkit` as fallback.
 */
export function resolveCli(): CliCommand {
  const env = process.env.SELDKIT_CLI;
  if (env && env.trim()) {
    const parts = env.trim().split(/\s+/);
    return { cmd: parts[0], baseArgs: parts.slice(1) };
  }
  return { cmd: "seldkit", baseArgs: [] };
}

/** Run a subcommand; resolves with stdout, rejects with stderr detail. */
export async function runCli(args: string[]): Promise<string> {
  const { cmd, baseArgs } = resolveCli();
  try {
    const { stdout } = await execFileAsync(cmd, [...baseArgs, ...args], {
      maxBuffer: 64 * 1024 * 1024,
    });
    return stdout;
  } catch (err: unknown) {
    const e = err as NodeJS.ErrnoException & { stderr?: string };
    if (e.code === "ENOENT" && !process.env.SELDKIT_CLI) {
      const { stdout } = await execFileAsync(
        "python3",
        ["-m", "seldkit", ...args],
        { maxBuffer: 64 * 1024 * 1024 },
      );
      return stdout;
    }
    const detail = e.stderr ? `: ${e.stderr.trim()}` : "";
    throw new Error(`seldkit ${args[0]} failed${detail}`);
  }
}
