import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

export function tmpDir(prefix: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), prefix));
}

// Two-year binary corpus, separable by the leading token. Fields stay free
// of commas and quotes so a plain join is valid CSV.
export function writeToyCorpus(file: string, years: number[] = [2015, 2016], perLabel = 50): void {
  const lines = ["id,text,label,year"];
  let id = 0;
  for (const year of years) {
    for (let k = 0; k < perLabel; k++) {
      lines.push(`d${id},alpha y${year} tok${k % 5} filler${k % 3},A,${year}`);
      id += 1;
      lines.push(`d${id},beta y${year} tok${k % 5} filler${k % 3},B,${year}`);
      id += 1;
    }
  }
  fs.writeFileSync(file, lines.join("\n") + "\n");
}

export interface CliResult {
  status: number;
  stdout: string;
  stderr: string;
}

// The evaluator CLI ships with the Python package and is on PATH.
export function runCli(args: string[]): CliResult {
  try {
    const stdout = execFileSync("textdrift", args, { encoding: "utf8" });
    return { status: 0, stdout, stderr: "" };
  } catch (err) {
    const e = err as { status?: number; stdout?: string; stderr?: string };
    return { status: e.status ?? -1, stdout: e.stdout ?? "", stderr: e.stderr ?? "" };
  }
}

export function splitCorpus(corpusFile: string, outDir: string): void {
  const result = runCli(["split", "--input", corpusFile, "--out-dir", outDir]);
  if (result.status !== 0) {
    throw new Error(`split failed (${result.status}): ${result.stderr}`);
  }
}

export function countCsvRows(file: string): number {
  const lines = fs.readFileSync(file, "utf8").split("\n").filter((l) => l.length > 0);
  return lines.length - 1; // minus header
}

export function dirBytes(dir: string): Map<string, string> {
  const out = new Map<string, string>();
  const walk = (sub: string) => {
    for (const entry of fs.readdirSync(sub, { withFileTypes: true }).sort()) {
      const full = path.join(sub, entry.name);
      if (entry.isDirectory()) walk(full);
      else out.set(path.relative(dir, full), fs.readFileSync(full, "utf8"));
    }
  };
  walk(dir);
  return out;
}
