import * as fs from "node:fs";
import * as path from "node:path";
import Papa from "papaparse";

// File contracts shared with the core toolkit. The adapter only ever
// talks to the core through these files.

export interface SplitDocument {
  id: string;
  text: string;
  label: string;
  year: number;
}

export interface YearSplit {
  year: number;
  train: SplitDocument[];
  dev: SplitDocument[];
  test: SplitDocument[];
}

export interface PredictionRow {
  trainYear: number;
  testYear: number;
  docId: string;
  gold: string;
  predicted: string;
  score: number | null;
}

const SPLIT_PARTS = ["train", "dev", "test"] as const;
const DOCUMENT_FIELDS = ["id", "text", "label", "year"];
const PREDICTION_FIELDS = ["train_year", "test_year", "doc_id", "gold", "predicted", "score"];

export function parseDocumentsCsv(file: string): SplitDocument[] {
  const raw = fs.readFileSync(file, "utf-8");
  const parsed = Papa.parse<Record<string, string>>(raw.replace(/\n$/, ""), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`${file}: ${first.message} (row ${first.row})`);
  }
  const fields = parsed.meta.fields ?? [];
  if (fields.join(",") !== DOCUMENT_FIELDS.join(",")) {
    throw new Error(`${file}: header must be ${DOCUMENT_FIELDS.join(",")}, got ${fields.join(",")}`);
  }
  return parsed.data.map((row, index) => {
    const year = Number(row.year);
    if (!Number.isInteger(year)) {
      throw new Error(`${file}: row ${index + 2}: year ${JSON.stringify(row.year)} is not an integer`);
    }
    if (!row.id || !row.label) {
      throw new Error(`${file}: row ${index + 2}: id and label must be nonempty`);
    }
    return { id: row.id, text: row.text ?? "", label: row.label, year };
  });
}

// Read a directory of <year>.train / <year>.dev / <year>.test files.
// Every year must have all three parts: training needs train, early
// stopping needs dev, prediction needs test.
export function readSplitDir(splitDir: string): YearSplit[] {
  const byYear = new Map<number, Partial<Record<(typeof SPLIT_PARTS)[number], SplitDocument[]>>>();
  for (const name of fs.readdirSync(splitDir).sort()) {
    const match = /^(\d+)\.(train|dev|test)$/.exec(name);
    if (!match) continue;
    const year = Number(match[1]);
    const part = match[2] as (typeof SPLIT_PARTS)[number];
    const docs = parseDocumentsCsv(path.join(splitDir, name));
    for (const doc of docs) {
      if (doc.year !== year) {
        throw new Error(`${name}: document ${doc.id} has year ${doc.year}`);
      }
    }
    const entry = byYear.get(year) ?? {};
    entry[part] = docs;
    byYear.set(year, entry);
  }
  if (byYear.size === 0) {
    throw new Error(`${splitDir}: no <year>.train/.dev/.test files found`);
  }
  const splits: YearSplit[] = [];
  for (const year of [...byYear.keys()].sort((a, b) => a - b)) {
    const entry = byYear.get(year)!;
    for (const part of SPLIT_PARTS) {
      if (entry[part] === undefined) {
        throw new Error(`missing ${year}.${part} in ${splitDir}`);
      }
    }
    splits.push({ year, train: entry.train!, dev: entry.dev!, test: entry.test! });
  }
  return splits;
}

export function writePredictionsCsv(file: string, rows: PredictionRow[]): void {
  const data = rows.map((row) => [
    String(row.trainYear),
    String(row.testYear),
    row.docId,
    row.gold,
    row.predicted,
    row.score === null ? "" : String(row.score),
  ]);
  const body = Papa.unparse({ fields: PREDICTION_FIELDS, data }, { newline: "\n" });
  fs.writeFileSync(file, body + "\n");
}

// Embedding interchange: one JSON object per line, vectors of one common
// dimension, plus a manifest mapping year -> relative table path.
export function writeEmbeddingTable(file: string, vectors: Map<string, number[]>): void {
  const aspects = [...vectors.keys()].sort();
  const lines = aspects.map((aspect) =>
    JSON.stringify({ aspect, vector: vectors.get(aspect)! })
  );
  fs.writeFileSync(file, lines.join("\n") + (lines.length > 0 ? "\n" : ""));
}

// Table paths are stored relative to the manifest file itself.
export function writeManifest(
  file: string,
  dimension: number,
  tables: Map<number, string>
): string {
  const base = path.dirname(file);
  const entries: Record<string, string> = {};
  for (const year of [...tables.keys()].sort((a, b) => a - b)) {
    entries[String(year)] = path.relative(base, tables.get(year)!);
  }
  fs.writeFileSync(file, JSON.stringify({ dimension, tables: entries }, null, 2) + "\n");
  return file;
}
