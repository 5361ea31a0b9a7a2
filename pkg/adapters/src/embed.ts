import * as fs from "node:fs";
import * as path from "node:path";
import * as tf from "@tensorflow/tfjs";

import { AdapterConfig, resolveConfig, writeConfig } from "./config.js";
import { writeEmbeddingTable, writeManifest } from "./interchange.js";
import { tokenize } from "./train.js";

const PAD = 0;
const MASK = 1;

export interface EmbedOptions extends Partial<AdapterConfig> {
  // Sentences drawn per year. Defaults to the smallest year so every
  // yearly model sees the same amount of text.
  sentencesPerYear?: number;
}

export interface YearCorpus {
  year: number;
  sentences: string[][];
}

export function readYearCorpora(corporaDir: string): YearCorpus[] {
  const corpora: YearCorpus[] = [];
  for (const entry of fs.readdirSync(corporaDir).sort()) {
    const match = /^(\d+)\.txt$/.exec(entry);
    if (!match) continue;
    const lines = fs
      .readFileSync(path.join(corporaDir, entry), "utf8")
      .split("\n")
      .map((line) => line.trim())
      .filter((line) => line.length > 0);
    corpora.push({ year: Number(match[1]), sentences: lines.map(tokenize) });
  }
  if (corpora.length === 0) {
    throw new Error(`no <year>.txt corpora found in ${corporaDir}`);
  }
  corpora.sort((a, b) => a.year - b.year);
  return corpora;
}

function buildYearVocabulary(sentences: string[][]): Map<string, number> {
  const terms = new Set<string>();
  for (const sentence of sentences) {
    for (const token of sentence) terms.add(token);
  }
  const index = new Map<string, number>();
  let next = MASK + 1;
  for (const term of [...terms].sort()) {
    index.set(term, next);
    next += 1;
  }
  return index;
}

// One masked-token sample per position: the sentence with that position
// replaced by MASK, the original id as target.
function maskedSamples(
  sentences: string[][],
  vocab: Map<string, number>,
  maxLen: number
): { inputs: number[][]; targets: number[] } {
  const inputs: number[][] = [];
  const targets: number[] = [];
  for (const sentence of sentences) {
    const ids = sentence.slice(0, maxLen).map((t) => vocab.get(t) ?? MASK);
    for (let p = 0; p < ids.length; p++) {
      const context = ids.slice();
      context[p] = MASK;
      while (context.length < maxLen) context.push(PAD);
      inputs.push(context);
      targets.push(ids[p]);
    }
  }
  return { inputs, targets };
}

async function trainYearEmbedding(
  sentences: string[][],
  vocab: Map<string, number>,
  config: AdapterConfig
): Promise<number[][]> {
  const vocabSize = vocab.size + 2;
  const { inputs, targets } = maskedSamples(sentences, vocab, config.maxLen);
  if (inputs.length === 0) {
    throw new Error("year corpus has no tokens to train on");
  }
  const model = tf.sequential();
  model.add(
    tf.layers.embedding({
      inputDim: vocabSize,
      outputDim: config.embeddingDim,
      inputLength: config.maxLen,
      embeddingsInitializer: tf.initializers.glorotUniform({ seed: config.seed }),
    })
  );
  model.add(tf.layers.globalAveragePooling1d({}));
  model.add(
    tf.layers.dense({
      units: vocabSize,
      activation: "softmax",
      kernelInitializer: tf.initializers.glorotUniform({ seed: config.seed + 1 }),
      biasInitializer: "zeros",
    })
  );
  model.compile({
    optimizer: tf.train.adam(config.learningRate),
    loss: "sparseCategoricalCrossentropy",
  });

  const x = tf.tensor2d(inputs, undefined, "int32");
  const y = tf.tensor1d(targets, "float32");
  await model.fit(x, y, {
    epochs: config.maxEpochs,
    batchSize: config.batchSize,
    shuffle: false,
    verbose: 0,
  });
  x.dispose();
  y.dispose();

  const table = (await (model.getWeights()[0] as tf.Tensor2D).array()) as number[][];
  model.dispose();
  return table;
}

function occurrenceSpans(sentence: number[], aspectIds: number[]): number {
  let count = 0;
  for (let start = 0; start + aspectIds.length <= sentence.length; start++) {
    let hit = true;
    for (let k = 0; k < aspectIds.length; k++) {
      if (sentence[start + k] !== aspectIds[k]) {
        hit = false;
        break;
      }
    }
    if (hit) count += 1;
  }
  return count;
}

// Mean over occurrences of the mean-pooled token rows for the aspect span.
// The rows are context-free, so every occurrence pools to the same span
// mean; occurrences still gate presence: zero occurrences means the aspect
// is absent from that year's table.
function aspectVector(
  aspect: string,
  sentences: number[][],
  vocab: Map<string, number>,
  table: number[][]
): number[] | null {
  const tokens = tokenize(aspect);
  const ids = tokens.map((t) => vocab.get(t));
  if (ids.some((id) => id === undefined)) return null;
  const aspectIds = ids as number[];
  let occurrences = 0;
  for (const sentence of sentences) {
    occurrences += occurrenceSpans(sentence, aspectIds);
  }
  if (occurrences === 0) return null;
  const dim = table[0].length;
  const vector = new Array<number>(dim).fill(0);
  for (const id of aspectIds) {
    for (let d = 0; d < dim; d++) vector[d] += table[id][d];
  }
  return vector.map((v) => v / aspectIds.length);
}

export interface EmbedOutput {
  tableFiles: Map<number, string>;
  manifestFile: string;
  configFile: string;
}

// Train one small masked-token model per year and export per-year aspect
// vector tables plus a manifest, in the evaluator's embedding interchange
// format.
export async function embedAspects(
  corporaDir: string,
  aspects: string[],
  outDir: string,
  options: EmbedOptions = {}
): Promise<EmbedOutput> {
  if (aspects.length === 0) {
    throw new Error("no aspects given");
  }
  const { sentencesPerYear, ...overrides } = options;
  const config = resolveConfig(overrides);
  const corpora = readYearCorpora(corporaDir);

  const budget = sentencesPerYear ?? Math.min(...corpora.map((c) => c.sentences.length));
  if (budget <= 0) {
    throw new Error(`sentences per year must be positive, got ${budget}`);
  }
  fs.mkdirSync(outDir, { recursive: true });

  const tableFiles = new Map<number, string>();
  for (const corpus of corpora) {
    const sentences = corpus.sentences.slice(0, budget);
    const vocab = buildYearVocabulary(sentences);
    const table = await trainYearEmbedding(sentences, vocab, config);
    const idSentences = sentences.map((s) => s.map((t) => vocab.get(t) as number));

    const vectors = new Map<string, number[]>();
    for (const aspect of aspects) {
      const vector = aspectVector(aspect, idSentences, vocab, table);
      if (vector !== null) vectors.set(aspect, vector);
    }
    const file = path.join(outDir, `${corpus.year}.jsonl`);
    writeEmbeddingTable(file, vectors);
    tableFiles.set(corpus.year, file);
  }

  const manifestFile = writeManifest(path.join(outDir, "manifest.json"), config.embeddingDim, tableFiles);
  const configFile = writeConfig(outDir, config);
  return { tableFiles, manifestFile, configFile };
}
