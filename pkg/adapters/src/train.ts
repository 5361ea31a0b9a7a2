import * as fs from "node:fs";
import * as path from "node:path";
import * as tf from "@tensorflow/tfjs";

import { AdapterConfig, resolveConfig, writeConfig } from "./config.js";
import { PredictionRow, SplitDocument, YearSplit, readSplitDir, writePredictionsCsv } from "./interchange.js";

const PAD = 0;
const OOV = 1;

export function tokenize(text: string): string[] {
  return text.toLowerCase().split(/\s+/).filter((t) => t.length > 0);
}

export interface Vocabulary {
  index: Map<string, number>;
  size: number; // including PAD and OOV slots
}

export function buildVocabulary(docs: SplitDocument[]): Vocabulary {
  const terms = new Set<string>();
  for (const doc of docs) {
    for (const token of tokenize(doc.text)) terms.add(token);
  }
  const index = new Map<string, number>();
  let next = OOV + 1;
  for (const term of [...terms].sort()) {
    index.set(term, next);
    next += 1;
  }
  return { index, size: next };
}

export function encode(text: string, vocab: Vocabulary, maxLen: number): number[] {
  const ids = tokenize(text).map((t) => vocab.index.get(t) ?? OOV);
  if (ids.length > maxLen) return ids.slice(0, maxLen);
  while (ids.length < maxLen) ids.push(PAD);
  return ids;
}

function tensorize(
  docs: SplitDocument[],
  vocab: Vocabulary,
  labelIndex: Map<string, number>,
  maxLen: number
): { x: tf.Tensor2D; y: tf.Tensor1D } {
  const x = tf.tensor2d(docs.map((d) => encode(d.text, vocab, maxLen)), undefined, "int32");
  // the sparse crossentropy kernel wants float32 class indices
  const y = tf.tensor1d(docs.map((d) => labelIndex.get(d.label) ?? -1), "float32");
  return { x, y };
}

function buildModel(vocabSize: number, numLabels: number, config: AdapterConfig, seed: number) {
  // representation layer -> flatten -> output probabilities
  const model = tf.sequential();
  model.add(
    tf.layers.embedding({
      inputDim: vocabSize,
      outputDim: config.embeddingDim,
      inputLength: config.maxLen,
      embeddingsInitializer: tf.initializers.glorotUniform({ seed }),
    })
  );
  model.add(tf.layers.flatten());
  model.add(
    tf.layers.dense({
      units: numLabels,
      activation: "softmax",
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
      biasInitializer: "zeros",
    })
  );
  model.compile({
    optimizer: tf.train.adam(config.learningRate),
    loss: "sparseCategoricalCrossentropy",
  });
  return model;
}

async function devLoss(model: tf.Sequential, x: tf.Tensor2D, y: tf.Tensor1D): Promise<number> {
  const out = model.evaluate(x, y, { batchSize: x.shape[0] }) as tf.Scalar;
  const value = (await out.data())[0];
  out.dispose();
  return value;
}

// Fine-tune on one train year with early stopping on its dev loss, then
// restore the best weights seen.
async function fitWithEarlyStopping(
  model: tf.Sequential,
  train: { x: tf.Tensor2D; y: tf.Tensor1D },
  dev: { x: tf.Tensor2D; y: tf.Tensor1D },
  config: AdapterConfig
): Promise<void> {
  let best = Number.POSITIVE_INFINITY;
  let bestWeights: tf.Tensor[] | null = null;
  let badEpochs = 0;
  for (let epoch = 0; epoch < config.maxEpochs; epoch++) {
    await model.fit(train.x, train.y, {
      epochs: 1,
      batchSize: config.batchSize,
      shuffle: false,
      verbose: 0,
    });
    const loss = await devLoss(model, dev.x, dev.y);
    if (loss < best) {
      best = loss;
      if (bestWeights) bestWeights.forEach((w) => w.dispose());
      bestWeights = model.getWeights().map((w) => w.clone());
      badEpochs = 0;
    } else {
      badEpochs += 1;
      if (badEpochs >= config.patience) break;
    }
  }
  if (bestWeights) {
    model.setWeights(bestWeights);
    bestWeights.forEach((w) => w.dispose());
  }
}

export interface TrainOutput {
  files: string[];
  configFile: string;
}

// Train one classifier per (run, train year) and predict every test year,
// emitting one interchange CSV per run per (train year, test year) pair.
export async function trainAndPredict(
  splitDir: string,
  outDir: string,
  overrides: Partial<AdapterConfig> = {}
): Promise<TrainOutput> {
  const config = resolveConfig(overrides);
  const splits = readSplitDir(splitDir);
  for (const split of splits) {
    if (split.dev.length === 0) {
      throw new Error(`dev split for year ${split.year} is empty; early stopping impossible`);
    }
    if (split.train.length === 0) {
      throw new Error(`train split for year ${split.year} is empty`);
    }
  }
  fs.mkdirSync(outDir, { recursive: true });

  const labels = [...new Set(splits.flatMap((s) => [...s.train, ...s.dev, ...s.test].map((d) => d.label)))].sort();
  if (labels.length < 2) {
    throw new Error(`need at least two labels, found ${JSON.stringify(labels)}`);
  }
  const labelIndex = new Map(labels.map((label, k) => [label, k]));

  const files: string[] = [];
  for (let run = 0; run < config.runsPerPair; run++) {
    for (const trainSplit of splits) {
      const vocab = buildVocabulary(trainSplit.train);
      const train = tensorize(trainSplit.train, vocab, labelIndex, config.maxLen);
      const dev = tensorize(trainSplit.dev, vocab, labelIndex, config.maxLen);
      const model = buildModel(vocab.size, labels.length, config, config.seed + run);
      await fitWithEarlyStopping(model, train, dev, config);

      for (const testSplit of splits) {
        const x = tf.tensor2d(
          testSplit.test.map((d) => encode(d.text, vocab, config.maxLen)),
          undefined,
          "int32"
        );
        const probs = model.predict(x) as tf.Tensor2D;
        const matrix = (await probs.array()) as number[][];
        x.dispose();
        probs.dispose();

        const rows: PredictionRow[] = testSplit.test.map((doc, k) => {
          const dist = matrix[k];
          let argmax = 0;
          for (let c = 1; c < dist.length; c++) {
            if (dist[c] > dist[argmax]) argmax = c;
          }
          return {
            trainYear: trainSplit.year,
            testYear: testSplit.year,
            docId: doc.id,
            gold: doc.label,
            predicted: labels[argmax],
            score: dist[argmax],
          };
        });
        const file = path.join(outDir, `run${run}_pair_${trainSplit.year}_${testSplit.year}.csv`);
        writePredictionsCsv(file, rows);
        files.push(file);
      }

      train.x.dispose();
      train.y.dispose();
      dev.x.dispose();
      dev.y.dispose();
      model.dispose();
    }
  }
  const configFile = writeConfig(outDir, config);
  return { files, configFile };
}
