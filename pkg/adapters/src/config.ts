import * as fs from "node:fs";
import * as path from "node:path";

export interface AdapterConfig {
  modelName: string; // representation family tag, recorded for provenance
  maxLen: number; // documents padded / truncated to this many tokens
  learningRate: number;
  maxEpochs: number;
  patience: number; // early-stopping patience on dev loss, in epochs
  seed: number;
  runsPerPair: number; // independent training runs per train year
  embeddingDim: number; // width of the representation layer
  batchSize: number;
}

export const DEFAULT_CONFIG: AdapterConfig = {
  modelName: "emb-flatten-dense",
  maxLen: 128,
  learningRate: 2e-5,
  maxEpochs: 25,
  patience: 3,
  seed: 42,
  runsPerPair: 3,
  embeddingDim: 16,
  batchSize: 32,
};

export function resolveConfig(overrides: Partial<AdapterConfig> = {}): AdapterConfig {
  const config = { ...DEFAULT_CONFIG, ...overrides };
  if (config.maxLen < 1) throw new Error(`maxLen must be positive, got ${config.maxLen}`);
  if (config.maxEpochs < 1) throw new Error(`maxEpochs must be positive, got ${config.maxEpochs}`);
  if (config.patience < 1) throw new Error(`patience must be positive, got ${config.patience}`);
  if (config.runsPerPair < 1) {
    throw new Error(`runsPerPair must be positive, got ${config.runsPerPair}`);
  }
  if (!(config.learningRate > 0)) {
    throw new Error(`learningRate must be positive, got ${config.learningRate}`);
  }
  return config;
}

// Every output directory carries the exact configuration that produced it.
export function writeConfig(outDir: string, config: AdapterConfig): string {
  const file = path.join(outDir, "config.json");
  fs.writeFileSync(file, JSON.stringify(config, Object.keys(config).sort(), 2) + "\n");
  return file;
}
