export { AdapterConfig, DEFAULT_CONFIG, resolveConfig, writeConfig } from "./config.js";
export {
  PredictionRow,
  SplitDocument,
  YearSplit,
  parseDocumentsCsv,
  readSplitDir,
  writeEmbeddingTable,
  writeManifest,
  writePredictionsCsv,
} from "./interchange.js";
export { buildVocabulary, encode, tokenize, trainAndPredict } from "./train.js";
export { embedAspects, readYearCorpora } from "./embed.js";
