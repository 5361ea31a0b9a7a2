"""Temporal persistence toolkit for text classifiers.

Quantifies how classifier performance decays as the time gap between
training and test data grows, profiles vocabulary lifetimes, computes
label-free lexical-divergence metrics that predict that decay, and ranks
multi-word aspects by the drift of their per-year embeddings.
"""

__version__ = "0.1.0"

from .classifiers import (
    LinearConfig,
    ModelKind,
    TfidfVectorizer,
    TrainedModel,
    decision_scores,
    fit_tfidf,
    load_model,
    log_loss_and_grad,
    predict,
    predict_proba,
    save_model,
    train_linear,
    train_mnb,
)
from .corpus import (
    DEFAULT_FRACTIONS,
    Document,
    TemporalDataset,
    TemporalSplit,
    YearSlice,
    dataset_from_documents,
    export_split,
    ingest,
    load_splits,
    read_documents,
    rebalance,
    stratified_split,
    write_documents,
)
from .drift import (
    DEFAULT_PATTERNS,
    DEFAULT_TAGSET,
    Aspect,
    AspectLexicon,
    DriftRank,
    EmbeddingTable,
    PosPattern,
    SimilaritySeries,
    TaggedToken,
    aspect_drift_classes,
    aspect_lifetimes,
    cosine,
    extract_aspects,
    extract_aspects_by_year,
    load_lexicon,
    load_patterns,
    load_tables,
    load_tagged_dir,
    make_table,
    population_variance,
    read_embedding_table,
    similarity_series,
    variance_rank,
    write_embedding_table,
    write_manifest,
)
from .errors import ToolkitWarning, ValidationError
from .lexmetrics import (
    ALL_METRICS,
    LexMetric,
    MetricValue,
    compute_metric,
    compute_pair_metrics,
    familiarity,
    information_rate,
    jaccard,
    read_metrics_csv,
    tfidf_similarity,
    write_metrics_csv,
)
from .tempeval import (
    CorrelationResult,
    FileSource,
    GapAggregate,
    HarnessResult,
    NativeSource,
    PairResult,
    PredictionRecord,
    correlate_metrics,
    enumerate_pairs,
    macro_f1,
    pearson,
    performance_change,
    read_pairs_csv,
    read_predictions,
    run_harness,
    temporal_gap,
    tp_fp_rates,
    write_predictions,
)
from .vocab import (
    LifetimeClass,
    TaxonomyReport,
    VocabularyProfile,
    build_profile,
    classify_lifetimes,
    tokenize,
)

__all__ = [
    "__version__",
    # corpus
    "Document", "YearSlice", "TemporalDataset", "TemporalSplit", "DEFAULT_FRACTIONS",
    "ingest", "read_documents", "dataset_from_documents", "rebalance",
    "stratified_split", "export_split", "load_splits", "write_documents",
    # vocab
    "tokenize", "VocabularyProfile", "build_profile", "LifetimeClass",
    "TaxonomyReport", "classify_lifetimes",
    # lexmetrics
    "LexMetric", "ALL_METRICS", "MetricValue", "familiarity", "jaccard",
    "tfidf_similarity", "information_rate", "compute_metric",
    "compute_pair_metrics", "read_metrics_csv", "write_metrics_csv",
    # classifiers
    "ModelKind", "LinearConfig", "TfidfVectorizer", "TrainedModel", "fit_tfidf",
    "train_mnb", "train_linear", "predict", "predict_proba", "decision_scores",
    "log_loss_and_grad", "save_model", "load_model",
    # tempeval
    "PredictionRecord", "PairResult", "GapAggregate", "CorrelationResult",
    "NativeSource", "FileSource", "HarnessResult", "temporal_gap",
    "enumerate_pairs", "macro_f1", "tp_fp_rates", "performance_change",
    "pearson", "run_harness", "correlate_metrics", "read_predictions",
    "write_predictions", "read_pairs_csv",
    # drift
    "TaggedToken", "AspectLexicon", "PosPattern", "Aspect", "EmbeddingTable",
    "SimilaritySeries", "DriftRank", "DEFAULT_PATTERNS", "DEFAULT_TAGSET",
    "load_lexicon", "load_patterns", "load_tagged_dir", "extract_aspects",
    "extract_aspects_by_year", "aspect_lifetimes", "aspect_drift_classes",
    "cosine", "make_table", "read_embedding_table", "write_embedding_table",
    "write_manifest", "load_tables", "similarity_series", "population_variance",
    "variance_rank",
    # errors
    "ValidationError", "ToolkitWarning",
]
