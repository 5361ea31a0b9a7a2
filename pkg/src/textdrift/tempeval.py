"""Temporal evaluation harness.

Enumerates every ordered (train year, test year) pair, scores predictions
with macro-F1, aggregates by temporal gap, and correlates lexical metrics
with performance. Works in two modes: native (fit the built-in classifiers
on each train slice) and file (consume interchange prediction CSVs produced
by any external model).
"""

from __future__ import annotations

import csv
import enum
import itertools
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .classifiers import (
    LinearConfig,
    ModelKind,
    TrainedModel,
    decision_scores,
    fit_tfidf,
    predict,
    train_linear,
    train_mnb,
)
from .corpus import Document, TemporalSplit, splits_label_set
from .errors import (
    CoverageError,
    EmptyDatasetError,
    InsufficientDataError,
    ParseError,
    ShapeError,
    ToolkitWarning,
    UndefinedCorrelationError,
    UnsupportedLabelError,
    ValidationError,
)
from .lexmetrics import ALL_METRICS, LexMetric, MetricValue

PREDICTION_FIELDS = ("train_year", "test_year", "doc_id", "gold", "predicted", "score")
PAIRS_FIELDS = ("train_year", "test_year", "gap", "f_macro", "tp_rate", "fp_rate", "n_test")
GAPS_FIELDS = ("gap", "mean_f_macro", "n_pairs")
CORRELATIONS_FIELDS = ("metric", "r", "p", "n")
HEATMAP_FIELDS = ("train_year", "test_year", "value")

# Exact permutation p-values up to 8 points (8! = 40320); sampled above that.
EXACT_PERMUTATION_LIMIT = 8
DEFAULT_PERMUTATIONS = 10_000


@dataclass(frozen=True)
class PredictionRecord:
    """One prediction for one document under one train/test year pair."""

    train_year: int
    test_year: int
    doc_id: str
    gold: str
    predicted: str
    score: float | None = None


@dataclass(frozen=True)
class PairResult:
    """Evaluation outcome for one ordered (train year, test year) pair.

    TP/FP rates are None when the label set is not binary.
    """

    train_year: int
    test_year: int
    gap: int
    f_macro: float
    tp_rate: float | None
    fp_rate: float | None
    n_test: int

    def __post_init__(self) -> None:
        if self.gap != self.test_year - self.train_year:
            raise ValidationError(
                f"gap {self.gap} does not equal test_year - train_year "
                f"({self.test_year} - {self.train_year})"
            )


@dataclass(frozen=True)
class GapAggregate:
    """Mean macro-F1 over every pair sharing one temporal gap."""

    gap: int
    mean_f_macro: float
    n_pairs: int
    pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class GapRates:
    """TP/FP rates per gap, both as mean-of-pairs and pooled confusion."""

    gap: int
    tp_rate_mean: float
    fp_rate_mean: float
    tp_rate_pooled: float
    fp_rate_pooled: float
    n_pairs: int


@dataclass(frozen=True)
class CorrelationResult:
    metric: str
    r: float
    p_two_tailed: float
    n: int


@dataclass(frozen=True)
class NativeSource:
    """Train the built-in classifiers inside the harness.

    MultinomialNB consumes raw counts by default; pass features="tfidf" to
    feed it the same tf-idf rows the linear models always use.
    """

    kind: ModelKind
    config: LinearConfig = LinearConfig()
    nb_alpha: float = 1.0
    nb_features: str = "counts"

    def __post_init__(self) -> None:
        if self.nb_features not in ("counts", "tfidf"):
            raise ValidationError(f"nb_features must be 'counts' or 'tfidf', got {self.nb_features!r}")


@dataclass(frozen=True)
class FileSource:
    """Consume interchange prediction CSVs; each file is one run."""

    paths: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.paths:
            raise ValidationError("at least one prediction file is required")


@dataclass(frozen=True)
class HarnessResult:
    pairs: tuple[PairResult, ...]
    records: tuple[PredictionRecord, ...]
    label_set: frozenset[str]
    positive_label: str | None


def temporal_gap(train_year: int, test_year: int) -> int:
    """Signed gap: negative tests in the past, positive in the future."""
    return test_year - train_year


def enumerate_pairs(years: Iterable[int]) -> list[tuple[int, int]]:
    """All ordered (train, test) year pairs, grouped by ascending gap."""
    ordered = sorted(set(years))
    if not ordered:
        raise ValidationError("at least one year is required")
    pairs = [(i, j) for i in ordered for j in ordered]
    pairs.sort(key=lambda p: (p[1] - p[0], p[0]))
    return pairs


def macro_f1(golds: Sequence[str], preds: Sequence[str], label_set: Iterable[str]) -> float:
    """Unweighted mean per-class F1 over the full label set.

    Any 0/0 in precision, recall, or F1 is defined as 0. A label absent
    from both golds and predictions still divides the mean and triggers a
    warning, since scoring it is vacuous.
    """
    if len(golds) != len(preds):
        raise ShapeError(f"golds ({len(golds)}) and preds ({len(preds)}) differ in length")
    if not golds:
        raise ValidationError("cannot score an empty prediction set")
    labels = sorted(set(label_set))
    if not labels:
        raise ValidationError("label set is empty")
    known = set(labels)
    stray = sorted((set(golds) | set(preds)) - known)
    if stray:
        raise ValidationError(f"labels outside the label set: {stray}")
    total = 0.0
    for label in labels:
        tp = fp = fn = 0
        for g, p in zip(golds, preds):
            if p == label:
                if g == label:
                    tp += 1
                else:
                    fp += 1
            elif g == label:
                fn += 1
        if tp + fp + fn == 0:
            warnings.warn(
                f"label {label!r} absent from both golds and predictions; F1 counted as 0",
                ToolkitWarning,
                stacklevel=2,
            )
            continue
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        if precision + recall:
            total += 2 * precision * recall / (precision + recall)
    return total / len(labels)


def tp_fp_rates(
    golds: Sequence[str],
    preds: Sequence[str],
    positive_label: str,
    label_set: Iterable[str] | None = None,
) -> tuple[float, float]:
    """TP rate = TP/(TP+FN), FP rate = FP/(FP+TN); any 0/0 is 0."""
    if len(golds) != len(preds):
        raise ShapeError(f"golds ({len(golds)}) and preds ({len(preds)}) differ in length")
    labels = set(label_set) if label_set is not None else set(golds) | set(preds)
    if len(labels) != 2:
        raise UnsupportedLabelError(f"rates need a binary label set, got {sorted(labels)}")
    if positive_label not in labels:
        raise ValidationError(f"positive label {positive_label!r} not in label set {sorted(labels)}")
    tp = fp = fn = tn = 0
    for g, p in zip(golds, preds):
        if g == positive_label:
            if p == positive_label:
                tp += 1
            else:
                fn += 1
        elif p == positive_label:
            fp += 1
        else:
            tn += 1
    tp_rate = tp / (tp + fn) if tp + fn else 0.0
    fp_rate = fp / (fp + tn) if fp + tn else 0.0
    return tp_rate, fp_rate


def performance_change(pairs: Sequence[PairResult]) -> list[GapAggregate]:
    """Group pair results by gap and average macro-F1 within each gap."""
    if not pairs:
        raise ValidationError("no pair results to aggregate")
    by_gap: dict[int, list[PairResult]] = {}
    for pair in pairs:
        by_gap.setdefault(pair.gap, []).append(pair)
    aggregates = []
    for gap in sorted(by_gap):
        members = sorted(by_gap[gap], key=lambda p: (p.train_year, p.test_year))
        mean = math.fsum(p.f_macro for p in members) / len(members)
        aggregates.append(
            GapAggregate(
                gap=gap,
                mean_f_macro=mean,
                n_pairs=len(members),
                pairs=tuple((p.train_year, p.test_year) for p in members),
            )
        )
    return aggregates


def pearson(
    xs: Sequence[float],
    ys: Sequence[float],
    metric: str = "",
    seed: int = 42,
    n_permutations: int = DEFAULT_PERMUTATIONS,
) -> CorrelationResult:
    """Product-moment correlation with a permutation two-tailed p-value.

    Pairs where either coordinate is non-finite are dropped first. With at
    most EXACT_PERMUTATION_LIMIT points the p-value enumerates all n!
    permutations; above that it samples n_permutations shuffles from a
    seeded generator. p = fraction of permutations with |r_perm| >= |r|.
    """
    if len(xs) != len(ys):
        raise ShapeError(f"xs ({len(xs)}) and ys ({len(ys)}) differ in length")
    x_all = np.asarray(xs, dtype=np.float64)
    y_all = np.asarray(ys, dtype=np.float64)
    keep = np.isfinite(x_all) & np.isfinite(y_all)
    x, y = x_all[keep], y_all[keep]
    n = len(x)
    if n < 3:
        raise InsufficientDataError(f"need at least 3 finite pairs, got {n}")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc)) * math.sqrt(float(yc @ yc))
    if denom == 0.0:
        raise UndefinedCorrelationError("zero variance in xs or ys")
    r = float(xc @ yc) / denom
    threshold = abs(r)
    hits = 0
    if n <= EXACT_PERMUTATION_LIMIT:
        total = 0
        for perm in itertools.permutations(range(n)):
            r_perm = float(xc @ yc[list(perm)]) / denom
            if abs(r_perm) >= threshold:
                hits += 1
            total += 1
        p = hits / total
    else:
        rng = np.random.RandomState(seed)
        for _ in range(n_permutations):
            r_perm = float(xc @ yc[rng.permutation(n)]) / denom
            if abs(r_perm) >= threshold:
                hits += 1
        p = hits / n_permutations
    return CorrelationResult(metric=metric, r=r, p_two_tailed=p, n=n)


def _confusion(
    golds: Sequence[str], preds: Sequence[str], positive_label: str
) -> tuple[int, int, int, int]:
    tp = fp = fn = tn = 0
    for g, p in zip(golds, preds):
        if g == positive_label:
            if p == positive_label:
                tp += 1
            else:
                fn += 1
        elif p == positive_label:
            fp += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def rates_per_gap(
    records: Sequence[PredictionRecord],
    positive_label: str,
    label_set: Iterable[str] | None = None,
) -> list[GapRates]:
    """Per-gap TP/FP rates, emitted both ways.

    The mean variant averages per-pair rates; the pooled variant sums the
    confusion counts of every pair in the gap first. Expects one run
    (unique (train_year, test_year, doc_id) triples).
    """
    if not records:
        raise ValidationError("no prediction records")
    labels = set(label_set) if label_set is not None else {r.gold for r in records} | {
        r.predicted for r in records
    }
    if len(labels) != 2:
        raise UnsupportedLabelError(f"rates need a binary label set, got {sorted(labels)}")
    if positive_label not in labels:
        raise ValidationError(f"positive label {positive_label!r} not in label set {sorted(labels)}")
    by_pair: dict[tuple[int, int], list[PredictionRecord]] = {}
    for rec in records:
        by_pair.setdefault((rec.train_year, rec.test_year), []).append(rec)
    by_gap: dict[int, list[tuple[int, int, int, int]]] = {}
    for (i, j), group in sorted(by_pair.items()):
        counts = _confusion([r.gold for r in group], [r.predicted for r in group], positive_label)
        by_gap.setdefault(j - i, []).append(counts)
    out = []
    for gap in sorted(by_gap):
        counts = by_gap[gap]
        tp_rates = [tp / (tp + fn) if tp + fn else 0.0 for tp, fp, fn, tn in counts]
        fp_rates = [fp / (fp + tn) if fp + tn else 0.0 for tp, fp, fn, tn in counts]
        tp, fp, fn, tn = (sum(c[k] for c in counts) for k in range(4))
        out.append(
            GapRates(
                gap=gap,
                tp_rate_mean=math.fsum(tp_rates) / len(counts),
                fp_rate_mean=math.fsum(fp_rates) / len(counts),
                tp_rate_pooled=tp / (tp + fn) if tp + fn else 0.0,
                fp_rate_pooled=fp / (fp + tn) if fp + tn else 0.0,
                n_pairs=len(counts),
            )
        )
    return out


def _validate_splits(splits: Sequence[TemporalSplit]) -> list[TemporalSplit]:
    if not splits:
        raise EmptyDatasetError("no yearly splits supplied")
    ordered = sorted(splits, key=lambda s: s.year)
    years = [s.year for s in ordered]
    if len(set(years)) != len(years):
        raise ValidationError(f"duplicate split years: {years}")
    for split in ordered:
        if not split.train:
            raise EmptyDatasetError(f"year {split.year} has no training documents")
        if not split.test:
            raise EmptyDatasetError(f"year {split.year} has no test documents")
    return ordered


def run_harness(
    splits: Sequence[TemporalSplit],
    model_source: NativeSource | FileSource,
    positive_label: str | None = None,
) -> HarnessResult:
    """Evaluate every ordered train/test year pair.

    Native mode fits one model per train year and predicts every test
    slice; file mode replays interchange predictions, validating coverage.
    With several files, each is one run and f_macro and rates are averaged
    per pair before gap aggregation.
    """
    ordered = _validate_splits(splits)
    label_set = splits_label_set(ordered)
    binary = len(label_set) == 2
    if positive_label is None and binary:
        positive_label = sorted(label_set)[1]
    if positive_label is not None and positive_label not in label_set:
        raise ValidationError(
            f"positive label {positive_label!r} not in label set {sorted(label_set)}"
        )
    if isinstance(model_source, FileSource):
        return _harness_from_files(ordered, model_source, label_set, positive_label)
    if isinstance(model_source, NativeSource):
        return _harness_native(ordered, model_source, label_set, positive_label)
    raise ValidationError(f"unknown model source: {model_source!r}")


def _pair_result(
    i: int,
    j: int,
    golds: Sequence[str],
    preds: Sequence[str],
    label_set: frozenset[str],
    positive_label: str | None,
) -> PairResult:
    f = macro_f1(golds, preds, label_set)
    if len(label_set) == 2 and positive_label is not None:
        tp_rate, fp_rate = tp_fp_rates(golds, preds, positive_label, label_set)
    else:
        tp_rate = fp_rate = None
    return PairResult(
        train_year=i,
        test_year=j,
        gap=j - i,
        f_macro=f,
        tp_rate=tp_rate,
        fp_rate=fp_rate,
        n_test=len(golds),
    )


def _fit_for_split(
    split: TemporalSplit, source: NativeSource
) -> tuple[TrainedModel, "np.ndarray | None", object]:
    vectorizer = fit_tfidf(split.train, year=split.year)
    labels = [d.label for d in split.train]
    if source.kind is ModelKind.MULTINOMIAL_NB:
        if source.nb_features == "counts":
            feats = vectorizer.counts(split.train)
        else:
            feats = vectorizer.transform(split.train)
        model = train_mnb(feats, labels, alpha=source.nb_alpha, train_year=split.year)
    else:
        model = train_linear(
            source.kind,
            vectorizer.transform(split.train),
            labels,
            config=source.config,
            train_year=split.year,
        )
    return model, None, vectorizer


def _harness_native(
    splits: Sequence[TemporalSplit],
    source: NativeSource,
    label_set: frozenset[str],
    positive_label: str | None,
) -> HarnessResult:
    records: list[PredictionRecord] = []
    pairs: list[PairResult] = []
    for train_split in splits:
        model, _, vectorizer = _fit_for_split(train_split, source)
        use_counts = source.kind is ModelKind.MULTINOMIAL_NB and source.nb_features == "counts"
        for test_split in splits:
            docs = test_split.test
            feats = vectorizer.counts(docs) if use_counts else vectorizer.transform(docs)
            preds = predict(model, feats)
            scores = decision_scores(model, feats)
            golds = [d.label for d in docs]
            for doc, pred, score in zip(docs, preds, scores):
                records.append(
                    PredictionRecord(
                        train_year=train_split.year,
                        test_year=test_split.year,
                        doc_id=doc.id,
                        gold=doc.label,
                        predicted=pred,
                        score=float(score),
                    )
                )
            pairs.append(
                _pair_result(train_split.year, test_split.year, golds, preds, label_set, positive_label)
            )
    return HarnessResult(
        pairs=tuple(pairs),
        records=tuple(records),
        label_set=label_set,
        positive_label=positive_label,
    )


def _harness_from_files(
    splits: Sequence[TemporalSplit],
    source: FileSource,
    label_set: frozenset[str],
    positive_label: str | None,
) -> HarnessResult:
    years = {s.year for s in splits}
    gold_by_year = {s.year: {d.id: d.label for d in s.test} for s in splits}
    runs: dict[tuple[int, int], list[list[PredictionRecord]]] = {}
    all_records: list[PredictionRecord] = []
    for path in source.paths:
        file_records = read_predictions(path)
        all_records.extend(file_records)
        grouped: dict[tuple[int, int], list[PredictionRecord]] = {}
        for rec in file_records:
            grouped.setdefault((rec.train_year, rec.test_year), []).append(rec)
        for (i, j), group in sorted(grouped.items()):
            if i not in years or j not in years:
                raise ValidationError(
                    f"{path}: predictions reference year pair ({i}, {j}) outside the dataset"
                )
            golds = gold_by_year[j]
            for rec in group:
                if rec.doc_id not in golds:
                    raise ValidationError(
                        f"{path}: unknown document {rec.doc_id!r} for test year {j}"
                    )
                if rec.gold != golds[rec.doc_id]:
                    raise ValidationError(
                        f"{path}: gold label {rec.gold!r} for document {rec.doc_id!r} "
                        f"does not match the dataset ({golds[rec.doc_id]!r})"
                    )
                if rec.gold not in label_set or rec.predicted not in label_set:
                    raise ValidationError(
                        f"{path}: label outside the dataset label set on document {rec.doc_id!r}"
                    )
            missing = sorted(set(golds) - {r.doc_id for r in group})
            if missing:
                raise CoverageError(
                    f"{path}: pair ({i}, {j}) at gap {j - i} is missing {len(missing)} "
                    f"documents (first missing: {missing[0]!r})"
                )
            runs.setdefault((i, j), []).append(group)
    expected = enumerate_pairs(years)
    uncovered = [p for p in expected if p not in runs]
    if uncovered:
        gaps = sorted({j - i for i, j in uncovered})
        raise CoverageError(
            f"no predictions for {len(uncovered)} pair(s) at gap(s) {gaps}: "
            f"{uncovered[:5]}"
        )
    pairs: list[PairResult] = []
    for (i, j) in sorted(expected):
        per_run = []
        for group in runs[(i, j)]:
            ordered = sorted(group, key=lambda r: r.doc_id)
            golds = [r.gold for r in ordered]
            preds = [r.predicted for r in ordered]
            per_run.append(_pair_result(i, j, golds, preds, label_set, positive_label))
        f = math.fsum(p.f_macro for p in per_run) / len(per_run)
        if all(p.tp_rate is not None for p in per_run):
            tp_rate = math.fsum(p.tp_rate for p in per_run) / len(per_run)
            fp_rate = math.fsum(p.fp_rate for p in per_run) / len(per_run)
        else:
            tp_rate = fp_rate = None
        pairs.append(
            PairResult(
                train_year=i,
                test_year=j,
                gap=j - i,
                f_macro=f,
                tp_rate=tp_rate,
                fp_rate=fp_rate,
                n_test=len(gold_by_year[j]),
            )
        )
    return HarnessResult(
        pairs=tuple(pairs),
        records=tuple(all_records),
        label_set=label_set,
        positive_label=positive_label,
    )


def join_metric_performance(
    metric_values: Sequence[MetricValue], pairs: Sequence[PairResult]
) -> dict[str, tuple[list[float], list[float]]]:
    """Join metric values to pair f_macro on (source, target) = (train, test).

    Returns metric name -> (metric values, f_macro values) in canonical
    metric order; pairs without a metric value are simply absent.
    """
    f_by_pair = {(p.train_year, p.test_year): p.f_macro for p in pairs}
    joined: dict[str, tuple[list[float], list[float]]] = {}
    canonical = [m.value for m in ALL_METRICS]
    names = sorted(
        {mv.metric.value for mv in metric_values},
        key=lambda n: (canonical.index(n) if n in canonical else len(canonical), n),
    )
    ordered = sorted(metric_values, key=lambda mv: (mv.metric.value, mv.source_year, mv.target_year))
    for name in names:
        xs: list[float] = []
        ys: list[float] = []
        for mv in ordered:
            if mv.metric.value != name:
                continue
            key = (mv.source_year, mv.target_year)
            if key in f_by_pair:
                xs.append(mv.value)
                ys.append(f_by_pair[key])
        if xs:
            joined[name] = (xs, ys)
    return joined


def correlate_metrics(
    metric_values: Sequence[MetricValue],
    pairs: Sequence[PairResult],
    seed: int = 42,
    n_permutations: int = DEFAULT_PERMUTATIONS,
) -> list[CorrelationResult]:
    """Pearson correlation of each lexical metric against pair macro-F1."""
    joined = join_metric_performance(metric_values, pairs)
    if not joined:
        raise InsufficientDataError("no metric values align with any evaluated pair")
    return [
        pearson(xs, ys, metric=name, seed=seed, n_permutations=n_permutations)
        for name, (xs, ys) in joined.items()
    ]


def _format_float(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def write_predictions(path: str | Path, records: Iterable[PredictionRecord]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PREDICTION_FIELDS)
        for rec in records:
            writer.writerow(
                [
                    rec.train_year,
                    rec.test_year,
                    rec.doc_id,
                    rec.gold,
                    rec.predicted,
                    _format_float(rec.score),
                ]
            )


def read_predictions(path: str | Path) -> list[PredictionRecord]:
    """Parse an interchange prediction CSV, checking header and uniqueness."""
    records: list[PredictionRecord] = []
    seen: set[tuple[int, int, str]] = set()
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError(f"{path}: empty prediction file")
        if set(reader.fieldnames) != set(PREDICTION_FIELDS) or len(reader.fieldnames) != len(
            PREDICTION_FIELDS
        ):
            raise ParseError(
                f"{path}: header must contain exactly {','.join(PREDICTION_FIELDS)}"
            )
        for row in reader:
            line = reader.line_num
            if row.get(None):
                raise ParseError(f"{path}: too many columns", line=line)
            try:
                train_year = int(row["train_year"])
                test_year = int(row["test_year"])
            except (TypeError, ValueError):
                raise ParseError(f"{path}: years must be integers", line=line) from None
            doc_id = row["doc_id"] or ""
            if not doc_id:
                raise ParseError(f"{path}: empty doc_id", line=line)
            gold, predicted = row["gold"], row["predicted"]
            if not gold or not predicted:
                raise ParseError(f"{path}: empty gold or predicted label", line=line)
            raw_score = row.get("score")
            if raw_score is None or raw_score == "":
                score = None
            else:
                try:
                    score = float(raw_score)
                except ValueError:
                    raise ParseError(f"{path}: score must be a real number", line=line) from None
            key = (train_year, test_year, doc_id)
            if key in seen:
                raise ParseError(
                    f"{path}: duplicate prediction for {key}", line=line
                )
            seen.add(key)
            records.append(
                PredictionRecord(
                    train_year=train_year,
                    test_year=test_year,
                    doc_id=doc_id,
                    gold=gold,
                    predicted=predicted,
                    score=score,
                )
            )
    return records


def write_pairs_csv(path: str | Path, pairs: Sequence[PairResult]) -> None:
    ordered = sorted(pairs, key=lambda p: (p.train_year, p.test_year))
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PAIRS_FIELDS)
        for p in ordered:
            writer.writerow(
                [
                    p.train_year,
                    p.test_year,
                    p.gap,
                    _format_float(p.f_macro),
                    _format_float(p.tp_rate),
                    _format_float(p.fp_rate),
                    p.n_test,
                ]
            )


def read_pairs_csv(path: str | Path) -> list[PairResult]:
    pairs: list[PairResult] = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) != set(PAIRS_FIELDS):
            raise ParseError(f"{path}: header must be {','.join(PAIRS_FIELDS)}")
        for row in reader:
            line = reader.line_num
            try:
                pairs.append(
                    PairResult(
                        train_year=int(row["train_year"]),
                        test_year=int(row["test_year"]),
                        gap=int(row["gap"]),
                        f_macro=float(row["f_macro"]),
                        tp_rate=float(row["tp_rate"]) if row["tp_rate"] else None,
                        fp_rate=float(row["fp_rate"]) if row["fp_rate"] else None,
                        n_test=int(row["n_test"]),
                    )
                )
            except (TypeError, ValueError):
                raise ParseError(f"{path}: malformed pair row", line=line) from None
    return pairs


def write_gaps_csv(path: str | Path, aggregates: Sequence[GapAggregate]) -> None:
    ordered = sorted(aggregates, key=lambda a: a.gap)
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(GAPS_FIELDS)
        for agg in ordered:
            writer.writerow([agg.gap, _format_float(agg.mean_f_macro), agg.n_pairs])


def write_correlations_csv(path: str | Path, results: Sequence[CorrelationResult]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CORRELATIONS_FIELDS)
        for res in results:
            writer.writerow(
                [res.metric, _format_float(res.r), _format_float(res.p_two_tailed), res.n]
            )


def write_heatmap_csv(path: str | Path, pairs: Sequence[PairResult]) -> None:
    ordered = sorted(pairs, key=lambda p: (p.train_year, p.test_year))
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEATMAP_FIELDS)
        for p in ordered:
            writer.writerow([p.train_year, p.test_year, _format_float(p.f_macro)])
