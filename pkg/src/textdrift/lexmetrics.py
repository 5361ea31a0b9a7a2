"""Unsupervised lexical-divergence metrics between a source and a target year.

Four metrics quantify how far a test-year vocabulary sits from a
training-year vocabulary without any labels:

* familiarity        |U & V| / |V - U|   (+inf when the target adds nothing)
* jaccard            |U & V| / |U | V|
* tfidf_similarity   cosine of slice-level tf-idf weight vectors
* information_rate   cross-entropy (per token) of the target under an
                     order-1 add-one-smoothed Markov model of the source

Directional metrics take the training side first.
"""

from __future__ import annotations

import csv
import enum
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Document, YearSlice
from .errors import ParseError, UndefinedMetricError, ValidationError
from .vocab import tokenize

BOS = "⟨s⟩"
EOS = "⟨/s⟩"
UNK = "⟨unk⟩"

METRICS_FIELDS = ("metric", "source_year", "target_year", "value")


class LexMetric(enum.Enum):
    FAMILIARITY = "familiarity"
    JACCARD = "jaccard"
    TFIDF_SIMILARITY = "tfidf_similarity"
    INFORMATION_RATE = "information_rate"


ALL_METRICS = tuple(LexMetric)


@dataclass(frozen=True)
class MetricValue:
    metric: LexMetric
    source_year: int
    target_year: int
    value: float


def familiarity(train_terms: set[str], test_terms: Iterable[str]) -> float:
    """Overlap ratio divided by uniqueness ratio.

    +inf when the test vocabulary introduces nothing new; undefined (error)
    when the test vocabulary is empty.
    """
    test_terms = set(test_terms)
    overlap = len(train_terms & test_terms)
    novel = len(test_terms - train_terms)
    if novel == 0:
        if overlap == 0:
            raise UndefinedMetricError("familiarity undefined: empty test vocabulary")
        return math.inf
    return overlap / novel


def jaccard(train_terms: set[str], test_terms: Iterable[str]) -> float:
    """Intersection size over union size."""
    test_terms = set(test_terms)
    union = len(train_terms | test_terms)
    if union == 0:
        raise UndefinedMetricError("jaccard undefined: both vocabularies empty")
    return len(train_terms & test_terms) / union


def _tfidf_weights(docs: Sequence[Document]) -> dict[str, float]:
    """Slice-level tf-idf weights: tf over the whole slice, smoothed log idf."""
    token_lists = [tokenize(d.text) for d in docs]
    total = sum(len(toks) for toks in token_lists)
    if total == 0:
        raise UndefinedMetricError("tfidf undefined: slice has no tokens")
    counts: Counter[str] = Counter()
    df: Counter[str] = Counter()
    for toks in token_lists:
        counts.update(toks)
        df.update(set(toks))
    n_docs = len(docs)
    return {
        term: (count / total) * (math.log((1 + n_docs) / (1 + df[term])) + 1.0)
        for term, count in counts.items()
    }


def tfidf_similarity(source: YearSlice, target: YearSlice) -> float:
    """Cosine similarity between corpus-level tf-idf vectors of two slices."""
    if not source.documents or not target.documents:
        raise UndefinedMetricError("tfidf similarity needs two nonempty slices")
    u = _tfidf_weights(source.documents)
    v = _tfidf_weights(target.documents)
    dot = sum(w * v[t] for t, w in u.items() if t in v)
    norm_u = math.sqrt(sum(w * w for w in u.values()))
    norm_v = math.sqrt(sum(w * w for w in v.values()))
    if norm_u == 0.0 or norm_v == 0.0:
        raise UndefinedMetricError("tfidf similarity undefined: zero weight vector")
    return dot / (norm_u * norm_v)


class MarkovModel:
    """Order-1 token model with add-one smoothing over the source alphabet.

    Documents are padded with sentence boundaries; unknown target tokens map
    to an UNK symbol, so every transition has nonzero probability. The
    outcome alphabet is the source vocabulary plus UNK and the end marker.
    """

    def __init__(self, docs: Sequence[Document]):
        if not docs:
            raise ValidationError("information rate needs a nonempty source slice")
        self.vocabulary: set[str] = set()
        self.pair_counts: Counter[tuple[str, str]] = Counter()
        self.context_counts: Counter[str] = Counter()
        for doc in docs:
            tokens = tokenize(doc.text)
            self.vocabulary.update(tokens)
            seq = [BOS, *tokens, EOS]
            for u, v in zip(seq, seq[1:]):
                self.pair_counts[(u, v)] += 1
                self.context_counts[u] += 1
        self.alphabet_size = len(self.vocabulary) + 2  # + UNK + EOS

    def transition_prob(self, u: str, v: str) -> float:
        return (self.pair_counts[(u, v)] + 1) / (
            self.context_counts[u] + self.alphabet_size
        )

    def cross_entropy(self, docs: Sequence[Document], base: float = 2.0) -> float:
        """Mean negative log-probability per transition of ``docs``."""
        log_base = math.log(base)
        total = 0.0
        transitions = 0
        for doc in docs:
            tokens = [t if t in self.vocabulary else UNK for t in tokenize(doc.text)]
            seq = [BOS, *tokens, EOS]
            for u, v in zip(seq, seq[1:]):
                total += math.log(self.transition_prob(u, v))
                transitions += 1
        if transitions == 0:
            raise UndefinedMetricError("information rate undefined: target has no transitions")
        return -total / (transitions * log_base)


def information_rate(source: YearSlice, target: YearSlice, base: float = 2.0) -> float:
    """Empirical conditional entropy of the target given a source-trained model."""
    if base <= 1.0:
        raise ValidationError("log base must exceed 1")
    model = MarkovModel(source.documents)
    return model.cross_entropy(target.documents, base=base)


def slice_term_set(docs: Sequence[Document]) -> set[str]:
    terms: set[str] = set()
    for doc in docs:
        terms.update(tokenize(doc.text))
    return terms


def compute_metric(
    metric: LexMetric,
    source_year: int,
    target_year: int,
    source_docs: Sequence[Document],
    target_docs: Sequence[Document],
    base: float = 2.0,
) -> MetricValue:
    """One metric for one (source, target) slice pair.

    Set metrics compare the token-type sets; the slice metrics consume the
    documents directly. Undefined metrics propagate as errors for the caller
    to downgrade to warnings.
    """
    if metric is LexMetric.FAMILIARITY:
        value = familiarity(slice_term_set(source_docs), slice_term_set(target_docs))
    elif metric is LexMetric.JACCARD:
        value = jaccard(slice_term_set(source_docs), slice_term_set(target_docs))
    else:
        source_slice = YearSlice(year=source_year, documents=tuple(source_docs))
        target_slice = YearSlice(year=target_year, documents=tuple(target_docs))
        if metric is LexMetric.TFIDF_SIMILARITY:
            value = tfidf_similarity(source_slice, target_slice)
        elif metric is LexMetric.INFORMATION_RATE:
            value = information_rate(source_slice, target_slice, base=base)
        else:
            raise ValidationError(f"unknown metric {metric!r}")
    return MetricValue(
        metric=metric, source_year=source_year, target_year=target_year, value=value
    )


def compute_pair_metrics(
    source_year: int,
    target_year: int,
    source_docs: Sequence[Document],
    target_docs: Sequence[Document],
    metrics: Sequence[LexMetric] = ALL_METRICS,
    base: float = 2.0,
) -> list[MetricValue]:
    """All requested metrics for one (source, target) slice pair."""
    return [
        compute_metric(metric, source_year, target_year, source_docs, target_docs, base=base)
        for metric in metrics
    ]


def write_metrics_csv(path: str | Path, values: Sequence[MetricValue]) -> None:
    """Metric rows in canonical order; +inf and NaN cells print as inf/nan."""
    order = {metric: i for i, metric in enumerate(ALL_METRICS)}
    rows = sorted(values, key=lambda mv: (order[mv.metric], mv.source_year, mv.target_year))
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRICS_FIELDS)
        for mv in rows:
            writer.writerow([mv.metric.value, mv.source_year, mv.target_year, repr(mv.value)])


def read_metrics_csv(path: str | Path) -> list[MetricValue]:
    values: list[MetricValue] = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) != set(METRICS_FIELDS):
            raise ParseError(f"{path}: header must be {','.join(METRICS_FIELDS)}")
        for row in reader:
            line = reader.line_num
            try:
                metric = LexMetric(row["metric"])
            except ValueError:
                raise ParseError(f"{path}: unknown metric {row['metric']!r}", line=line) from None
            try:
                values.append(
                    MetricValue(
                        metric=metric,
                        source_year=int(row["source_year"]),
                        target_year=int(row["target_year"]),
                        value=float(row["value"]),
                    )
                )
            except (TypeError, ValueError):
                raise ParseError(f"{path}: malformed metric row", line=line) from None
    return values
