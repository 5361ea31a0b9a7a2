"""Command-line entry point.

Subcommands mirror the analysis pipeline: split -> vocab-report /
lexmetrics -> evaluate -> correlate, plus drift for aspect ranking. Every
subcommand writes its outputs plus a machine-readable warnings.json into
--out-dir, prints a one-line summary, and exits 0 on success, 1 on I/O
failure, 2 on validation failure. Reruns with identical inputs and seed
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from pathlib import Path
from typing import Sequence

from . import __version__
from .classifiers import LinearConfig, ModelKind
from .corpus import (
    DEFAULT_FRACTIONS,
    FORMATS,
    SPLIT_PARTS,
    YearSlice,
    export_split,
    ingest,
    load_splits,
    rebalance,
    stratified_split,
)
from .drift import (
    DEFAULT_PATTERNS,
    aspect_drift_classes,
    extract_aspects_by_year,
    load_lexicon,
    load_patterns,
    load_tables,
    load_tagged_dir,
    similarity_series,
    variance_rank,
    write_drift_rank_csv,
    write_series_csv,
)
from .errors import ToolkitWarning, UndefinedMetricError, ValidationError
from .lexmetrics import (
    ALL_METRICS,
    LexMetric,
    MetricValue,
    compute_metric,
    read_metrics_csv,
    write_metrics_csv,
)
from .tempeval import (
    HEATMAP_FIELDS,
    FileSource,
    NativeSource,
    join_metric_performance,
    pearson,
    performance_change,
    read_pairs_csv,
    run_harness,
    write_correlations_csv,
    write_gaps_csv,
    write_heatmap_csv,
    write_pairs_csv,
    write_predictions,
)
from .vocab import (
    classify_lifetimes,
    profiles_for_slices,
    write_assignments_csv,
    write_taxonomy_csv,
)

MODEL_KINDS = {
    "mnb": ModelKind.MULTINOMIAL_NB,
    "logreg": ModelKind.LOGISTIC_REGRESSION,
    "svm": ModelKind.LINEAR_SVM,
}


def _parse_fractions(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValidationError(f"fractions must be three comma-separated numbers, got {text!r}")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"fractions must be numbers, got {text!r}") from None
    return values  # sum/positivity checked by the split itself


def _parse_label_dist(text: str) -> dict[str, float]:
    dist: dict[str, float] = {}
    for piece in text.split(","):
        if "=" not in piece:
            raise ValidationError(f"label distribution entries look like label=fraction, got {piece!r}")
        label, _, raw = piece.partition("=")
        label = label.strip()
        if not label:
            raise ValidationError(f"empty label in distribution entry {piece!r}")
        if label in dist:
            raise ValidationError(f"label {label!r} appears twice in the distribution")
        try:
            dist[label] = float(raw)
        except ValueError:
            raise ValidationError(f"fraction for label {label!r} is not a number: {raw!r}") from None
    return dist


def _parse_metrics(text: str) -> list[LexMetric]:
    names = [p.strip() for p in text.split(",") if p.strip()]
    if not names:
        raise ValidationError("empty metric selection")
    valid = {m.value: m for m in ALL_METRICS}
    selected = []
    for name in names:
        if name not in valid:
            raise ValidationError(f"unknown metric {name!r}; choose from {sorted(valid)}")
        if valid[name] not in selected:
            selected.append(valid[name])
    return sorted(selected, key=list(ALL_METRICS).index)


def _parse_parts(text: str) -> tuple[str, ...]:
    names = [p.strip() for p in text.split(",") if p.strip()]
    for name in names:
        if name not in SPLIT_PARTS:
            raise ValidationError(f"unknown split part {name!r}; choose from {list(SPLIT_PARTS)}")
    parts = tuple(p for p in SPLIT_PARTS if p in names)
    if not parts:
        raise ValidationError("empty part selection")
    return parts


def cmd_split(args: argparse.Namespace) -> list[Path]:
    dataset = ingest(args.input, args.format)
    if (args.per_year_size is None) != (args.label_dist is None):
        raise ValidationError("--per-year-size and --label-dist must be given together")
    fractions = _parse_fractions(args.fractions) if args.fractions else DEFAULT_FRACTIONS
    label_dist = _parse_label_dist(args.label_dist) if args.label_dist else None
    written: list[Path] = []
    for year_slice in dataset.slices:
        if label_dist is not None:
            year_slice = rebalance(year_slice, args.per_year_size, label_dist, args.seed)
        split = stratified_split(year_slice, fractions, args.seed)
        written.extend(export_split(split, args.out_dir, args.format))
    return written


def _combined_slices(splits, parts: tuple[str, ...]) -> list[YearSlice]:
    slices = []
    for split in splits:
        docs: list = []
        for part in parts:
            docs.extend(split.part(part))
        slices.append(YearSlice(year=split.year, documents=tuple(docs)))
    return slices


def cmd_vocab_report(args: argparse.Namespace) -> list[Path]:
    splits = load_splits(args.split_dir, args.format)
    parts = _parse_parts(args.parts) if args.parts else SPLIT_PARTS
    profiles = profiles_for_slices(_combined_slices(splits, parts), args.min_count)
    report = classify_lifetimes(profiles)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    taxonomy = out_dir / "taxonomy.csv"
    assignments = out_dir / "assignments.csv"
    write_taxonomy_csv(report, taxonomy)
    write_assignments_csv(report, assignments)
    return [taxonomy, assignments]


def cmd_lexmetrics(args: argparse.Namespace) -> list[Path]:
    splits = load_splits(args.split_dir, args.format)
    metrics = _parse_metrics(args.metrics) if args.metrics else list(ALL_METRICS)
    train_docs = {s.year: s.train for s in splits}
    test_docs = {s.year: s.test for s in splits}
    years = sorted(train_docs)
    values: list[MetricValue] = []
    for metric in metrics:
        for i in years:
            for j in years:
                try:
                    value = compute_metric(
                        metric, i, j, train_docs[i], test_docs[j], base=args.base
                    )
                except UndefinedMetricError as exc:
                    warnings.warn(
                        f"{metric.value} undefined for pair ({i}, {j}): {exc}",
                        ToolkitWarning,
                        stacklevel=2,
                    )
                    value = MetricValue(
                        metric=metric, source_year=i, target_year=j, value=math.nan
                    )
                values.append(value)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics_path = out_dir / "metrics.csv"
    write_metrics_csv(metrics_path, values)
    written = [metrics_path]
    for metric in metrics:
        path = out_dir / f"heatmap_{metric.value}.csv"
        rows = [mv for mv in values if mv.metric is metric]
        rows.sort(key=lambda mv: (mv.source_year, mv.target_year))
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(HEATMAP_FIELDS)
            for mv in rows:
                writer.writerow([mv.source_year, mv.target_year, repr(mv.value)])
        written.append(path)
    return written


def cmd_evaluate(args: argparse.Namespace) -> list[Path]:
    splits = load_splits(args.split_dir, args.format)
    if args.predictions:
        source: NativeSource | FileSource = FileSource(paths=tuple(args.predictions))
    else:
        config = LinearConfig(
            learning_rate=args.learning_rate, l2=args.l2, epochs=args.epochs, seed=args.seed
        )
        source = NativeSource(
            kind=MODEL_KINDS[args.model],
            config=config,
            nb_alpha=args.nb_alpha,
            nb_features=args.nb_features,
        )
    result = run_harness(splits, source, positive_label=args.positive_label)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pairs_path = out_dir / "pairs.csv"
    gaps_path = out_dir / "gaps.csv"
    heatmap_path = out_dir / "heatmap.csv"
    write_pairs_csv(pairs_path, result.pairs)
    write_gaps_csv(gaps_path, performance_change(result.pairs))
    write_heatmap_csv(heatmap_path, result.pairs)
    written = [pairs_path, gaps_path, heatmap_path]
    if not args.predictions:
        pred_dir = out_dir / "predictions"
        pred_dir.mkdir(parents=True, exist_ok=True)
        by_pair: dict[tuple[int, int], list] = {}
        for rec in result.records:
            by_pair.setdefault((rec.train_year, rec.test_year), []).append(rec)
        for (i, j) in sorted(by_pair):
            path = pred_dir / f"pair_{i}_{j}.csv"
            write_predictions(path, by_pair[(i, j)])
            written.append(path)
    return written


def cmd_correlate(args: argparse.Namespace) -> list[Path]:
    metric_values = read_metrics_csv(args.metrics)
    pairs = read_pairs_csv(args.pairs)
    joined = join_metric_performance(metric_values, pairs)
    if not joined:
        raise ValidationError("no metric values align with any evaluated pair")
    results = []
    for name, (xs, ys) in joined.items():
        result = pearson(xs, ys, metric=name, seed=args.seed)
        dropped = len(xs) - result.n
        if dropped:
            warnings.warn(
                f"{name}: dropped {dropped} non-finite value pair(s) before correlating",
                ToolkitWarning,
                stacklevel=2,
            )
        results.append(result)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "correlations.csv"
    write_correlations_csv(path, results)
    return [path]


def cmd_drift(args: argparse.Namespace) -> list[Path]:
    tagged = load_tagged_dir(args.tagged_dir)
    lexicon = load_lexicon(args.lexicon)
    patterns = load_patterns(args.patterns) if args.patterns else DEFAULT_PATTERNS
    per_year = extract_aspects_by_year(tagged, lexicon, patterns)
    classes = aspect_drift_classes(per_year)
    tables = load_tables(args.manifest)
    table_years = sorted(t.year for t in tables)
    pivot_year = args.pivot_year if args.pivot_year is not None else table_years[0]
    if pivot_year not in table_years:
        raise ValidationError(
            f"pivot year {pivot_year} has no embedding table (manifest years: {table_years})"
        )
    pivot_table = next(t for t in tables if t.year == pivot_year)
    series = [
        similarity_series(tables, aspect, pivot_year) for aspect in sorted(pivot_table.vectors)
    ]
    rankable = [s for s in series if len(s.sims) >= 2]
    short = [s.aspect for s in series if len(s.sims) < 2]
    if short:
        warnings.warn(
            f"{len(short)} aspect(s) have fewer than 2 similarity values and are "
            f"excluded from ranking (e.g. {short[0]!r})",
            ToolkitWarning,
            stacklevel=2,
        )
    unclassed = sorted(s.aspect for s in rankable if s.aspect not in classes)
    if unclassed:
        warnings.warn(
            f"{len(unclassed)} ranked aspect(s) never occur in the tagged corpora; "
            f"their class column is empty (e.g. {unclassed[0]!r})",
            ToolkitWarning,
            stacklevel=2,
        )
    ranks = variance_rank(rankable, classes)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    series_path = out_dir / "series.csv"
    rank_path = out_dir / "drift_rank.csv"
    write_series_csv(series_path, series)
    write_drift_rank_csv(rank_path, ranks)
    return [series_path, rank_path]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="textdrift",
        description=(
            "Quantify how text classifiers age: split corpora by year, profile "
            "vocabulary lifetimes, evaluate models across train/test year pairs, "
            "correlate lexical divergence with performance, and rank aspect drift."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", required=True, help="directory for outputs and warnings.json")
    common.add_argument("--seed", type=int, default=42, help="seed for every stochastic step")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", parents=[common], help="stratified per-year train/dev/test split")
    p.add_argument("--input", required=True, help="documents file (id,text,label,year)")
    p.add_argument("--format", choices=FORMATS, default="csv", help="document file format")
    p.add_argument("--fractions", help="train,dev,test fractions (default 0.75,0.10,0.15)")
    p.add_argument("--per-year-size", type=int, help="downsample each year to this many documents")
    p.add_argument("--label-dist", help="target label distribution, e.g. pos=0.769,neg=0.231")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("vocab-report", parents=[common], help="word-lifetime taxonomy per year")
    p.add_argument("--split-dir", required=True, help="directory of <year>.train/.dev/.test files")
    p.add_argument("--format", choices=FORMATS, default="csv", help="split file format")
    p.add_argument("--min-count", type=int, default=1, help="minimum term frequency per year")
    p.add_argument("--parts", help="comma list of split parts to include (default all)")
    p.set_defaults(func=cmd_vocab_report)

    p = sub.add_parser(
        "lexmetrics", parents=[common], help="lexical divergence for every year pair"
    )
    p.add_argument("--split-dir", required=True, help="directory of <year>.train/.dev/.test files")
    p.add_argument("--format", choices=FORMATS, default="csv", help="split file format")
    p.add_argument("--metrics", help="comma list of metrics (default all four)")
    p.add_argument("--base", type=float, default=2.0, help="log base for information rate")
    p.set_defaults(func=cmd_lexmetrics)

    p = sub.add_parser(
        "evaluate", parents=[common], help="train/test over all year pairs, aggregate by gap"
    )
    p.add_argument("--split-dir", required=True, help="directory of <year>.train/.dev/.test files")
    p.add_argument("--format", choices=FORMATS, default="csv", help="split file format")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--model", choices=sorted(MODEL_KINDS), help="built-in classifier to train")
    group.add_argument(
        "--predictions",
        nargs="+",
        metavar="FILE",
        help="prediction interchange CSV(s); several files average as runs",
    )
    p.add_argument("--positive-label", help="positive class for TP/FP rates (default: larger label)")
    p.add_argument("--nb-alpha", type=float, default=1.0, help="NB smoothing strength")
    p.add_argument(
        "--nb-features",
        choices=("counts", "tfidf"),
        default="counts",
        help="feature representation for NB",
    )
    p.add_argument("--learning-rate", type=float, default=0.01, help="SGD learning rate")
    p.add_argument("--l2", type=float, default=1e-4, help="L2 regularization strength")
    p.add_argument("--epochs", type=int, default=100, help="SGD epochs")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser(
        "correlate", parents=[common], help="correlate lexical metrics with pair performance"
    )
    p.add_argument("--metrics", required=True, help="metrics.csv from the lexmetrics subcommand")
    p.add_argument("--pairs", required=True, help="pairs.csv from the evaluate subcommand")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser(
        "drift", parents=[common], help="rank aspects by embedding-similarity variance"
    )
    p.add_argument("--tagged-dir", required=True, help="directory of per-year token<TAB>tag files")
    p.add_argument("--lexicon", required=True, help="opinion lexicon, one lowercase term per line")
    p.add_argument("--patterns", help="POS pattern file (default: built-in opinion patterns)")
    p.add_argument("--manifest", required=True, help="embedding manifest JSON")
    p.add_argument("--pivot-year", type=int, help="pivot year (default: earliest table)")
    p.set_defaults(func=cmd_drift)
    return parser


def _write_warnings(path: Path, caught: Sequence[warnings.WarningMessage]) -> None:
    entries = [
        {"category": w.category.__name__, "message": str(w.message)} for w in caught
    ]
    with path.open("w", encoding="utf-8") as fh:
        json.dump({"warnings": entries}, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            written = args.func(args)
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_warnings(out_dir / "warnings.json", caught)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(written) + 1} file(s) to {out_dir} ({len(caught)} warning(s))")
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
