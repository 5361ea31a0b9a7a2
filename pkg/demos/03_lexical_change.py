"""Measure vocabulary change directly and correlate it with accuracy.

Four lexical metrics compare the training year's text to the test year's:
familiarity and Jaccard overlap on the term sets, tf-idf centroid cosine,
and the information rate of a bigram model. If performance decay is really
driven by vocabulary change, the metric values should track pair macro-F1;
the permutation-tested Pearson correlations quantify how tightly.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from textdrift.classifiers import ModelKind
from textdrift.corpus import dataset_from_documents, stratified_split
from textdrift.lexmetrics import ALL_METRICS, LexMetric, compute_pair_metrics
from textdrift.tempeval import NativeSource, correlate_metrics, enumerate_pairs, run_harness

from _common import drifting_documents, out_path


def main() -> None:
    dataset = dataset_from_documents(drifting_documents())
    years = dataset.years
    splits = [stratified_split(dataset.slice_for(year), seed=42) for year in years]
    train_docs = {s.year: list(s.train) for s in splits}
    test_docs = {s.year: list(s.test) for s in splits}

    values = []
    for i, j in enumerate_pairs(years):
        values.extend(compute_pair_metrics(i, j, train_docs[i], test_docs[j]))
    print(f"computed {len(values)} metric values over {len(years) ** 2} year pairs")

    result = run_harness(splits, NativeSource(kind=ModelKind.MULTINOMIAL_NB))
    correlations = correlate_metrics(values, result.pairs, seed=42)
    print("\nmetric                 r        p      n")
    for c in correlations:
        print(f"{c.metric:<20} {c.r:>6.3f}  {c.p_two_tailed:>7.4f}  {c.n:>3}")

    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4.2))

    # Jaccard overlap between train vocabularies, year by year
    index = {year: k for k, year in enumerate(years)}
    grid = np.full((len(years), len(years)), np.nan)
    for value in values:
        if value.metric is LexMetric.JACCARD:
            grid[index[value.source_year], index[value.target_year]] = value.value
    image = left.imshow(grid, cmap="magma", origin="lower")
    left.set_xticks(range(len(years)), years, rotation=45)
    left.set_yticks(range(len(years)), years)
    left.set_xlabel("test year")
    left.set_ylabel("train year")
    left.set_title("Jaccard overlap of term sets")
    fig.colorbar(image, ax=left, shrink=0.85)

    f_by_pair = {(p.train_year, p.test_year): p.f_macro for p in result.pairs}
    xs = [v.value for v in values if v.metric is LexMetric.FAMILIARITY]
    ys = [f_by_pair[(v.source_year, v.target_year)] for v in values if v.metric is LexMetric.FAMILIARITY]
    right.scatter(xs, ys, s=18, alpha=0.8)
    right.set_xlabel("familiarity")
    right.set_ylabel("pair macro-F1")
    r_fam = next(c.r for c in correlations if c.metric == LexMetric.FAMILIARITY.value)
    right.set_title(f"Familiarity vs macro-F1 (r = {r_fam:.3f})")

    fig.tight_layout()
    target = out_path("03_lexical_change.png")
    fig.savefig(target, dpi=120)
    print(f"\nwrote {target}")
    print(f"metrics covered: {[m.value for m in ALL_METRICS]}")


if __name__ == "__main__":
    main()
