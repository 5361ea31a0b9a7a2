"""Train on every year, test on every year, and watch performance decay.

The harness fits one Naive Bayes model per training year and scores it on
every year's test split. Grouping the resulting pairs by signed temporal
gap (test year minus train year) gives the performance curve P(G): flat
for a corpus in equilibrium, sloping away from gap zero when the
class-indicative vocabulary churns, as it does here.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from textdrift.classifiers import ModelKind
from textdrift.corpus import dataset_from_documents, stratified_split
from textdrift.tempeval import NativeSource, performance_change, run_harness

from _common import drifting_documents, out_path


def main() -> None:
    dataset = dataset_from_documents(drifting_documents())
    splits = [stratified_split(dataset.slice_for(year), seed=42) for year in dataset.years]

    result = run_harness(splits, NativeSource(kind=ModelKind.MULTINOMIAL_NB))
    print(f"evaluated {len(result.pairs)} train/test pairs over {len(splits)} years")

    aggregates = performance_change(result.pairs)
    print("\ngap  mean macro-F1  pairs")
    for agg in aggregates:
        print(f"{agg.gap:>3}  {agg.mean_f_macro:>13.4f}  {agg.n_pairs:>5}")

    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4.2))

    gaps = [a.gap for a in aggregates]
    means = [a.mean_f_macro for a in aggregates]
    left.plot(gaps, means, marker="o")
    left.axvline(0.0, color="grey", lw=0.8, ls="--")
    left.set_xlabel("temporal gap (test year - train year)")
    left.set_ylabel("mean macro-F1")
    left.set_title("Performance change P(G)")

    years = dataset.years
    index = {year: k for k, year in enumerate(years)}
    grid = np.full((len(years), len(years)), np.nan)
    for pair in result.pairs:
        grid[index[pair.train_year], index[pair.test_year]] = pair.f_macro
    image = right.imshow(grid, cmap="viridis", origin="lower")
    right.set_xticks(range(len(years)), years, rotation=45)
    right.set_yticks(range(len(years)), years)
    right.set_xlabel("test year")
    right.set_ylabel("train year")
    right.set_title("Pair macro-F1")
    fig.colorbar(image, ax=right, shrink=0.85)

    fig.tight_layout()
    target = out_path("02_performance_change.png")
    fig.savefig(target, dpi=120)
    print(f"\nwrote {target}")


if __name__ == "__main__":
    main()
