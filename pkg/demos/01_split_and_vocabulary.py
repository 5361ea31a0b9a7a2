"""Split a temporal corpus and chart how its vocabulary lives and dies.

Builds a six-year synthetic corpus, cuts each year into stratified
train/dev/test parts, then classifies every (term, year) pair into one of
five lifetime classes: dying, unique, emerging, common, seasonal. The
stacked bars show the class mix per year; churn shows up as the emerging
and dying bands.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from textdrift.corpus import dataset_from_documents, stratified_split
from textdrift.vocab import CLASS_ORDER, build_profile, classify_lifetimes

from _common import drifting_documents, out_path


def main() -> None:
    dataset = dataset_from_documents(drifting_documents())
    print(f"corpus: {sum(len(s.documents) for s in dataset.slices)} documents, years {dataset.years}")

    for year in dataset.years:
        split = stratified_split(dataset.slice_for(year), seed=42)
        print(
            f"  {year}: train={len(split.train)} dev={len(split.dev)} test={len(split.test)}"
        )

    profiles = [build_profile(dataset.slice_for(year)) for year in dataset.years]
    report = classify_lifetimes(profiles)

    print("\nper-year lifetime classes:")
    header = "year  " + "".join(f"{c.value:>10}" for c in CLASS_ORDER)
    print(header)
    for year in report.years:
        counts = report.per_year[year]
        row = f"{year}  " + "".join(f"{counts.get(c, 0):>10}" for c in CLASS_ORDER)
        print(row)

    fig, ax = plt.subplots(figsize=(8, 4.5))
    bottoms = [0.0] * len(report.years)
    for cls in CLASS_ORDER:
        values = [report.per_year[y].get(cls, 0) for y in report.years]
        ax.bar(report.years, values, bottom=bottoms, label=cls.value)
        bottoms = [b + v for b, v in zip(bottoms, values)]
    ax.set_xlabel("year")
    ax.set_ylabel("vocabulary size")
    ax.set_title("Term lifetime classes per year")
    ax.legend(fontsize=8)
    fig.tight_layout()
    target = out_path("01_vocabulary_lifetimes.png")
    fig.savefig(target, dpi=120)
    print(f"\nwrote {target}")


if __name__ == "__main__":
    main()
