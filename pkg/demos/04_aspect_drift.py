"""Track how the meaning of review aspects moves over the years.

Aspects are opinion-bearing windows ("good film", "bad plot") pulled from
POS-tagged sentences by lexicon-gated patterns. Each year contributes an
embedding table mapping aspects to vectors; cosine similarity against the
earliest year's vector gives a per-aspect trajectory, and the variance of
that trajectory ranks aspects from drifting to stable.

The embeddings here are synthetic: each aspect's vector rotates at its own
fixed speed, so the expected ranking is known in advance.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from textdrift.drift import (
    AspectLexicon,
    TaggedToken,
    aspect_drift_classes,
    extract_aspects_by_year,
    make_table,
    similarity_series,
    variance_rank,
)

from _common import out_path

YEARS = list(range(2014, 2020))

# radians of rotation per year: the "drift speed" of each aspect
SPEEDS = {"good film": 0.30, "bad plot": 0.12, "great acting": 0.03}


def tagged_year(year: int) -> list[list[TaggedToken]]:
    sentences = [
        [TaggedToken("good", "ADJ"), TaggedToken("film", "NOUN")],
        [TaggedToken("the", "DET"), TaggedToken("bad", "ADJ"), TaggedToken("plot", "NOUN")],
        [TaggedToken("great", "ADJ"), TaggedToken("acting", "NOUN")],
    ]
    if year == 2016:
        # one-off aspect, only ever seen this year
        sentences.append([TaggedToken("slow", "ADJ"), TaggedToken("start", "NOUN")])
    return sentences


def main() -> None:
    lexicon = AspectLexicon(terms=frozenset({"good", "bad", "great", "slow"}))
    tagged = {year: tagged_year(year) for year in YEARS}
    per_year = extract_aspects_by_year(tagged, lexicon)
    classes = aspect_drift_classes(per_year)
    print("aspect classes:")
    for aspect, cls in sorted(classes.items()):
        print(f"  {aspect:<14} {cls.value}")

    tables = []
    for year in YEARS:
        dy = year - YEARS[0]
        vectors = {
            aspect: [math.cos(speed * dy), math.sin(speed * dy)]
            for aspect, speed in SPEEDS.items()
        }
        tables.append(make_table(year, vectors))

    series = [similarity_series(tables, aspect) for aspect in sorted(SPEEDS)]
    ranks = variance_rank(series, classes)

    print("\ndrift ranking (variance of similarity to the pivot year):")
    for rank in ranks:
        lifetime = rank.lifetime.value if rank.lifetime else ""
        print(f"  {rank.aspect:<14} variance={rank.variance:.5f}  {lifetime}")
    skipped = sorted(set(classes) - set(SPEEDS))
    print(f"skipped (absent from the pivot year's table): {skipped}")

    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4.2))
    for s in series:
        years = [year for year, _ in s.sims]
        sims = [sim for _, sim in s.sims]
        left.plot(years, sims, marker="o", label=s.aspect)
    left.set_xlabel("year")
    left.set_ylabel(f"cosine vs {YEARS[0]}")
    left.set_title("Aspect similarity trajectories")
    left.legend(fontsize=8)

    right.bar([r.aspect for r in ranks], [r.variance for r in ranks])
    right.set_ylabel("similarity variance")
    right.set_title("Drift ranking")
    right.tick_params(axis="x", rotation=20)

    fig.tight_layout()
    target = out_path("04_aspect_drift.png")
    fig.savefig(target, dpi=120)
    print(f"\nwrote {target}")


if __name__ == "__main__":
    main()
