"""Shared builders for the test suite.

Fixtures here construct small in-memory corpora and the synthetic
drifting corpus used by the end-to-end checks. Everything is seeded and
deterministic.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from textdrift.corpus import Document, YearSlice


def make_docs(per_year: dict[int, list[tuple[str, str]]], prefix: str = "d") -> list[Document]:
    """Documents from {year: [(text, label), ...]}, ids in ingestion order."""
    docs = []
    n = 0
    for year in sorted(per_year):
        for text, label in per_year[year]:
            docs.append(Document(id=f"{prefix}{n}", text=text, label=label, year=year))
            n += 1
    return docs


def make_slice(year: int, texts: list[str], label: str = "x") -> YearSlice:
    docs = tuple(
        Document(id=f"s{year}-{k}", text=t, label=label, year=year)
        for k, t in enumerate(texts)
    )
    return YearSlice(year=year, documents=docs)


def write_corpus_csv(path: Path, docs: list[Document]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "text", "label", "year"])
        for d in docs:
            writer.writerow([d.id, d.text, d.label, d.year])


def drifting_corpus(
    n_years: int = 6,
    docs_per_year: int = 2000,
    replace_per_year: float = 0.15,
    pool_size: int = 100,
    first_year: int = 2014,
    seed: int = 20240816,
) -> list[Document]:
    """Binary corpus whose class-indicative vocabulary churns year over year.

    Each document carries two words from its class pool, eight shared
    filler words, and one never-repeated noise word. Every year a fixed
    fraction of each class pool is replaced, so classifiers trained on one
    year gradually lose their evidence on distant years while the shared
    filler keeps vocabularies overlapping.
    """
    rng = np.random.RandomState(seed)
    filler = [f"f{k}" for k in range(200)]
    pools = {"neg": [f"n{k}" for k in range(pool_size)], "pos": [f"p{k}" for k in range(pool_size)]}
    next_id = {"neg": pool_size, "pos": pool_size}
    docs: list[Document] = []
    uid = 0
    for yi in range(n_years):
        year = first_year + yi
        if yi > 0:
            for lab in ("neg", "pos"):
                pool = pools[lab]
                n_replace = int(round(replace_per_year * len(pool)))
                drop = rng.choice(len(pool), size=n_replace, replace=False)
                for d in sorted(drop):
                    pool[d] = f"{lab[0]}{next_id[lab]}"
                    next_id[lab] += 1
        for k in range(docs_per_year):
            lab = "pos" if k % 2 == 0 else "neg"
            pool = pools[lab]
            words = [pool[i] for i in rng.randint(0, len(pool), size=2)]
            words += [filler[i] for i in rng.randint(0, len(filler), size=8)]
            words.append(f"u{uid}")
            uid += 1
            rng.shuffle(words)
            docs.append(Document(id=f"d{uid}", text=" ".join(words), label=lab, year=year))
    return docs
