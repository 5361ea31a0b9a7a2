"""Shared synthetic corpus for the demo scripts.

Every demo works on the same kind of data: a binary review corpus whose
class-indicative vocabulary churns year over year. Each document carries
two words from its class pool, eight shared filler words, and one
never-repeated noise word. Every year a fixed fraction of each class pool
is replaced, so classifiers trained on one year gradually lose their
evidence on distant years while the shared filler keeps the vocabularies
overlapping.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from textdrift.corpus import Document

OUT_DIR = Path(__file__).parent / "out"


def out_path(name: str) -> Path:
    OUT_DIR.mkdir(exist_ok=True)
    return OUT_DIR / name


def drifting_documents(
    n_years: int = 6,
    docs_per_year: int = 600,
    replace_per_year: float = 0.15,
    pool_size: int = 60,
    first_year: int = 2014,
    seed: int = 20240816,
) -> list[Document]:
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
