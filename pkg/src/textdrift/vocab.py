"""Tokenization, per-year vocabulary profiles and word-lifetime taxonomy.

Every (term, year) occurrence is assigned exactly one lifetime class so
per-year class counts stack into a partition of the year's vocabulary:

* common   -- used in every year of the span
* unique   -- used in that year only
* emerging -- first year of a term that reappears later
* dying    -- last year of a term used in 2+ years, unless it is the span's
              final year (the future is unknown there)
* seasonal -- everything else (2+ years but not all, interior occurrences,
              and final-year last occurrences)

Ties between overlapping definitions resolve in the order above.
"""

from __future__ import annotations

import csv
import enum
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import YearSlice
from .errors import InsufficientDataError, ValidationError

# Tokens are runs of word characters with internal apostrophes kept;
# '#' and '@' immediately before a word character start the token.
_TOKEN_RE = re.compile(r"[#@]?\w+(?:['’]\w+)*")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on whitespace/punctuation.

    Hashtag and mention sigils survive word-initially, internal apostrophes
    survive, everything else splits. Empty input gives an empty list.
    """
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class VocabularyProfile:
    """Term -> occurrence count table for one year."""

    year: int
    counts: dict[str, int]

    @property
    def term_set(self) -> frozenset[str]:
        return frozenset(self.counts)

    def __len__(self) -> int:
        return len(self.counts)


def build_profile(slice: YearSlice, min_count: int = 1) -> VocabularyProfile:
    """Aggregate token occurrences over all documents of a slice.

    ``min_count`` is an optional frequency floor; 1 keeps everything.
    """
    counts: Counter[str] = Counter()
    for doc in slice.documents:
        counts.update(tokenize(doc.text))
    if min_count > 1:
        counts = Counter({t: c for t, c in counts.items() if c >= min_count})
    return VocabularyProfile(year=slice.year, counts=dict(counts))


class LifetimeClass(enum.Enum):
    DYING = "dying"
    UNIQUE = "unique"
    EMERGING = "emerging"
    COMMON = "common"
    SEASONAL = "seasonal"


# Stable presentation order for reports.
CLASS_ORDER = (
    LifetimeClass.DYING,
    LifetimeClass.UNIQUE,
    LifetimeClass.EMERGING,
    LifetimeClass.COMMON,
    LifetimeClass.SEASONAL,
)


@dataclass(frozen=True)
class TaxonomyReport:
    """Per-year class counts plus the underlying (term, year) assignments."""

    per_year: dict[int, dict[LifetimeClass, int]]
    assignments: dict[tuple[str, int], LifetimeClass]

    @property
    def years(self) -> list[int]:
        return sorted(self.per_year)


def classify_lifetimes(profiles: Sequence[VocabularyProfile]) -> TaxonomyReport:
    """Assign a lifetime class to every (term, year) occurrence.

    Requires profiles for at least three distinct years; the taxonomy is
    degenerate below that.
    """
    if len(profiles) < 3:
        raise InsufficientDataError(
            f"need at least 3 yearly profiles, got {len(profiles)}"
        )
    years = [p.year for p in profiles]
    if len(set(years)) != len(years):
        raise ValidationError("duplicate years among profiles")
    profiles = sorted(profiles, key=lambda p: p.year)
    years = [p.year for p in profiles]
    final_year = years[-1]
    n_years = len(years)

    term_years: dict[str, list[int]] = {}
    for profile in profiles:
        for term in profile.counts:
            term_years.setdefault(term, []).append(profile.year)

    assignments: dict[tuple[str, int], LifetimeClass] = {}
    per_year: dict[int, dict[LifetimeClass, int]] = {
        y: {cls: 0 for cls in CLASS_ORDER} for y in years
    }
    for term, occ in term_years.items():
        first, last, spread = occ[0], occ[-1], len(occ)
        for year in occ:
            if spread == n_years:
                cls = LifetimeClass.COMMON
            elif spread == 1:
                cls = LifetimeClass.UNIQUE
            elif year == first:
                cls = LifetimeClass.EMERGING
            elif year == last and year != final_year:
                cls = LifetimeClass.DYING
            else:
                cls = LifetimeClass.SEASONAL
            assignments[(term, year)] = cls
            per_year[year][cls] += 1
    return TaxonomyReport(per_year=per_year, assignments=assignments)


def write_taxonomy_csv(report: TaxonomyReport, path: str | Path) -> None:
    """Emit ``year,class,count`` rows, the Figure-2-style plot data."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["year", "class", "count"])
        for year in report.years:
            for cls in CLASS_ORDER:
                writer.writerow([year, cls.value, report.per_year[year][cls]])


def write_assignments_csv(report: TaxonomyReport, path: str | Path) -> None:
    """Emit ``term,year,class`` rows sorted by term then year."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["term", "year", "class"])
        for (term, year), cls in sorted(report.assignments.items()):
            writer.writerow([term, year, cls.value])


def profiles_for_slices(slices: Iterable[YearSlice], min_count: int = 1) -> list[VocabularyProfile]:
    return [build_profile(s, min_count=min_count) for s in slices]
