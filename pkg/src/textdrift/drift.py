"""Aspect extraction and contextual-drift ranking.

Extracts opinionated multi-word aspects from pre-tagged text (every
contiguous token window that contains a lexicon term and whose POS sequence
matches a pattern), loads per-year embedding tables from interchange files,
computes cosine-similarity trajectories against a pivot year, and ranks
aspects by the population variance of those trajectories.

POS tagging and embedding training are deliberately outside this module;
it consumes their file formats.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    EmptyDatasetError,
    InsufficientSeriesError,
    MissingPivotError,
    ParseError,
    ShapeError,
    TagsetError,
    UndefinedSimilarityError,
    ValidationError,
)
from .vocab import LifetimeClass, TaxonomyReport, VocabularyProfile, classify_lifetimes

# Coarse universal tags; pattern files may use any subset plus "*".
DEFAULT_TAGSET = frozenset(
    {
        "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
        "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
    }
)

MAX_PATTERN_LENGTH = 5

MANIFEST_FIELDS = ("dimension", "tables")
SERIES_FIELDS = ("aspect", "year", "similarity")
DRIFT_RANK_FIELDS = ("aspect", "class", "variance")


class LexiconSource(enum.Enum):
    OPINION = "opinion"
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class TaggedToken:
    token: str
    pos: str

    def __post_init__(self) -> None:
        if not self.token:
            raise ValidationError("tagged token text must be nonempty")
        if not self.pos:
            raise ValidationError(f"token {self.token!r} has an empty POS tag")


@dataclass(frozen=True)
class AspectLexicon:
    """Set of opinion words that license aspect windows."""

    terms: frozenset[str]
    source: LexiconSource = LexiconSource.OPINION

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValidationError("lexicon must contain at least one term")
        bad = sorted(t for t in self.terms if not t or t != t.lower())
        if bad:
            raise ValidationError(f"lexicon terms must be nonempty lowercase: {bad[:5]}")

    def __contains__(self, term: str) -> bool:
        return term in self.terms


@dataclass(frozen=True)
class PosPattern:
    """POS-tag sequence matcher; "*" matches any tag."""

    id: str
    sequence: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("pattern id must be nonempty")
        if not 1 <= len(self.sequence) <= MAX_PATTERN_LENGTH:
            raise ValidationError(
                f"pattern {self.id!r} length {len(self.sequence)} outside 1..{MAX_PATTERN_LENGTH}"
            )
        if any(not m for m in self.sequence):
            raise ValidationError(f"pattern {self.id!r} contains an empty matcher")


def _pattern(*tags: str) -> PosPattern:
    return PosPattern(id="-".join(tags).lower(), sequence=tags)


# Default opinion patterns; bare ADJ is included because single-word
# opinion aspects are common, so lengths start at 1.
DEFAULT_PATTERNS: tuple[PosPattern, ...] = (
    _pattern("ADJ", "NOUN"),
    _pattern("ADV", "ADJ"),
    _pattern("ADJ", "ADJ", "NOUN"),
    _pattern("VERB", "ADV"),
    _pattern("NOUN", "ADJ"),
    _pattern("ADV", "VERB"),
    _pattern("ADJ"),
    _pattern("ADV", "ADJ", "NOUN"),
    _pattern("VERB", "ADJ"),
    _pattern("NOUN", "NOUN"),
)


@dataclass(frozen=True)
class Aspect:
    """One pattern occurrence over a token window."""

    tokens: tuple[str, ...]
    pattern_id: str

    @property
    def canonical(self) -> str:
        return " ".join(t.lower() for t in self.tokens)


@dataclass(frozen=True)
class EmbeddingTable:
    """Per-year aspect vectors of one common dimension; no zero vectors."""

    year: int
    vectors: Mapping[str, np.ndarray]

    @property
    def dimension(self) -> int | None:
        for vec in self.vectors.values():
            return int(vec.shape[0])
        return None


@dataclass(frozen=True)
class SimilaritySeries:
    """Cosine of an aspect's yearly vectors against its pivot-year vector.

    Years whose table lacks the aspect are gaps: absent, never zero. The
    mean is over present values only and NaN for an empty series.
    """

    aspect: str
    pivot_year: int
    sims: tuple[tuple[int, float], ...]
    mean: float


@dataclass(frozen=True)
class DriftRank:
    aspect: str
    variance: float
    lifetime: LifetimeClass | None = None


def load_lexicon(path: str | Path, source: LexiconSource = LexiconSource.OPINION) -> AspectLexicon:
    """One term per line; blank lines and #-comments ignored; lowercased."""
    terms = set()
    with Path(path).open("r", encoding="utf-8") as fh:
        for raw in fh:
            term = raw.strip().lower()
            if term and not term.startswith("#"):
                terms.add(term)
    if not terms:
        raise ValidationError(f"{path}: lexicon file contains no terms")
    return AspectLexicon(terms=frozenset(terms), source=source)


def load_patterns(path: str | Path) -> tuple[PosPattern, ...]:
    """One pattern per line: space-separated POS tags, "*" as wildcard."""
    patterns = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for number, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tags = tuple(t.upper() if t != "*" else t for t in line.split())
            try:
                patterns.append(PosPattern(id="-".join(tags).lower(), sequence=tags))
            except ValidationError as exc:
                raise ParseError(f"{path}: {exc}", line=number) from None
    if not patterns:
        raise ValidationError(f"{path}: pattern file contains no patterns")
    return tuple(patterns)


def parse_tagged(path: str | Path) -> list[list[TaggedToken]]:
    """Read token<TAB>tag lines; blank lines separate sentences."""
    sentences: list[list[TaggedToken]] = []
    current: list[TaggedToken] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for number, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                if current:
                    sentences.append(current)
                    current = []
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(f"{path}: expected token<TAB>tag", line=number)
            token, tag = parts[0].strip(), parts[1].strip()
            if not token or not tag:
                raise ParseError(f"{path}: empty token or tag", line=number)
            current.append(TaggedToken(token=token, pos=tag))
    if current:
        sentences.append(current)
    return sentences


def load_tagged_dir(directory: str | Path) -> dict[int, list[list[TaggedToken]]]:
    """Load per-year tagged files (digit stems, e.g. 2014.tsv)."""
    directory = Path(directory)
    by_year: dict[int, list[list[TaggedToken]]] = {}
    for entry in sorted(directory.iterdir()):
        if entry.is_file() and entry.stem.isdigit():
            year = int(entry.stem)
            if year in by_year:
                raise ValidationError(f"duplicate tagged files for year {year}")
            by_year[year] = parse_tagged(entry)
    if not by_year:
        raise EmptyDatasetError(f"{directory}: no per-year tagged files found")
    return by_year


def _check_patterns(patterns: Sequence[PosPattern], tagset: frozenset[str]) -> None:
    for pattern in patterns:
        for matcher in pattern.sequence:
            if matcher != "*" and matcher not in tagset:
                raise TagsetError(f"pattern {pattern.id!r} uses unknown POS tag {matcher!r}")


def extract_aspects(
    sentences: Sequence[Sequence[TaggedToken]],
    lexicon: AspectLexicon,
    patterns: Sequence[PosPattern] = DEFAULT_PATTERNS,
    tagset: frozenset[str] = DEFAULT_TAGSET,
) -> Counter[str]:
    """Multiset of aspect canonical forms from every matching window.

    Every contiguous window whose POS sequence matches a pattern and which
    contains at least one lexicon term is emitted, once per matching
    pattern; overlapping and nested matches all count.
    """
    if not patterns:
        raise ValidationError("at least one pattern is required")
    _check_patterns(patterns, tagset)
    found: Counter[str] = Counter()
    for sentence in sentences:
        tags = []
        for tok in sentence:
            if tok.pos not in tagset:
                raise TagsetError(f"unknown POS tag {tok.pos!r} on token {tok.token!r}")
            tags.append(tok.pos)
        lowers = [tok.token.lower() for tok in sentence]
        licensed = [term in lexicon for term in lowers]
        for pattern in patterns:
            width = len(pattern.sequence)
            for start in range(len(sentence) - width + 1):
                ok = True
                for k, matcher in enumerate(pattern.sequence):
                    if matcher != "*" and matcher != tags[start + k]:
                        ok = False
                        break
                if ok and any(licensed[start : start + width]):
                    found[" ".join(lowers[start : start + width])] += 1
    return found


def extract_aspects_by_year(
    tagged_by_year: Mapping[int, Sequence[Sequence[TaggedToken]]],
    lexicon: AspectLexicon,
    patterns: Sequence[PosPattern] = DEFAULT_PATTERNS,
    tagset: frozenset[str] = DEFAULT_TAGSET,
) -> dict[int, Counter[str]]:
    return {
        year: extract_aspects(tagged_by_year[year], lexicon, patterns, tagset)
        for year in sorted(tagged_by_year)
    }


def aspect_lifetimes(per_year_aspects: Mapping[int, Mapping[str, int]]) -> TaxonomyReport:
    """Lifetime taxonomy over aspect canonical forms, same rules as words."""
    profiles = [
        VocabularyProfile(year=year, counts=dict(per_year_aspects[year]))
        for year in sorted(per_year_aspects)
    ]
    return classify_lifetimes(profiles)


def aspect_drift_classes(
    per_year_aspects: Mapping[int, Mapping[str, int]]
) -> dict[str, LifetimeClass]:
    """Whole-lifetime grouping used by the drift ranking.

    An aspect seen in every year is common, in exactly one year unique,
    otherwise seasonal. Coarser than the per-year taxonomy: ranking wants
    one class per aspect, not one per (aspect, year).
    """
    if not per_year_aspects:
        raise EmptyDatasetError("no per-year aspect multisets")
    years = sorted(per_year_aspects)
    spread: dict[str, int] = {}
    for year in years:
        for aspect in per_year_aspects[year]:
            spread[aspect] = spread.get(aspect, 0) + 1
    classes = {}
    for aspect, n_years in spread.items():
        if n_years == len(years):
            classes[aspect] = LifetimeClass.COMMON
        elif n_years == 1:
            classes[aspect] = LifetimeClass.UNIQUE
        else:
            classes[aspect] = LifetimeClass.SEASONAL
    return classes


def cosine(u: Sequence[float] | np.ndarray, v: Sequence[float] | np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise ShapeError(f"cosine needs equal-length vectors, got {u.shape} and {v.shape}")
    norm_u = float(np.linalg.norm(u))
    norm_v = float(np.linalg.norm(v))
    if norm_u == 0.0 or norm_v == 0.0:
        raise UndefinedSimilarityError("cosine is undefined for a zero vector")
    return float(u @ v) / (norm_u * norm_v)


def make_table(year: int, vectors: Mapping[str, Sequence[float]]) -> EmbeddingTable:
    """Validate and freeze one year's aspect vectors."""
    checked: dict[str, np.ndarray] = {}
    dimension: int | None = None
    for aspect in sorted(vectors):
        if not aspect:
            raise ValidationError("empty aspect name in embedding table")
        vec = np.asarray(vectors[aspect], dtype=np.float64)
        if vec.ndim != 1 or vec.shape[0] == 0:
            raise ShapeError(f"aspect {aspect!r}: vector must be a nonempty 1-D array")
        if not np.all(np.isfinite(vec)):
            raise ValidationError(f"aspect {aspect!r}: vector has non-finite components")
        if dimension is None:
            dimension = vec.shape[0]
        elif vec.shape[0] != dimension:
            raise ShapeError(
                f"aspect {aspect!r}: dimension {vec.shape[0]} != table dimension {dimension}"
            )
        if not np.any(vec):
            raise ValidationError(f"aspect {aspect!r}: zero vectors are not admitted")
        vec.setflags(write=False)
        checked[aspect] = vec
    return EmbeddingTable(year=year, vectors=checked)


def read_embedding_table(
    path: str | Path, year: int, expected_dimension: int | None = None
) -> EmbeddingTable:
    """Parse one JSONL embedding file: {"aspect": ..., "vector": [...]}."""
    vectors: dict[str, list[float]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for number, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}: invalid JSON ({exc.msg})", line=number) from None
            if not isinstance(record, dict) or "aspect" not in record or "vector" not in record:
                raise ParseError(f"{path}: each line needs 'aspect' and 'vector'", line=number)
            aspect = record["aspect"]
            vector = record["vector"]
            if not isinstance(aspect, str) or not aspect:
                raise ParseError(f"{path}: aspect must be a nonempty string", line=number)
            if not isinstance(vector, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in vector
            ):
                raise ParseError(f"{path}: vector must be a list of reals", line=number)
            if expected_dimension is not None and len(vector) != expected_dimension:
                raise ParseError(
                    f"{path}: vector of length {len(vector)} != manifest dimension "
                    f"{expected_dimension}",
                    line=number,
                )
            if aspect in vectors:
                raise ParseError(f"{path}: duplicate aspect {aspect!r}", line=number)
            vectors[aspect] = [float(x) for x in vector]
    try:
        return make_table(year, vectors)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def write_embedding_table(path: str | Path, table: EmbeddingTable) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for aspect in sorted(table.vectors):
            record = {"aspect": aspect, "vector": [float(x) for x in table.vectors[aspect]]}
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def write_manifest(path: str | Path, dimension: int, tables: Mapping[int, str]) -> None:
    """Manifest JSON: common dimension plus year -> relative table path."""
    doc = {
        "dimension": int(dimension),
        "tables": {str(year): tables[year] for year in sorted(tables)},
    }
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path: str | Path) -> tuple[int, dict[int, Path]]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, dict) or any(key not in doc for key in MANIFEST_FIELDS):
        raise ValidationError(f"{path}: manifest needs keys {MANIFEST_FIELDS}")
    dimension = doc["dimension"]
    if not isinstance(dimension, int) or isinstance(dimension, bool) or dimension < 1:
        raise ValidationError(f"{path}: dimension must be a positive integer")
    tables = doc["tables"]
    if not isinstance(tables, dict) or not tables:
        raise ValidationError(f"{path}: tables must map year to path and be nonempty")
    resolved: dict[int, Path] = {}
    for key in tables:
        if not (isinstance(key, str) and key.isdigit()):
            raise ValidationError(f"{path}: table year {key!r} is not a year")
        rel = tables[key]
        if not isinstance(rel, str) or not rel:
            raise ValidationError(f"{path}: table path for year {key} must be a nonempty string")
        resolved[int(key)] = path.parent / rel
    return dimension, resolved


def load_tables(manifest_path: str | Path) -> list[EmbeddingTable]:
    """Load every per-year table named by a manifest, sorted by year."""
    dimension, paths = load_manifest(manifest_path)
    return [
        read_embedding_table(paths[year], year, expected_dimension=dimension)
        for year in sorted(paths)
    ]


def similarity_series(
    tables: Sequence[EmbeddingTable],
    aspect: str,
    pivot_year: int | None = None,
) -> SimilaritySeries:
    """Cosine of each later year's vector against the pivot year's.

    Later years whose table lacks the aspect are gaps; they contribute
    nothing to the series or its mean.
    """
    if not tables:
        raise ValidationError("no embedding tables supplied")
    by_year: dict[int, EmbeddingTable] = {}
    for table in tables:
        if table.year in by_year:
            raise ValidationError(f"duplicate embedding table for year {table.year}")
        by_year[table.year] = table
    years = sorted(by_year)
    if pivot_year is None:
        pivot_year = years[0]
    if pivot_year not in by_year:
        raise ValidationError(f"no embedding table for pivot year {pivot_year}")
    pivot_vec = by_year[pivot_year].vectors.get(aspect)
    if pivot_vec is None:
        raise MissingPivotError(
            f"aspect {aspect!r} is absent from the pivot year {pivot_year} table"
        )
    sims = []
    for year in years:
        if year <= pivot_year:
            continue
        vec = by_year[year].vectors.get(aspect)
        if vec is not None:
            sims.append((year, cosine(pivot_vec, vec)))
    mean = math.fsum(s for _, s in sims) / len(sims) if sims else float("nan")
    return SimilaritySeries(aspect=aspect, pivot_year=pivot_year, sims=tuple(sims), mean=mean)


def population_variance(values: Sequence[float]) -> float:
    """Mean squared deviation with denominator N."""
    if not values:
        raise InsufficientSeriesError("variance of an empty series")
    mean = math.fsum(values) / len(values)
    return math.fsum((v - mean) ** 2 for v in values) / len(values)


def variance_rank(
    series: Sequence[SimilaritySeries],
    classes: Mapping[str, LifetimeClass] | None = None,
) -> list[DriftRank]:
    """Rank aspects by similarity variance, descending; ties by aspect."""
    if not series:
        raise ValidationError("no similarity series to rank")
    seen: set[str] = set()
    ranks = []
    for s in series:
        if s.aspect in seen:
            raise ValidationError(f"duplicate series for aspect {s.aspect!r}")
        seen.add(s.aspect)
        values = [sim for _, sim in s.sims]
        if len(values) < 2:
            raise InsufficientSeriesError(
                f"aspect {s.aspect!r} has {len(values)} similarity value(s); need >= 2"
            )
        ranks.append(
            DriftRank(
                aspect=s.aspect,
                variance=population_variance(values),
                lifetime=classes.get(s.aspect) if classes is not None else None,
            )
        )
    ranks.sort(key=lambda r: (-r.variance, r.aspect))
    return ranks


def write_series_csv(path: str | Path, series: Sequence[SimilaritySeries]) -> None:
    rows = []
    for s in series:
        for year, sim in s.sims:
            rows.append((s.aspect, year, sim))
    rows.sort(key=lambda r: (r[0], r[1]))
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SERIES_FIELDS)
        for aspect, year, sim in rows:
            writer.writerow([aspect, year, repr(float(sim))])


def write_drift_rank_csv(path: str | Path, ranks: Sequence[DriftRank]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DRIFT_RANK_FIELDS)
        for rank in ranks:
            writer.writerow(
                [
                    rank.aspect,
                    rank.lifetime.value if rank.lifetime is not None else "",
                    repr(float(rank.variance)),
                ]
            )
