"""Ingestion of timestamped labeled documents and per-year splits.

Documents arrive as CSV (header ``id,text,label,year``, RFC-4180 quoting) or
JSON-lines with the same keys, are bucketed into 1-year slices, optionally
down-sampled to a fixed size and label distribution, and split per year into
stratified train/dev/test partitions. Everything is deterministic given the
seed, and datasets are immutable once built.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    CapacityError,
    EmptyDatasetError,
    ParseError,
    StratificationError,
    ValidationError,
)

FIELDS = ("id", "text", "label", "year")
SPLIT_PARTS = ("train", "dev", "test")
DEFAULT_FRACTIONS = (0.75, 0.10, 0.15)
FORMATS = ("csv", "jsonl")


@dataclass(frozen=True)
class Document:
    """One timestamped, labeled text instance."""

    id: str
    text: str
    label: str
    year: int


@dataclass(frozen=True)
class YearSlice:
    """All documents of one calendar year, in stable ingestion order."""

    year: int
    documents: tuple[Document, ...]

    def __len__(self) -> int:
        return len(self.documents)

    def label_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for doc in self.documents:
            counts[doc.label] = counts.get(doc.label, 0) + 1
        return counts


@dataclass(frozen=True)
class TemporalDataset:
    """Year-bucketed corpus; slices sorted ascending by year."""

    slices: tuple[YearSlice, ...]
    label_set: frozenset[str]

    @property
    def years(self) -> list[int]:
        return [s.year for s in self.slices]

    @property
    def n_years(self) -> int:
        return len(self.slices)

    def slice_for(self, year: int) -> YearSlice:
        for s in self.slices:
            if s.year == year:
                return s
        raise KeyError(year)


@dataclass(frozen=True)
class TemporalSplit:
    """Train/dev/test partition of one year slice."""

    year: int
    train: tuple[Document, ...]
    dev: tuple[Document, ...]
    test: tuple[Document, ...]

    def part(self, name: str) -> tuple[Document, ...]:
        if name not in SPLIT_PARTS:
            raise KeyError(name)
        return getattr(self, name)


def _extract_year(raw: object, line: int) -> int:
    """Calendar year from an integer-like value or an ISO-8601 timestamp (UTC)."""
    text = str(raw).strip()
    if not text:
        raise ParseError("empty year field", line)
    try:
        return int(text)
    except ValueError:
        pass
    try:
        stamp = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        raise ParseError(f"year field {text!r} is neither a year nor ISO-8601", line)
    if stamp.tzinfo is not None:
        stamp = stamp.astimezone(timezone.utc)
    return stamp.year


def _record_to_document(record: dict, line: int) -> Document:
    for key in ("id", "text", "label"):
        value = record.get(key)
        if value is None:
            raise ParseError(f"missing field {key!r}", line)
    doc_id = str(record["id"]).strip()
    if not doc_id:
        raise ParseError("empty id", line)
    text = str(record["text"])
    if not text.strip():
        raise ParseError("empty text", line)
    label = str(record["label"]).strip()
    if not label:
        raise ParseError("missing field 'label'", line)
    if record.get("year") is None:
        raise ParseError("missing field 'year'", line)
    year = _extract_year(record["year"], line)
    return Document(id=doc_id, text=text, label=label, year=year)


def _iter_csv(path: Path) -> Iterator[tuple[dict, int]]:
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return
        missing = [f for f in FIELDS if f not in reader.fieldnames]
        if missing:
            raise ParseError(f"header missing columns {missing}", 1)
        for row in reader:
            if row.get(None):
                raise ParseError("too many columns", reader.line_num)
            yield row, reader.line_num


def _iter_jsonl(path: Path) -> Iterator[tuple[dict, int]]:
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line_no)
            if not isinstance(record, dict):
                raise ParseError("record is not an object", line_no)
            yield record, line_no


def read_documents(path: str | Path, format: str = "csv") -> list[Document]:
    """Parse one documents file into a list, validating every record."""
    path = Path(path)
    if format not in FORMATS:
        raise ValidationError(f"unknown format {format!r}")
    rows = _iter_csv(path) if format == "csv" else _iter_jsonl(path)
    return [_record_to_document(record, line) for record, line in rows]


def ingest(path: str | Path, format: str = "csv") -> TemporalDataset:
    """Read a documents file and bucket it into year slices.

    Rejects duplicate ids and empty files; malformed records raise
    ParseError carrying the offending line number.
    """
    documents = read_documents(path, format)
    if not documents:
        raise EmptyDatasetError(f"no records in {path}")
    return dataset_from_documents(documents)


def dataset_from_documents(documents: Iterable[Document]) -> TemporalDataset:
    seen: set[str] = set()
    by_year: dict[int, list[Document]] = {}
    labels: set[str] = set()
    for doc in documents:
        if doc.id in seen:
            raise ValidationError(f"duplicate document id {doc.id!r}")
        seen.add(doc.id)
        by_year.setdefault(doc.year, []).append(doc)
        labels.add(doc.label)
    slices = tuple(
        YearSlice(year=y, documents=tuple(by_year[y])) for y in sorted(by_year)
    )
    return TemporalDataset(slices=slices, label_set=frozenset(labels))


def largest_remainder(total: int, fractions: list[float], keys: list) -> list[int]:
    """Integer apportionment of ``total`` by ``fractions``.

    Floors every quota, then hands the leftover units to the largest
    fractional remainders; ties break by ascending key.
    """
    quotas = [total * f for f in fractions]
    base = [math.floor(q) for q in quotas]
    leftover = total - sum(base)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - base[i]), keys[i]))
    for i in order[:leftover]:
        base[i] += 1
    return base


def _check_fractions(fractions: Iterable[float]) -> list[float]:
    fractions = list(fractions)
    if any(f <= 0 for f in fractions):
        raise ValidationError("fractions must be positive")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValidationError(f"fractions sum to {sum(fractions)}, expected 1")
    return fractions


def rebalance(
    slice: YearSlice,
    per_year_size: int,
    label_dist: dict[str, float],
    seed: int,
) -> YearSlice:
    """Down-sample a year slice to a fixed size and label distribution.

    Label counts follow largest-remainder rounding of
    ``per_year_size * fraction`` (ties by label lexicographic order);
    within a label the sample is uniform without replacement and
    deterministic for the seed. Ingestion order is preserved.
    """
    if per_year_size <= 0:
        raise ValidationError("per_year_size must be positive")
    labels = sorted(label_dist)
    _check_fractions(label_dist[l] for l in labels)
    targets = dict(
        zip(labels, largest_remainder(per_year_size, [label_dist[l] for l in labels], labels))
    )
    grouped: dict[str, list[int]] = {l: [] for l in labels}
    for pos, doc in enumerate(slice.documents):
        if doc.label in grouped:
            grouped[doc.label].append(pos)
    rng = np.random.RandomState(seed)
    keep: set[int] = set()
    for label in labels:
        pool = grouped[label]
        want = targets[label]
        if len(pool) < want:
            raise CapacityError(
                f"label {label!r} has {len(pool)} documents in year "
                f"{slice.year}, need {want}"
            )
        chosen = rng.permutation(len(pool))[:want]
        keep.update(pool[i] for i in chosen)
    docs = tuple(doc for pos, doc in enumerate(slice.documents) if pos in keep)
    return YearSlice(year=slice.year, documents=docs)


def stratified_split(
    slice: YearSlice,
    fractions: tuple[float, float, float] = DEFAULT_FRACTIONS,
    seed: int = 42,
) -> TemporalSplit:
    """Split one year slice into train/dev/test, stratified by label.

    Within each label stratum the documents are shuffled deterministically
    and apportioned by largest-remainder rounding (ties favour train, then
    dev). Output parts keep ingestion order.
    """
    fractions = tuple(_check_fractions(fractions))
    if len(fractions) != len(SPLIT_PARTS):
        raise ValidationError("expected three fractions (train, dev, test)")
    strata: dict[str, list[int]] = {}
    for pos, doc in enumerate(slice.documents):
        strata.setdefault(doc.label, []).append(pos)
    for label, members in sorted(strata.items()):
        if len(members) < 3:
            raise StratificationError(
                f"label {label!r} has only {len(members)} documents in year {slice.year}"
            )
    rng = np.random.RandomState(seed)
    assigned: dict[int, int] = {}
    for label in sorted(strata):
        members = strata[label]
        order = rng.permutation(len(members))
        sizes = largest_remainder(len(members), list(fractions), list(range(3)))
        cursor = 0
        for part_idx, size in enumerate(sizes):
            for k in order[cursor : cursor + size]:
                assigned[members[k]] = part_idx
            cursor += size
    parts: list[list[Document]] = [[], [], []]
    for pos, doc in enumerate(slice.documents):
        parts[assigned[pos]].append(doc)
    return TemporalSplit(
        year=slice.year,
        train=tuple(parts[0]),
        dev=tuple(parts[1]),
        test=tuple(parts[2]),
    )


def write_documents(path: str | Path, documents: Iterable[Document], format: str = "csv") -> None:
    path = Path(path)
    if format == "csv":
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(FIELDS)
            for doc in documents:
                writer.writerow([doc.id, doc.text, doc.label, doc.year])
    elif format == "jsonl":
        with path.open("w", encoding="utf-8") as fh:
            for doc in documents:
                fh.write(
                    json.dumps(
                        {"id": doc.id, "text": doc.text, "label": doc.label, "year": doc.year},
                        ensure_ascii=False,
                    )
                )
                fh.write("\n")
    else:
        raise ValidationError(f"unknown format {format!r}")


def export_split(split: TemporalSplit, out_dir: str | Path, format: str = "csv") -> list[Path]:
    """Write ``<year>.train`` / ``.dev`` / ``.test`` files for one year."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for part in SPLIT_PARTS:
        path = out_dir / f"{split.year}.{part}"
        write_documents(path, split.part(part), format)
        written.append(path)
    return written


def load_splits(split_dir: str | Path, format: str = "csv") -> list[TemporalSplit]:
    """Read every ``<year>.<part>`` file in a directory, sorted by year."""
    split_dir = Path(split_dir)
    if not split_dir.is_dir():
        raise FileNotFoundError(f"split directory {split_dir} does not exist")
    years: set[int] = set()
    for path in split_dir.iterdir():
        if path.suffix.lstrip(".") in SPLIT_PARTS and path.stem.isdigit():
            years.add(int(path.stem))
    if not years:
        raise EmptyDatasetError(f"no split files in {split_dir}")
    splits = []
    for year in sorted(years):
        parts = {}
        for part in SPLIT_PARTS:
            path = split_dir / f"{year}.{part}"
            if not path.exists():
                raise ValidationError(f"missing {path.name} in {split_dir}")
            docs = read_documents(path, format)
            for doc in docs:
                if doc.year != year:
                    raise ValidationError(
                        f"{path.name} contains document {doc.id!r} from year {doc.year}"
                    )
            parts[part] = tuple(docs)
        splits.append(TemporalSplit(year=year, **parts))
    return splits


def splits_label_set(splits: Iterable[TemporalSplit]) -> frozenset[str]:
    labels: set[str] = set()
    for split in splits:
        for part in SPLIT_PARTS:
            labels.update(doc.label for doc in split.part(part))
    return frozenset(labels)
