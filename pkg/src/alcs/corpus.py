"""Labeled text corpora and deterministic cross-validation folds.

A corpus is an ordered list of documents with string labels mapped to dense
integer class ids in first-appearance order.  Fold plans are stratified and
fully determined by (corpus, n_folds, seed), so every experiment can be
replayed byte-for-byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "CorpusError",
    "CorpusParseError",
    "EmptyCorpusError",
    "Document",
    "Corpus",
    "FoldPlan",
    "load_corpus",
    "make_folds",
    "fold_split",
]


class CorpusError(Exception):
    """Base class for corpus loading/validation failures."""


class CorpusParseError(CorpusError):
    """A record could not be parsed; the message names the offending line."""


class EmptyCorpusError(CorpusError):
    """The input file contained no records."""


@dataclass(frozen=True)
class Document:
    id: int
    text: str
    label: str


@dataclass(frozen=True)
class Corpus:
    """Ordered documents plus the class-string -> dense-id bijection."""

    documents: tuple[Document, ...]
    label_table: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.label_table) < 2:
            raise CorpusError(
                "corpus has fewer than 2 classes (%d)" % len(self.label_table)
            )
        for doc in self.documents:
            if doc.label not in self.label_table:
                raise CorpusError("document %d has unmapped label %r" % (doc.id, doc.label))

    @property
    def n_docs(self) -> int:
        return len(self.documents)

    @property
    def n_classes(self) -> int:
        return len(self.label_table)

    def texts(self) -> list[str]:
        return [d.text for d in self.documents]

    def labels(self) -> np.ndarray:
        """Dense integer class ids, aligned with document order."""
        return np.array([self.label_table[d.label] for d in self.documents], dtype=np.int64)

    def class_names(self) -> list[str]:
        """Class strings ordered by their dense id."""
        inverse = {i: name for name, i in self.label_table.items()}
        return [inverse[i] for i in range(self.n_classes)]


@dataclass(frozen=True)
class FoldPlan:
    """Per-document fold assignment; regenerating with the same seed is identical."""

    n_folds: int
    assignments: np.ndarray
    seed: int

    def fold_sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.n_folds)

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_folds": self.n_folds,
                "seed": self.seed,
                "assignments": self.assignments.tolist(),
            },
            sort_keys=True,
        )


def _build_corpus(records: list[tuple[str, str]]) -> Corpus:
    label_table: dict[str, int] = {}
    documents = []
    for i, (text, label) in enumerate(records):
        if label not in label_table:
            label_table[label] = len(label_table)
        documents.append(Document(id=i, text=text, label=label))
    return Corpus(documents=tuple(documents), label_table=label_table)


def _parse_jsonl(path: Path) -> list[tuple[str, str]]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusParseError("line %d: invalid JSON (%s)" % (lineno, exc)) from exc
            if not isinstance(obj, dict):
                raise CorpusParseError("line %d: record is not an object" % lineno)
            text = obj.get("text")
            label = obj.get("label")
            if not isinstance(text, str) or not text.strip():
                raise CorpusParseError("line %d: missing or empty 'text'" % lineno)
            if not isinstance(label, str) or not label:
                raise CorpusParseError("line %d: missing or empty 'label'" % lineno)
            records.append((text, label))
    return records


def _parse_tsv(path: Path) -> list[tuple[str, str]]:
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorpusParseError(
                    "line %d: expected 2 tab-separated columns, got %d" % (lineno, len(parts))
                )
            text, label = parts
            if not text.strip():
                raise CorpusParseError("line %d: empty text column" % lineno)
            if not label:
                raise CorpusParseError("line %d: empty label column" % lineno)
            records.append((text, label))
    return records


def load_corpus(path: str | Path, format: str = "jsonl") -> Corpus:
    """Load a labeled corpus from JSONL ({"text","label"} per line) or TSV.

    Document ids are assigned by record order; the label table maps class
    strings to dense ids in first-appearance order.
    """
    path = Path(path)
    if format == "jsonl":
        records = _parse_jsonl(path)
    elif format == "tsv":
        records = _parse_tsv(path)
    else:
        raise ValueError("unknown corpus format %r (expected 'jsonl' or 'tsv')" % format)
    if not records:
        raise EmptyCorpusError("no records in %s" % path)
    return _build_corpus(records)


def make_folds(corpus: Corpus, n_folds: int, seed: int) -> FoldPlan:
    """Build a stratified fold plan.

    Per class, documents are shuffled by the seeded RNG and dealt round-robin;
    dealing continues across classes so fold sizes differ by at most one and
    per-class fold counts differ by at most one.
    """
    if n_folds < 2:
        raise ValueError("n_folds must be >= 2, got %d" % n_folds)
    if n_folds > corpus.n_docs:
        raise ValueError(
            "n_folds=%d exceeds corpus size %d" % (n_folds, corpus.n_docs)
        )
    labels = corpus.labels()
    rng = np.random.default_rng(seed)
    assignments = np.empty(corpus.n_docs, dtype=np.int64)
    offset = 0
    for cls in range(corpus.n_classes):
        members = np.flatnonzero(labels == cls)
        perm = rng.permutation(len(members))
        for j, p in enumerate(perm):
            assignments[members[p]] = (offset + j) % n_folds
        offset += len(members)
    return FoldPlan(n_folds=n_folds, assignments=assignments, seed=seed)


def fold_split(corpus: Corpus, plan: FoldPlan, fold: int) -> tuple[list[int], list[int]]:
    """Return (pool_ids, test_ids) for one fold, both in corpus order."""
    if not 0 <= fold < plan.n_folds:
        raise ValueError("fold %d out of range for %d-fold plan" % (fold, plan.n_folds))
    if len(plan.assignments) != corpus.n_docs:
        raise ValueError("fold plan covers %d documents, corpus has %d"
                         % (len(plan.assignments), corpus.n_docs))
    test_mask = plan.assignments == fold
    test_ids = [int(i) for i in np.flatnonzero(test_mask)]
    pool_ids = [int(i) for i in np.flatnonzero(~test_mask)]
    return pool_ids, test_ids
