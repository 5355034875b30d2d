"""Corpus ingestion, tokenization, cleaning and splitting."""

from __future__ import annotations

import csv
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SOURCES = ("news_articles", "twitter", "other")
REQUIRED_FIELDS = ("id", "text", "label", "source")

# "very short" thresholds applied when the caller gives no explicit minimum
DEFAULT_MIN_TOKENS = {"news_articles": 20, "twitter": 5, "other": 5}

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*")


class CorpusError(ValueError):
    pass


class CorpusFormatError(CorpusError):
    def __init__(self, record: int, message: str):
        self.record = record
        super().__init__(f"record {record}: {message}")


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric runs; apostrophes survive only inside a word; URLs dropped."""
    text = _URL_RE.sub(" ", text.replace("’", "'"))
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    label: str
    source: str = "other"
    tokens: tuple[str, ...] = None

    def __post_init__(self):
        if self.tokens is None:
            object.__setattr__(self, "tokens", tuple(tokenize(self.text)))
        elif not isinstance(self.tokens, tuple):
            object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.source not in SOURCES:
            raise CorpusError(f"document {self.id}: unknown source {self.source!r}")

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    labels: tuple[str, ...] = None
    provenance: str = ""

    def __post_init__(self):
        docs = tuple(self.documents)
        object.__setattr__(self, "documents", docs)
        seen = tuple(sorted({d.label for d in docs}))
        if self.labels is None:
            object.__setattr__(self, "labels", seen)
        else:
            labels = tuple(sorted(self.labels))
            object.__setattr__(self, "labels", labels)
            stray = set(seen) - set(labels)
            if stray:
                raise CorpusError(f"labels {sorted(stray)} not in declared label set")

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __getitem__(self, i):
        return self.documents[i]

    def subset(self, indices: Iterable[int]) -> "Corpus":
        return Corpus(tuple(self.documents[i] for i in indices), self.labels, self.provenance)

    @property
    def y(self) -> list[str]:
        return [d.label for d in self.documents]


@dataclass(frozen=True)
class SplitSpec:
    test_fraction: float = 0.2
    validation_fraction: float = 0.2
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        for name in ("test_fraction", "validation_fraction"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise CorpusError(f"{name} must lie in (0, 1), got {v}")
        implied_val = (1 - self.test_fraction) * self.validation_fraction
        if self.test_fraction + implied_val >= 1.0:
            raise CorpusError("test and validation fractions leave no training data")


@dataclass
class PreprocessReport:
    input_documents: int
    output_documents: int
    truncated: int
    removed: dict = field(default_factory=lambda: {"empty": 0, "too_short": 0, "duplicate": 0})

    def to_dict(self) -> dict:
        return {
            "input_documents": self.input_documents,
            "output_documents": self.output_documents,
            "truncated": self.truncated,
            "removed": dict(self.removed),
        }


def _record_to_document(rec, index: int) -> Document:
    if not isinstance(rec, dict):
        raise CorpusFormatError(index, "expected an object")
    for name in REQUIRED_FIELDS:
        if name not in rec or rec[name] is None:
            raise CorpusFormatError(index, f"missing field {name!r}")
        if not isinstance(rec[name], str):
            raise CorpusFormatError(index, f"field {name!r} must be a string")
    try:
        return Document(rec["id"], rec["text"], rec["label"], rec["source"])
    except CorpusError as exc:
        raise CorpusFormatError(index, str(exc)) from None


def load_corpus(path, format: str | None = None) -> Corpus:
    """Read a JSONL or CSV corpus. Record indices in errors are 1-based."""
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    docs = []
    if fmt == "jsonl":
        with path.open(encoding="utf-8") as fh:
            index = 0
            for line in fh:
                if not line.strip():
                    continue
                index += 1
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusFormatError(index, f"invalid JSON ({exc.msg})") from None
                docs.append(_record_to_document(rec, index))
    elif fmt == "csv":
        with path.open(encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            missing = [f for f in REQUIRED_FIELDS if f not in (reader.fieldnames or [])]
            if missing:
                raise CorpusFormatError(0, f"CSV header lacks {missing}")
            for index, rec in enumerate(reader, start=1):
                docs.append(_record_to_document(rec, index))
    else:
        raise CorpusError(f"unknown corpus format {fmt!r} (expected jsonl or csv)")
    return Corpus(tuple(docs), provenance=str(path))


def save_corpus(corpus: Corpus, path, format: str | None = None) -> None:
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    rows = [{"id": d.id, "text": d.text, "label": d.label, "source": d.source} for d in corpus]
    if fmt == "jsonl":
        with path.open("w", encoding="utf-8") as fh:
            for r in rows:
                fh.write(json.dumps(r, ensure_ascii=False) + "\n")
    elif fmt == "csv":
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(REQUIRED_FIELDS))
            writer.writeheader()
            writer.writerows(rows)
    else:
        raise CorpusError(f"unknown corpus format {fmt!r}")


def preprocess(corpus: Corpus, max_tokens: int = 300, min_tokens: int | None = None,
               dedup: bool = True) -> tuple[Corpus, PreprocessReport]:
    """Truncate, drop short and empty documents, and remove exact duplicates.

    ``min_tokens=None`` applies the per-source defaults in DEFAULT_MIN_TOKENS.
    Duplicates are judged on the truncated token sequence; the first wins.
    """
    if min_tokens is not None and not 1 <= min_tokens <= max_tokens:
        raise CorpusError("require max_tokens >= min_tokens >= 1")
    report = PreprocessReport(len(corpus), 0, 0)
    seen: set[tuple[str, ...]] = set()
    kept = []
    for doc in corpus:
        tokens = doc.tokens
        if len(tokens) > max_tokens:
            tokens = tokens[:max_tokens]
            report.truncated += 1
        if not tokens:
            report.removed["empty"] += 1
            continue
        floor = min_tokens if min_tokens is not None else min(DEFAULT_MIN_TOKENS[doc.source], max_tokens)
        if len(tokens) < floor:
            report.removed["too_short"] += 1
            continue
        if dedup:
            if tokens in seen:
                report.removed["duplicate"] += 1
                continue
            seen.add(tokens)
        kept.append(replace(doc, tokens=tokens) if tokens is not doc.tokens else doc)
    report.output_documents = len(kept)
    return Corpus(tuple(kept), corpus.labels, corpus.provenance), report


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5 + 1e-9))


def _controlled_rounding(counts: list[int], part_sizes: list[int]) -> np.ndarray:
    """Integer class x part table with the given margins, each cell the floor or ceil of its quota.

    Such a rounding always exists; it is found as a unit-capacity flow from
    classes with leftover documents to parts with leftover slots.
    """
    total = sum(counts)
    quota = np.array([[n * s / total for s in part_sizes] for n in counts])
    table = np.floor(quota + 1e-9).astype(int)
    frac = quota - table
    row_left = [n - int(table[i].sum()) for i, n in enumerate(counts)]
    col_left = [s - int(table[:, j].sum()) for j, s in enumerate(part_sizes)]
    used = np.zeros_like(table, dtype=bool)
    n_rows, n_cols = table.shape

    def augment(i, seen_cols):
        for j in sorted(range(n_cols), key=lambda j: -frac[i, j]):
            if frac[i, j] <= 1e-9 or used[i, j] or j in seen_cols:
                continue
            seen_cols.add(j)
            if col_left[j] > 0:
                col_left[j] -= 1
                used[i, j] = True
                return True
            # reroute a unit currently sent by another row into column j
            for k in range(n_rows):
                if used[k, j] and augment_from(k, j, seen_cols):
                    used[i, j] = True
                    return True
        return False

    def augment_from(k, j_old, seen_cols):
        # row k gives up column j_old if it can place its unit elsewhere
        if augment(k, seen_cols):
            used[k, j_old] = False
            return True
        return False

    for i in range(n_rows):
        while row_left[i] > 0:
            if not augment(i, set()):
                raise CorpusError("could not balance stratified split")
            row_left[i] -= 1
    return table + used.astype(int)


def _part_sizes(n: int, spec: SplitSpec) -> list[int]:
    n_test = _round_half_up(n * spec.test_fraction)
    n_val = _round_half_up((n - n_test) * spec.validation_fraction)
    return [n - n_test - n_val, n_val, n_test]


def split(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus, Corpus]:
    """Partition into (train, validation, test); documents keep corpus order within each part.

    Test takes ``round(N * test_fraction)`` documents and validation takes
    ``round(rest * validation_fraction)`` of what is left.
    """
    rng = np.random.default_rng(spec.seed)
    sizes = _part_sizes(len(corpus), spec)
    parts: list[list[int]] = [[], [], []]
    if spec.stratified:
        groups: dict[str, list[int]] = {}
        for i, d in enumerate(corpus):
            groups.setdefault(d.label, []).append(i)
        classes = sorted(groups)
        for c in classes:
            if len(groups[c]) < 3:
                raise CorpusError(
                    f"class {c!r} has {len(groups[c])} documents; stratified split needs >= 3")
        table = _controlled_rounding([len(groups[c]) for c in classes], sizes)
        for row, c in enumerate(classes):
            ix = [groups[c][j] for j in rng.permutation(len(groups[c]))]
            train_n, val_n, _ = table[row]
            parts[0] += ix[:train_n]
            parts[1] += ix[train_n:train_n + val_n]
            parts[2] += ix[train_n + val_n:]
    else:
        order = [int(i) for i in rng.permutation(len(corpus))]
        parts[2] = order[:sizes[2]]
        parts[1] = order[sizes[2]:sizes[2] + sizes[1]]
        parts[0] = order[sizes[2] + sizes[1]:]
    train, val, test = (corpus.subset(sorted(p)) for p in parts)
    return train, val, test


def kfold_indices(labels: Sequence[str], k: int = 10, seed: int = 0,
                  stratified: bool = True) -> list[np.ndarray]:
    """Test-fold index arrays; fold i receives every k-th item of the (class-grouped) shuffle."""
    n = len(labels)
    if k < 2:
        raise CorpusError("k must be >= 2")
    if k > n:
        raise CorpusError(f"k={k} exceeds corpus size {n}")
    rng = np.random.default_rng(seed)
    if stratified:
        counts = Counter(labels)
        for c in sorted(counts):
            if counts[c] < k:
                raise CorpusError(f"class {c!r} has {counts[c]} documents; {k}-fold needs >= {k}")
        order = []
        for c in sorted(counts):
            ix = [i for i, lab in enumerate(labels) if lab == c]
            order.extend(ix[j] for j in rng.permutation(len(ix)))
    else:
        order = [int(i) for i in rng.permutation(n)]
    folds = [[] for _ in range(k)]
    for pos, i in enumerate(order):
        folds[pos % k].append(i)
    return [np.array(sorted(f), dtype=int) for f in folds]


def kfold(corpus: Corpus, k: int = 10, seed: int = 0,
          stratified: bool = True) -> list[tuple[Corpus, Corpus]]:
    folds = kfold_indices(corpus.y, k, seed, stratified)
    out = []
    for test_ix in folds:
        mask = np.ones(len(corpus), dtype=bool)
        mask[test_ix] = False
        out.append((corpus.subset(np.flatnonzero(mask)), corpus.subset(test_ix)))
    return out


def corpus_stats(corpus: Corpus) -> dict:
    counts = Counter(corpus.y)
    total = len(corpus)
    classes = {
        c: {"count": counts[c], "percent": round(100.0 * counts[c] / total, 2)}
        for c in sorted(counts)
    }
    return {"total": total, "classes": classes}
