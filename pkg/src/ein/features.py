"""Document representations: lexicon emotion vectors, bag-of-words, averaged embeddings.

Also holds the word-list "mean value" statistic (listed-word frequency
normalized by document length).
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .corpus import Corpus, Document
from .lexicon import Lexicon


class FeatureError(ValueError):
    pass


def _tokens(doc) -> Sequence[str]:
    return doc.tokens if isinstance(doc, Document) else doc


def load_stop_words(path=None) -> frozenset[str]:
    if path is None:
        text = resources.files("ein").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines()
                     if w.strip() and not w.startswith("#"))


# ---------------------------------------------------------------------------
# emotion vectors

@dataclass(frozen=True)
class EmotionVector:
    values: np.ndarray
    layout: tuple[tuple[str, str], ...]

    def __len__(self):
        return len(self.layout)

    @property
    def names(self) -> list[str]:
        return [f"{lex}:{emo}" for lex, emo in self.layout]


def emotion_layout(lexicons: Sequence[Lexicon]) -> tuple[tuple[str, str], ...]:
    return tuple((lex.name, emo) for lex in lexicons for emo in lex.schema.emotions)


def feature_names(lexicons: Sequence[Lexicon]) -> list[str]:
    return [f"{lex}:{emo}" for lex, emo in emotion_layout(lexicons)]


def feature_dimension(lexicons: Sequence[Lexicon]) -> int:
    return sum(lex.schema.dimension for lex in lexicons)


def emotion_features(doc, lexicons: Sequence[Lexicon],
                     stop_words: Iterable[str] | None = None) -> EmotionVector:
    """Per (lexicon, emotion): count of tokens carrying that emotion / token count.

    A token tagged with several emotions in one lexicon counts once for each.
    With ``stop_words`` the listed tokens are excluded from numerator and
    denominator alike.
    """
    tokens = _tokens(doc)
    if stop_words is not None:
        stop = frozenset(stop_words)
        tokens = [t for t in tokens if t not in stop]
    layout = emotion_layout(lexicons)
    values = np.zeros(len(layout))
    if not tokens:
        return EmotionVector(values, layout)
    counts = Counter(tokens)
    offset = 0
    for lex in lexicons:
        index = {e: offset + k for k, e in enumerate(lex.schema.emotions)}
        for tok, n in counts.items():
            for emo in lex.lookup(tok):
                values[index[emo]] += n
        offset += lex.schema.dimension
    values /= len(tokens)
    return EmotionVector(values, layout)


def emotion_matrix(docs: Iterable, lexicons: Sequence[Lexicon],
                   stop_words: Iterable[str] | None = None) -> np.ndarray:
    rows = [emotion_features(d, lexicons, stop_words).values for d in docs]
    if not rows:
        return np.zeros((0, feature_dimension(lexicons)))
    return np.vstack(rows)


def write_feature_csv(path, ids: Sequence[str], matrix: np.ndarray, names: Sequence[str],
                      labels: Sequence[str] | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id"] + (["label"] if labels is not None else []) + list(names))
        for i, row in enumerate(matrix):
            lead = [ids[i]] + ([labels[i]] if labels is not None else [])
            w.writerow(lead + [repr(float(v)) for v in row])


# ---------------------------------------------------------------------------
# bag of words

def fit_vocabulary(docs: Iterable, min_df: int = 1, max_vocab: int | None = None) -> list[str]:
    """Most frequent tokens (total count) among those with document frequency >= min_df.

    Ties break lexicographically.
    """
    tf: Counter = Counter()
    df: Counter = Counter()
    for d in docs:
        toks = _tokens(d)
        tf.update(toks)
        df.update(set(toks))
    eligible = [t for t in tf if df[t] >= min_df]
    eligible.sort(key=lambda t: (-tf[t], t))
    if max_vocab is not None:
        eligible = eligible[:max_vocab]
    if not eligible:
        raise FeatureError("empty vocabulary")
    return eligible


def bow_transform(docs: Iterable, vocabulary: Sequence[str]) -> sparse.csr_matrix:
    index = {w: i for i, w in enumerate(vocabulary)}
    data, cols, indptr = [], [], [0]
    for d in docs:
        counts = Counter(index[t] for t in _tokens(d) if t in index)
        for j in sorted(counts):
            cols.append(j)
            data.append(counts[j])
        indptr.append(len(cols))
    return sparse.csr_matrix((np.array(data, dtype=float), np.array(cols, dtype=np.int64),
                              np.array(indptr, dtype=np.int64)),
                             shape=(len(indptr) - 1, len(vocabulary)))


def bow_features(corpus, min_df: int = 1,
                 max_vocab: int | None = None) -> tuple[list[str], sparse.csr_matrix]:
    docs = list(corpus)
    vocab = fit_vocabulary(docs, min_df, max_vocab)
    return vocab, bow_transform(docs, vocab)


# ---------------------------------------------------------------------------
# embeddings

class EmbeddingTable:
    """Word vectors of a common dimension plus a designated OOV vector."""

    def __init__(self, words: Sequence[str], vectors: np.ndarray, oov: np.ndarray | None = None):
        vectors = np.asarray(vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[0] != len(words):
            raise FeatureError("vectors must be a (vocab, dim) matrix matching words")
        if vectors.shape[1] < 1:
            raise FeatureError("embedding dimension must be >= 1")
        self.words = list(words)
        self.vectors = vectors
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise FeatureError("duplicate words in embedding table")
        self.oov = np.zeros(self.dimension) if oov is None else np.asarray(oov, dtype=float)

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def get(self, word: str):
        i = self.index.get(word)
        return None if i is None else self.vectors[i]

    def coverage(self, docs: Iterable) -> float:
        """Fraction of token occurrences found in the table."""
        total = hit = 0
        for d in docs:
            for t in _tokens(d):
                total += 1
                hit += t in self.index
        return hit / total if total else 0.0


def load_embeddings(path, vocabulary: Iterable[str] | None = None) -> EmbeddingTable:
    """Read ``<vocab_size> <dimension>`` then ``word v1 ... vd`` lines.

    ``vocabulary`` restricts loading to the given words, which keeps large
    pretrained files manageable.
    """
    keep = None if vocabulary is None else set(vocabulary)
    words, rows = [], []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise FeatureError(f"{path}:1: expected '<vocab_size> <dimension>'")
        size, dim = int(header[0]), int(header[1])
        for line_no, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").rstrip(" ").split(" ")
            if len(parts) == 1 and not parts[0]:
                continue
            if len(parts) != dim + 1:
                raise FeatureError(f"{path}:{line_no}: expected {dim} values, got {len(parts) - 1}")
            if keep is not None and parts[0] not in keep:
                continue
            words.append(parts[0])
            rows.append([float(v) for v in parts[1:]])
    if keep is None and len(words) != size:
        raise FeatureError(f"{path}: header announces {size} words, found {len(words)}")
    return EmbeddingTable(words, np.array(rows, dtype=float).reshape(len(words), dim))


def save_embeddings(table: EmbeddingTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table)} {table.dimension}\n")
        for w, v in zip(table.words, table.vectors):
            fh.write(w + " " + " ".join(repr(float(x)) for x in v) + "\n")


def avg_embedding(doc, table: EmbeddingTable, skip_oov: bool = True) -> np.ndarray:
    vecs = []
    for t in _tokens(doc):
        v = table.get(t)
        if v is not None:
            vecs.append(v)
        elif not skip_oov:
            vecs.append(table.oov)
    if not vecs:
        return np.zeros(table.dimension)
    return np.mean(vecs, axis=0)


def avg_embedding_matrix(docs: Iterable, table: EmbeddingTable, skip_oov: bool = True) -> np.ndarray:
    rows = [avg_embedding(d, table, skip_oov) for d in docs]
    return np.vstack(rows) if rows else np.zeros((0, table.dimension))


# ---------------------------------------------------------------------------
# word-list mean value

@dataclass(frozen=True)
class WordList:
    name: str
    words: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "words", frozenset(w.lower() for w in self.words))


def load_wordlist(path, name: str | None = None) -> WordList:
    path = Path(path)
    words = [w.strip() for w in path.read_text("utf-8").splitlines()
             if w.strip() and not w.startswith("#")]
    if not words:
        raise FeatureError(f"word list {path} is empty")
    return WordList(name or path.stem, frozenset(words))


def lexical_mean_value(doc, wordlist: WordList) -> float:
    tokens = _tokens(doc)
    if not tokens:
        return 0.0
    return sum(t in wordlist.words for t in tokens) / len(tokens)


def corpus_mean_value(docs: Iterable, wordlist: WordList) -> float:
    """Unweighted mean of per-document ratios."""
    vals = [lexical_mean_value(d, wordlist) for d in docs]
    return float(np.mean(vals)) if vals else 0.0
