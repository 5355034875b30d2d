"""Seeded synthetic corpora and lexicons for tests, demos and the bundled config.

Words are pronounceable pseudo-words so they never collide with the stop-word
list or with each other. Every canonical emotion gets its own word pool, and
each schema's lexicon lists the pools of the emotions it covers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import Corpus, Document, tokenize
from .features import EmbeddingTable, load_stop_words, save_embeddings
from .lexicon import EMOTION_LABELS, Lexicon, builtin_schemas

_ONSETS = ("b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
           "br", "dr", "gl", "kr", "pl", "st", "tr", "sk")
_VOWELS = ("a", "e", "i", "o", "u", "ai", "ou")
_CODAS = ("", "n", "r", "s", "l", "k", "m")

NEWS_LABELS = ("clickbait", "hoax", "propaganda", "real", "satire")

# dominant emotion per false class, real news stays flat
DEFAULT_PROFILES: Mapping[str, Mapping[str, float]] = {
    "clickbait": {"surprise": 0.55, "anticipation": 0.15, "joy": 0.10},
    "hoax": {"hope": 0.45, "fear": 0.25, "trust": 0.10},
    "propaganda": {"joy": 0.45, "anger": 0.20, "trust": 0.15},
    "satire": {"disgust": 0.50, "sadness": 0.15, "surprise": 0.10},
    "real": {},
}


def pseudo_words(n: int, rng: np.random.Generator, min_syllables: int = 2,
                 exclude: frozenset[str] = frozenset()) -> list[str]:
    """``n`` distinct pseudo-words, none of them in ``exclude``."""
    out: list[str] = []
    seen = set(exclude)
    while len(out) < n:
        k = int(rng.integers(min_syllables, min_syllables + 2))
        w = "".join(_ONSETS[rng.integers(len(_ONSETS))] + _VOWELS[rng.integers(len(_VOWELS))]
                    for _ in range(k)) + _CODAS[rng.integers(len(_CODAS))]
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


@dataclass(frozen=True)
class SyntheticWorld:
    lexicons: list[Lexicon]
    emotion_words: dict[str, list[str]]
    filler: list[str]
    spare: list[str]   # unused words, handed out as class vocabulary


def make_world(words_per_emotion: int = 1000, n_filler: int = 600, n_spare: int = 400,
               coverage: float = 0.9, seed: int = 0) -> SyntheticWorld:
    """Emotion pools, neutral filler and lexicons over the five builtin schemas.

    Each schema keeps a random ``coverage`` share of every pool it covers, so
    the lexicons agree on emotions but not on every word.
    """
    rng = np.random.default_rng([seed, 7])
    n_total = words_per_emotion * len(EMOTION_LABELS) + n_filler + n_spare
    words = pseudo_words(n_total, rng, exclude=load_stop_words())
    pools = {e: words[i * words_per_emotion:(i + 1) * words_per_emotion]
             for i, e in enumerate(EMOTION_LABELS)}
    rest = words[len(EMOTION_LABELS) * words_per_emotion:]
    lexicons = []
    for schema in builtin_schemas():
        pairs = []
        for native in schema.emotions:
            label = schema.resolve(native)
            pool = pools[label]
            keep = rng.random(len(pool)) < coverage
            pairs.extend((w, label) for w, k in zip(pool, keep) if k)
        lexicons.append(Lexicon.from_pairs(schema, pairs))
    return SyntheticWorld(lexicons, pools, rest[:n_filler], rest[n_filler:])


def class_vocabulary(world: SyntheticWorld, labels: Sequence[str], size: int = 25,
                     seed: int = 0) -> dict[str, list[str]]:
    need = size * len(labels)
    if need > len(world.spare):
        raise ValueError(f"world has only {len(world.spare)} spare words, {need} needed")
    order = np.random.default_rng([seed, 11]).permutation(len(world.spare))
    picked = [world.spare[i] for i in order[:need]]
    return {lab: picked[i * size:(i + 1) * size] for i, lab in enumerate(sorted(labels))}


def emotion_corpus(world: SyntheticWorld, n_docs: int = 1000, seed: int = 0,
                   profiles: Mapping[str, Mapping[str, float]] = DEFAULT_PROFILES,
                   emotion_rate: float = 0.3, background_rate: float = 0.075,
                   length: tuple[int, int] = (30, 50),
                   class_vocab: Mapping[str, Sequence[str]] | None = None,
                   class_word_rate: float = 0.0, class_word_purity: float = 1.0,
                   source: str = "news_articles") -> Corpus:
    """Documents whose classes differ in how often they use each emotion's words.

    A class with a profile draws ``emotion_rate`` of its tokens from emotion
    pools, picking the emotion from its profile and spreading the leftover
    mass uniformly. An empty profile means ``background_rate`` uniform use.
    With ``class_vocab``, ``class_word_rate`` of the tokens come from a class
    word list, the document's own list with probability
    ``class_word_purity`` and another class's list otherwise.
    """
    labels = sorted(profiles)
    rng = np.random.default_rng([seed, 3])
    n_emo = len(EMOTION_LABELS)
    mix = {}
    for lab in labels:
        p = np.zeros(n_emo)
        for e, w in profiles[lab].items():
            p[EMOTION_LABELS.index(e)] = w
        p += (1.0 - p.sum()) / n_emo
        mix[lab] = p
    docs = []
    for i in range(n_docs):
        lab = labels[i % len(labels)]
        rate = emotion_rate if profiles[lab] else background_rate
        toks = []
        for _ in range(int(rng.integers(length[0], length[1] + 1))):
            u = rng.random()
            if u < rate:
                pool = world.emotion_words[EMOTION_LABELS[rng.choice(n_emo, p=mix[lab])]]
            elif class_vocab and u < rate + class_word_rate:
                own = rng.random() < class_word_purity
                other = [c for c in labels if c != lab]
                pool = class_vocab[lab if own else other[rng.integers(len(other))]]
            else:
                pool = world.filler
            toks.append(pool[rng.integers(len(pool))])
        docs.append(_document(f"syn{i:05d}", toks, lab, source))
    order = rng.permutation(n_docs)
    return Corpus([docs[j] for j in order], labels, f"synthetic emotion corpus, seed {seed}")


def _document(doc_id, toks, label, source):
    text = " ".join(toks).capitalize() + "."
    return Document(doc_id, text, label, source, tuple(tokenize(text)))


_CLICKBAIT = (
    "you will not believe what this {noun} did next",
    "{n} shocking secrets about {noun} nobody tells you",
    "this {noun} changed everything and it is amazing",
    "what happened to this {noun} is unbelievable",
    "{n} reasons your {noun} is secretly ruining your life",
    "she tried this {noun} trick and the result is incredible",
    "the stunning truth about {noun} will leave you speechless",
    "everyone is obsessed with this {noun} right now",
)
_HEADLINES = (
    "{place} council approves budget for {noun} programme",
    "officials in {place} report {n} percent rise in {noun} exports",
    "{place} court rules on {noun} regulation dispute",
    "minister outlines plan to review {noun} policy in {place}",
    "{noun} prices fall in {place} after quarterly report",
    "{place} parliament debates new {noun} legislation",
    "committee publishes findings on {noun} safety in {place}",
    "{place} agency announces inspection of {noun} facilities",
)
_NOUNS = ("dog", "phone", "kitchen", "garden", "coffee", "bicycle", "diet", "wallet",
          "camera", "sofa", "laptop", "recipe", "haircut", "vacation", "wedding", "car",
          "grain", "steel", "timber", "fishing", "housing", "railway", "energy", "water")
_PLACES = ("Denver", "Lisbon", "Osaka", "Nairobi", "Quebec", "Leeds", "Perth", "Bergen",
           "Tallinn", "Cordoba", "Dakar", "Hanoi")


def clickbait_corpus(n_docs: int = 400, seed: int = 0) -> Corpus:
    """Headlines in two separable styles, labels ``clickbait`` and ``news``."""
    rng = np.random.default_rng([seed, 5])
    docs = []
    for i in range(n_docs):
        lab = "clickbait" if i % 2 == 0 else "news"
        tmpl = (_CLICKBAIT if lab == "clickbait" else _HEADLINES)
        text = tmpl[rng.integers(len(tmpl))].format(
            noun=_NOUNS[rng.integers(len(_NOUNS))], place=_PLACES[rng.integers(len(_PLACES))],
            n=int(rng.integers(3, 20)))
        text = text[0].upper() + text[1:]
        docs.append(Document(f"hl{i:05d}", text, lab, "twitter", tuple(tokenize(text))))
    order = rng.permutation(n_docs)
    return Corpus([docs[j] for j in order], ["clickbait", "news"],
                  f"synthetic headline corpus, seed {seed}")


def write_lexicons(world: SyntheticWorld, directory) -> dict[str, Path]:
    """One ``<schema>.tsv`` per lexicon; returns schema name -> path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = {}
    for lex in world.lexicons:
        path = directory / f"{lex.name.lower()}.tsv"
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"#schema: {lex.name}\n")
            for word in sorted(lex.entries):
                for emo in sorted(lex.entries[word]):
                    fh.write(f"{word}\t{emo}\n")
        out[lex.name] = path
    return out


def make_embeddings(world: SyntheticWorld, dim: int = 16, noise: float = 0.5,
                    seed: int = 0) -> EmbeddingTable:
    """Vectors where each emotion pool clusters around its own centroid.

    Filler and spare words get isotropic noise only, so averaged document
    vectors carry the emotion signal and little else.
    """
    rng = np.random.default_rng([seed, 17])
    words, rows = [], []
    for emo in EMOTION_LABELS:
        centre = rng.normal(0.0, 1.0, dim)
        for w in world.emotion_words[emo]:
            words.append(w)
            rows.append(centre + rng.normal(0.0, noise, dim))
    for w in world.filler + world.spare:
        words.append(w)
        rows.append(rng.normal(0.0, noise, dim))
    return EmbeddingTable(words, np.array(rows))


def write_demo_bundle(directory, seed: int = 0, n_docs: int = 300) -> dict[str, Path]:
    """Corpus, lexicons, word vectors, two word lists and a second corpus for the demo config."""
    from .corpus import save_corpus

    directory = Path(directory)
    world = make_world(words_per_emotion=60, n_filler=300, n_spare=200, seed=seed)
    paths = {f"lexicon.{k}": v for k, v in write_lexicons(world, directory / "lexicons").items()}
    vocab = class_vocabulary(world, NEWS_LABELS, size=20, seed=seed)
    corpus = emotion_corpus(world, n_docs, seed=seed, class_vocab=vocab, class_word_rate=0.1,
                            class_word_purity=0.6)
    paths["corpus"] = directory / "corpus.jsonl"
    save_corpus(corpus, paths["corpus"])
    # the second corpus leans on a different slice of the filler vocabulary
    hedges, boosters = world.filler[:15], world.filler[15:30]
    tilted = SyntheticWorld(world.lexicons, world.emotion_words, world.filler[10:], world.spare)
    other = emotion_corpus(tilted, n_docs // 2, seed=seed + 1, source="twitter", length=(8, 20))
    paths["embeddings"] = directory / "embeddings.txt"
    save_embeddings(make_embeddings(world, seed=seed), paths["embeddings"])
    paths["other"] = directory / "tweets.jsonl"
    save_corpus(other, paths["other"])
    for name, words in (("hedges", hedges), ("boosters", boosters)):
        paths[f"wordlist.{name}"] = directory / f"{name}.txt"
        paths[f"wordlist.{name}"].write_text(
            f"# synthetic word list, seed {seed}\n" + "\n".join(sorted(words)) + "\n", encoding="utf-8")
    return paths
