"""Emotion lexicons: the canonical label registry, the five schemas, and loading.

Lexicon files are UTF-8 text::

    #schema: EmoLex
    # free comment
    happy<TAB>joy
    happy<TAB>trust

The emotion column may hold either the schema's native category name (for
instance ``positive emotion`` for LIWC) or the canonical label it maps to.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

EMOTION_LABELS: tuple[str, ...] = (
    "joy", "sadness", "anger", "fear", "disgust", "surprise", "anticipation",
    "trust", "love", "hope", "calmness", "despair", "hate", "like",
    "pos_emo", "neg_emo", "ambiguous",
)

SCHEMA_DIMENSIONS: Mapping[str, int] = MappingProxyType({
    "EmoSenticNet": 6,
    "EmoLex": 8,
    "SentiSense": 14,
    "LIWC": 4,
    "Empath": 6,
})

_SCHEMA_HEADER = "#schema:"


class LexiconError(ValueError):
    """Base class for lexicon loading failures."""


class LexiconParseError(LexiconError):
    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class LexiconValidationError(LexiconError):
    def __init__(self, message: str, emotion: str | None = None):
        self.emotion = emotion
        super().__init__(message)


@dataclass(frozen=True)
class LexiconSchema:
    name: str
    emotions: tuple[str, ...]
    # native category name -> canonical label
    aliases: Mapping[str, str] = field(default_factory=dict, compare=False, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.emotions)

    def resolve(self, emotion: str) -> str | None:
        """Map a native or canonical emotion name onto this schema's label, if any."""
        key = emotion.strip().lower()
        if key in self.aliases:
            return self.aliases[key]
        if key in self.emotions:
            return key
        return None


def _read_schema_table(path=None) -> dict:
    if path is None:
        text = resources.files("ein").joinpath("data/schemas.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return json.loads(text)


def builtin_schemas(mapping_path=None) -> list[LexiconSchema]:
    """Return the five schemas in the fixed order EmoSenticNet, EmoLex, SentiSense, LIWC, Empath.

    ``mapping_path`` points at an alternative native-name table with the same
    layout as the packaged ``data/schemas.json``.
    """
    table = _read_schema_table(mapping_path)
    schemas = []
    for name in table["order"]:
        native = {k.lower(): v for k, v in table["schemas"][name].items()}
        emotions = tuple(native.values())
        unknown = [e for e in emotions if e not in EMOTION_LABELS]
        if unknown:
            raise LexiconValidationError(
                f"schema {name} maps to unknown label(s) {unknown}", unknown[0])
        if len(set(emotions)) != len(emotions):
            raise LexiconValidationError(f"schema {name} maps two categories onto one label")
        expected = SCHEMA_DIMENSIONS.get(name)
        if expected is not None and expected != len(emotions):
            raise LexiconValidationError(
                f"schema {name} must have {expected} emotions, table lists {len(emotions)}")
        schemas.append(LexiconSchema(name, emotions, MappingProxyType(native)))
    return schemas


def get_schema(name: str, mapping_path=None) -> LexiconSchema:
    for schema in builtin_schemas(mapping_path):
        if schema.name.lower() == name.lower():
            return schema
    raise KeyError(f"unknown lexicon schema: {name!r}")


@dataclass(frozen=True)
class Lexicon:
    schema: LexiconSchema
    entries: Mapping[str, frozenset[str]]

    def __post_init__(self):
        allowed = set(self.schema.emotions)
        for word, emotions in self.entries.items():
            if word != word.lower() or not word or any(c.isspace() for c in word):
                raise LexiconValidationError(f"invalid lexicon key {word!r}")
            if not emotions:
                raise LexiconValidationError(f"empty emotion set for {word!r}")
            bad = sorted(set(emotions) - allowed)
            if bad:
                raise LexiconValidationError(
                    f"emotion {bad[0]!r} is not part of schema {self.schema.name}", bad[0])

    @property
    def name(self) -> str:
        return self.schema.name

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, Lexicon):
            return NotImplemented
        return self.schema == other.schema and dict(self.entries) == dict(other.entries)

    def __hash__(self):
        return hash((self.schema, frozenset(self.entries.items())))

    def lookup(self, token: str) -> frozenset[str]:
        return self.entries.get(token.lower(), frozenset())

    @classmethod
    def from_pairs(cls, schema: LexiconSchema, pairs: Iterable[tuple[str, str]]) -> "Lexicon":
        """Build a lexicon from (word, emotion) pairs, resolving native names."""
        acc: dict[str, set[str]] = {}
        for word, emotion in pairs:
            label = schema.resolve(emotion)
            if label is None:
                raise LexiconValidationError(
                    f"emotion {emotion!r} is not part of schema {schema.name}", emotion)
            acc.setdefault(word.lower(), set()).add(label)
        return cls(schema, MappingProxyType({w: frozenset(e) for w, e in acc.items()}))


def load_lexicon(path, schema: LexiconSchema) -> Lexicon:
    """Parse a lexicon file and validate every entry against ``schema``.

    A file with no entries and no header yields an empty lexicon; any file
    carrying entries must declare ``#schema: <name>`` matching ``schema``.
    """
    path = Path(path)
    pairs: list[tuple[str, str]] = []
    declared = None
    with path.open(encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                if line.lower().startswith(_SCHEMA_HEADER):
                    declared = line[len(_SCHEMA_HEADER):].strip()
                    if declared.lower() != schema.name.lower():
                        raise LexiconParseError(
                            path, line_no,
                            f"schema header {declared!r} does not match {schema.name!r}")
                continue
            if declared is None:
                raise LexiconParseError(path, line_no, "missing '#schema: <name>' header")
            parts = line.split("\t")
            if len(parts) != 2:
                raise LexiconParseError(path, line_no, "expected 'word<TAB>emotion'")
            word, emotion = parts[0].strip(), parts[1].strip()
            if not word or not emotion:
                raise LexiconParseError(path, line_no, "empty word or emotion")
            if any(c.isspace() for c in word):
                raise LexiconParseError(path, line_no, f"multi-word entry {word!r} not supported")
            if schema.resolve(emotion) is None:
                raise LexiconValidationError(
                    f"{path}:{line_no}: emotion {emotion!r} is not part of schema {schema.name}",
                    emotion)
            pairs.append((word, emotion))
    return Lexicon.from_pairs(schema, pairs)


def lookup(lexicon: Lexicon, token: str) -> frozenset[str]:
    return lexicon.lookup(token)


def lexicon_dimension(lexicon: Lexicon) -> int:
    return lexicon.schema.dimension


def builtin_lexicons() -> list[Lexicon]:
    """Load the small synthetic sample lexicons shipped with the package."""
    out = []
    base = resources.files("ein").joinpath("data/lexicons")
    for schema in builtin_schemas():
        with resources.as_file(base.joinpath(f"{schema.name.lower()}.tsv")) as p:
            out.append(load_lexicon(p, schema))
    return out
