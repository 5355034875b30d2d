"""Experiment configuration files.

Grammar, one setting per line::

    # comment (also allowed after a value, preceded by whitespace)
    key = value

Keys are dotted lowercase names, except that lexicon keys keep the schema
name (``lexicon.EmoLex = lexicons/emolex.tsv``). Blank lines are ignored, a
key may appear once, and relative paths resolve against the config file's
directory. ``seed`` is mandatory.

Recognised keys (defaults in brackets):

    seed                                  integer, required
    output.dir                            [runs/<config name>]
    corpus.path, corpus.format            path required; format jsonl|csv [from suffix]
    lexicon.<Schema>                      lexicon file for one of the five schemas
    embeddings.path                       optional word-vector text file
    preprocess.max_tokens                 [300]
    preprocess.min_tokens                 [per-source default]
    preprocess.dedup                      [true]
    split.test_fraction                   [0.2]
    split.validation_fraction             [0.2]
    split.stratified                      [true]
    split.kfold                           [0 = single split; k >= 2 for k-fold]
    model.kind                            ein|lstm|emotion_rf|bow_svm|w2v_lr|majority|random [ein]
    model.preset                          news_articles|twitter|stop_clickbait
    model.<field>                         any network hyper-parameter, e.g. model.lstm_units
    classifier.n_trees [100], .max_depth, .feature_subsample [sqrt]    random forest
    classifier.c [1.0], .epochs [20]                                 linear SVM
    classifier.l2 [0.001], .lr_epochs [500]                          logistic regression
    classifier.min_df [1], .max_vocab                                bag of words
    analysis.bins [10], analysis.top_n [3], analysis.real_label [real], analysis.alphas [0.05,0.01]
    analysis.wordlist.<name>              word list for the lexical mean-value table
    analysis.corpus.<name>                extra corpus compared in that table
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Mapping

from .lexicon import builtin_schemas
from .neural.config import ConfigError, EinConfig, preset

MODEL_KINDS = ("ein", "lstm", "emotion_rf", "bow_svm", "w2v_lr", "majority", "random")
NEURAL_KINDS = ("ein", "lstm")

_CLASSIFIER_DEFAULTS = {
    "n_trees": 100, "max_depth": None, "feature_subsample": "sqrt",
    "c": 1.0, "epochs": 20, "l2": 1e-3, "lr_epochs": 500, "min_df": 1, "max_vocab": None,
}
_EIN_FIELDS = {f.name: f for f in fields(EinConfig)}
_NULLABLE = {"learning_rate": float, "positive_label": str}


class ConfigValidationError(ConfigError):
    pass


def parse_config_text(text: str, origin: str = "<config>") -> dict[str, str]:
    out: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        for marker in (" #", "\t#"):
            cut = line.find(marker)
            if cut >= 0:
                line = line[:cut].rstrip()
        if "=" not in line:
            raise ConfigValidationError(f"{origin}:{line_no}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigValidationError(f"{origin}:{line_no}: empty key")
        if not key.startswith("lexicon."):
            key = key.lower()
        if key in out:
            raise ConfigValidationError(f"{origin}:{line_no}: duplicate key {key!r}")
        out[key] = value
    return out


def _bool(value: str, key: str) -> bool:
    v = value.lower()
    if v in ("true", "yes", "1", "on"):
        return True
    if v in ("false", "no", "0", "off"):
        return False
    raise ConfigValidationError(f"{key}: expected a boolean, got {value!r}")


def _num(kind, value: str, key: str):
    try:
        return kind(value)
    except ValueError:
        raise ConfigValidationError(f"{key}: expected {kind.__name__}, got {value!r}") from None


def _optional(kind, value: str, key: str):
    return None if value.lower() in ("none", "") else _num(kind, value, key)


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    corpus_path: Path
    output_dir: Path
    corpus_format: str | None = None
    lexicon_paths: Mapping[str, Path] = field(default_factory=dict)
    embeddings_path: Path | None = None
    max_tokens: int = 300
    min_tokens: int | None = None
    dedup: bool = True
    test_fraction: float = 0.2
    validation_fraction: float = 0.2
    stratified: bool = True
    kfold: int = 0
    model_kind: str = "ein"
    network: EinConfig = field(default_factory=EinConfig)
    classifier: Mapping[str, object] = field(default_factory=lambda: dict(_CLASSIFIER_DEFAULTS))
    bins: int = 10
    top_n: int = 3
    real_label: str = "real"
    alphas: tuple[float, ...] = (0.05, 0.01)
    wordlists: Mapping[str, Path] = field(default_factory=dict)
    extra_corpora: Mapping[str, Path] = field(default_factory=dict)
    source: Mapping[str, str] = field(default_factory=dict, compare=False, repr=False)

    @property
    def neural(self) -> bool:
        return self.model_kind in NEURAL_KINDS

    def config_hash(self) -> str:
        """SHA-256 of the canonical key/value listing (after --seed/--out overrides)."""
        canon = json.dumps(dict(sorted(self.source.items())), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    def validate(self) -> None:
        """Check every referenced input exists; raises before any work is done."""
        missing = []
        if not self.corpus_path.is_file():
            missing.append(f"corpus.path {self.corpus_path}")
        for name, p in self.lexicon_paths.items():
            if not p.is_file():
                missing.append(f"lexicon.{name} {p}")
        if self.embeddings_path is not None and not self.embeddings_path.is_file():
            missing.append(f"embeddings.path {self.embeddings_path}")
        for name, p in self.wordlists.items():
            if not p.is_file():
                missing.append(f"analysis.wordlist.{name} {p}")
        for name, p in self.extra_corpora.items():
            if not p.is_file():
                missing.append(f"analysis.corpus.{name} {p}")
        if missing:
            raise ConfigValidationError("missing input file(s): " + "; ".join(missing))
        if self.model_kind in ("ein", "emotion_rf") and not self.lexicon_paths:
            raise ConfigValidationError(f"model.kind={self.model_kind} needs at least one lexicon")
        if self.model_kind == "w2v_lr" and self.embeddings_path is None:
            raise ConfigValidationError("model.kind=w2v_lr needs embeddings.path")


def load_config(path, seed: int | None = None, output_dir=None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigValidationError(f"cannot read config {path}: {exc.strerror}") from None
    raw = parse_config_text(text, str(path))
    if seed is not None:
        raw["seed"] = str(seed)
    if output_dir is not None:
        raw["output.dir"] = str(output_dir)
    return build_config(raw, path.parent, default_name=path.stem)


def build_config(raw: Mapping[str, str], base: Path = Path("."),
                 default_name: str = "experiment") -> ExperimentConfig:
    raw = dict(raw)
    src = dict(raw)
    base = Path(base)

    def take(key, default=None):
        return raw.pop(key, default)

    def resolve(p):
        p = Path(p).expanduser()
        return p if p.is_absolute() else base / p

    if "seed" not in raw:
        raise ConfigValidationError("seed is mandatory")
    seed = _num(int, take("seed"), "seed")
    if "corpus.path" not in raw:
        raise ConfigValidationError("corpus.path is mandatory")
    kw: dict = {"seed": seed, "corpus_path": resolve(take("corpus.path"))}
    kw["output_dir"] = resolve(take("output.dir", f"runs/{default_name}"))
    kw["corpus_format"] = take("corpus.format")

    schemas = {s.name.lower(): s.name for s in builtin_schemas()}
    lex = {}
    for key in [k for k in raw if k.startswith("lexicon.")]:
        name = key.split(".", 1)[1]
        if name.lower() not in schemas:
            raise ConfigValidationError(f"{key}: unknown schema (known: {sorted(schemas.values())})")
        lex[schemas[name.lower()]] = resolve(take(key))
    order = [s.name for s in builtin_schemas()]
    kw["lexicon_paths"] = {n: lex[n] for n in order if n in lex}
    if "embeddings.path" in raw:
        kw["embeddings_path"] = resolve(take("embeddings.path"))

    if "preprocess.max_tokens" in raw:
        kw["max_tokens"] = _num(int, take("preprocess.max_tokens"), "preprocess.max_tokens")
    if "preprocess.min_tokens" in raw:
        kw["min_tokens"] = _optional(int, take("preprocess.min_tokens"), "preprocess.min_tokens")
    if "preprocess.dedup" in raw:
        kw["dedup"] = _bool(take("preprocess.dedup"), "preprocess.dedup")
    for key, kind in (("test_fraction", float), ("validation_fraction", float), ("kfold", int)):
        if f"split.{key}" in raw:
            kw[key] = _num(kind, take(f"split.{key}"), f"split.{key}")
    if "split.stratified" in raw:
        kw["stratified"] = _bool(take("split.stratified"), "split.stratified")
    if kw.get("kfold", 0) == 1 or kw.get("kfold", 0) < 0:
        raise ConfigValidationError("split.kfold must be 0 or >= 2")

    kind = take("model.kind", "ein").lower()
    if kind not in MODEL_KINDS:
        raise ConfigValidationError(f"model.kind must be one of {MODEL_KINDS}, got {kind!r}")
    kw["model_kind"] = kind
    net = {}
    for key in [k for k in raw if k.startswith("model.") and k != "model.preset"]:
        name = key.split(".", 1)[1]
        if name not in _EIN_FIELDS or name == "seed":
            raise ConfigValidationError(f"unknown setting {key!r}")
        value = take(key)
        default = _EIN_FIELDS[name].default
        if name in _NULLABLE:
            net[name] = _optional(_NULLABLE[name], value, key)
        elif isinstance(default, bool):
            net[name] = _bool(value, key)
        elif isinstance(default, (int, float)):
            net[name] = _num(type(default), value, key)
        else:
            net[name] = value
    if kind == "lstm":
        net["dense_a_units"] = 0
    net["seed"] = seed
    try:
        name = take("model.preset")
        kw["network"] = preset(name, "lstm" if kind == "lstm" else "ein", **net) if name else EinConfig(**net)
    except (ConfigError, TypeError) as exc:
        raise ConfigValidationError(str(exc)) from None

    clf = dict(_CLASSIFIER_DEFAULTS)
    for key in [k for k in raw if k.startswith("classifier.")]:
        name = key.split(".", 1)[1]
        if name not in clf:
            raise ConfigValidationError(f"unknown setting {key!r}")
        value = take(key)
        if name == "feature_subsample":
            clf[name] = value if value in ("sqrt", "none") else _num(int, value, key)
            if clf[name] == "none":
                clf[name] = None
        elif name in ("max_depth", "max_vocab"):
            clf[name] = _optional(int, value, key)
        elif name in ("c", "l2"):
            clf[name] = _num(float, value, key)
        else:
            clf[name] = _num(int, value, key)
    kw["classifier"] = clf

    if "analysis.bins" in raw:
        kw["bins"] = _num(int, take("analysis.bins"), "analysis.bins")
    if "analysis.top_n" in raw:
        kw["top_n"] = _num(int, take("analysis.top_n"), "analysis.top_n")
    if "analysis.real_label" in raw:
        kw["real_label"] = take("analysis.real_label")
    if "analysis.alphas" in raw:
        kw["alphas"] = tuple(_num(float, a.strip(), "analysis.alphas")
                             for a in take("analysis.alphas").split(","))
    kw["wordlists"] = {k.split(".", 2)[2]: resolve(take(k))
                       for k in sorted(k for k in raw if k.startswith("analysis.wordlist."))}
    kw["extra_corpora"] = {k.split(".", 2)[2]: resolve(take(k))
                           for k in sorted(k for k in raw if k.startswith("analysis.corpus."))}
    if raw:
        raise ConfigValidationError(f"unknown setting(s): {sorted(raw)}")
    return ExperimentConfig(source=src, **kw)
