"""Staged experiment runs: prepare -> featurize -> train -> evaluate, plus analysis.

Every run directory carries ``manifest.json`` with the config hash, the seed,
per-stage timings and a SHA-256 for every file written. A stage that raises
leaves the manifest marked incomplete, with the failing stage named.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .analysis import (compute_metrics, information_gain, pca_project, top_n_emotions,
                       welch_t_test, write_projection)
from .analysis.projection import export_penultimate
from .classifiers import (coefficients, load_model, save_model, train_linear_svm,
                          train_logistic_regression, train_random_forest, trivial_baselines)
from .classifiers.baselines import majority_label
from .config import ExperimentConfig
from .corpus import (Corpus, CorpusError, SplitSpec, corpus_stats, kfold_indices, load_corpus,
                     preprocess, split)
from .features import (FeatureError, avg_embedding_matrix, bow_transform, corpus_mean_value,
                       emotion_matrix, feature_names, fit_vocabulary, load_embeddings,
                       load_wordlist, write_feature_csv)
from .lexicon import LexiconError, get_schema, load_lexicon
from .neural import (EinModel, TrainingError, fit, load_checkpoint, prepare, save_checkpoint)
from .neural.checkpoint import CheckpointError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_STAGE = 4

MANIFEST = "manifest.json"


class StageError(RuntimeError):
    """A failure inside a named stage; ``exit_code`` classifies it for the CLI."""

    def __init__(self, stage: str, message: str, exit_code: int = EXIT_STAGE):
        self.stage, self.exit_code = stage, exit_code
        super().__init__(f"[{stage}] {message}")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_json(path, obj) -> None:
    """Deterministic UTF-8 JSON: sorted keys, fixed indentation, trailing newline."""
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
                          encoding="utf-8")


class Manifest:
    """Run record; commands sharing an output directory and config hash accumulate into one."""

    def __init__(self, cfg: ExperimentConfig, command: str):
        self.dir = Path(cfg.output_dir)
        self.data = {
            "version": __version__,
            "command": command,
            "config_hash": cfg.config_hash(),
            "config": dict(sorted(cfg.source.items())),
            "seed": cfg.seed,
            "stages": {},
            "artifacts": {},
            "complete": False,
        }
        self.dir.mkdir(parents=True, exist_ok=True)
        previous = self.dir / MANIFEST
        if previous.is_file():
            try:
                old = json.loads(previous.read_text(encoding="utf-8"))
            except ValueError:
                old = {}
            if old.get("config_hash") == self.data["config_hash"]:
                self.data["stages"] = old.get("stages", {})
                self.data["artifacts"] = {k: v for k, v in old.get("artifacts", {}).items()
                                          if (self.dir / k).is_file()}
        self.save()

    def save(self) -> None:
        write_json(self.dir / MANIFEST, self.data)

    def record(self, path, stage: str, complete: bool = True) -> None:
        path = Path(path)
        rel = path.relative_to(self.dir).as_posix()
        self.data["artifacts"][rel] = {
            "sha256": sha256_file(path), "bytes": path.stat().st_size,
            "stage": stage, "complete": complete,
        }

    @contextmanager
    def stage(self, name: str, exit_code: int = EXIT_STAGE):
        entry = {"status": "running"}
        self.data["stages"][name] = entry
        before = set(self.data["artifacts"])
        t0 = time.perf_counter()
        try:
            yield
        except Exception as exc:
            entry.update(status="failed", seconds=round(time.perf_counter() - t0, 3))
            for rel in set(self.data["artifacts"]) - before:
                self.data["artifacts"][rel]["complete"] = False
            err = exc if isinstance(exc, StageError) else StageError(name, str(exc), _exit_code(exc, exit_code))
            self.data["error"] = {"stage": err.stage, "message": str(err)}
            self.data["complete"] = False
            self.save()
            if err is exc:
                raise
            raise err from exc
        entry.update(status="complete", seconds=round(time.perf_counter() - t0, 3))
        self.save()

    def finish(self) -> None:
        self.data["complete"] = True
        self.save()


def _exit_code(exc, default):
    if isinstance(exc, (CorpusError, LexiconError, FeatureError, CheckpointError, FileNotFoundError)):
        return EXIT_DATA
    return default


# ---------------------------------------------------------------------------
# prepare

@dataclass
class Prepared:
    corpus: Corpus
    lexicons: list
    embeddings: object
    folds: list[tuple[Corpus, Corpus, Corpus]]   # (train, val, test) per fold; one entry without k-fold


def load_lexicons(cfg: ExperimentConfig) -> list:
    return [load_lexicon(p, get_schema(name)) for name, p in cfg.lexicon_paths.items()]


def _holdout(corpus: Corpus, fraction: float, seed: int) -> tuple[Corpus, Corpus]:
    """Carve a validation part of about ``fraction`` off a k-fold training part."""
    k = max(2, int(round(1.0 / fraction)))
    val_ix = kfold_indices(corpus.y, k, seed, stratified=True)[0]
    mask = np.ones(len(corpus), dtype=bool)
    mask[val_ix] = False
    return corpus.subset(np.flatnonzero(mask)), corpus.subset(val_ix)


def make_folds(cfg: ExperimentConfig, corpus: Corpus) -> list[tuple[Corpus, Corpus, Corpus]]:
    if cfg.kfold:
        out = []
        for f, test_ix in enumerate(kfold_indices(corpus.y, cfg.kfold, cfg.seed, cfg.stratified)):
            mask = np.ones(len(corpus), dtype=bool)
            mask[test_ix] = False
            train, val = _holdout(corpus.subset(np.flatnonzero(mask)), cfg.validation_fraction,
                                  cfg.seed + f)
            out.append((train, val, corpus.subset(test_ix)))
        return out
    spec = SplitSpec(cfg.test_fraction, cfg.validation_fraction, cfg.seed, cfg.stratified)
    return [split(corpus, spec)]


def run_prepare(cfg: ExperimentConfig, manifest: Manifest, write: bool = True) -> Prepared:
    out = Path(cfg.output_dir)
    with manifest.stage("prepare", EXIT_DATA):
        raw = load_corpus(cfg.corpus_path, cfg.corpus_format)
        corpus, report = preprocess(raw, cfg.max_tokens, cfg.min_tokens, cfg.dedup)
        if len(corpus) == 0:
            raise StageError("prepare", "no documents left after preprocessing", EXIT_DATA)
        folds = make_folds(cfg, corpus)
        lexicons = load_lexicons(cfg)
        embeddings = None
        if cfg.embeddings_path is not None and cfg.model_kind in ("ein", "lstm", "w2v_lr"):
            vocab = {t for d in corpus for t in d.tokens}
            embeddings = load_embeddings(cfg.embeddings_path, vocab)
        if write:
            d = out / "prepare"
            d.mkdir(parents=True, exist_ok=True)
            write_json(d / "preprocess.json", report.to_dict())
            write_json(d / "stats.json", corpus_stats(corpus))
            write_json(d / "splits.json", [
                {"train": [x.id for x in tr], "validation": [x.id for x in va], "test": [x.id for x in te]}
                for tr, va, te in folds])
            for name in ("preprocess.json", "stats.json", "splits.json"):
                manifest.record(d / name, "prepare")
            if lexicons:
                ids = [x.id for x in corpus]
                write_feature_csv(d / "emotion_features.csv", ids,
                                  emotion_matrix(corpus, lexicons), feature_names(lexicons))
                manifest.record(d / "emotion_features.csv", "prepare")
    return Prepared(corpus, lexicons, embeddings, folds)


# ---------------------------------------------------------------------------
# train / evaluate

def model_filename(cfg: ExperimentConfig, fold: int | None = None) -> str:
    stem = "model" if fold is None else f"model_fold{fold:02d}"
    return stem + (".ein" if cfg.neural else ".json")


def train_one(cfg: ExperimentConfig, prep: Prepared, train: Corpus, val: Corpus):
    """Returns (model, history dict or None)."""
    kind = cfg.model_kind
    labels = list(prep.corpus.labels)
    c = cfg.classifier
    if cfg.neural:
        model, history = fit(train, val, prep.lexicons if kind == "ein" else [], cfg.network,
                             prep.embeddings, labels)
        return model, history.to_dict()
    if kind == "emotion_rf":
        X = emotion_matrix(train, prep.lexicons)
        return train_random_forest(X, train.y, n_trees=c["n_trees"], max_depth=c["max_depth"],
                                   feature_subsample=c["feature_subsample"], seed=cfg.seed,
                                   feature_names=feature_names(prep.lexicons)), None
    if kind == "bow_svm":
        vocab = fit_vocabulary(train, c["min_df"], c["max_vocab"])
        return train_linear_svm(bow_transform(train, vocab), train.y, c=c["c"], epochs=c["epochs"],
                                seed=cfg.seed, feature_names=vocab), None
    if kind == "w2v_lr":
        X = avg_embedding_matrix(train, prep.embeddings)
        names = [f"dim{j}" for j in range(X.shape[1])]
        return train_logistic_regression(X, train.y, l2=c["l2"], epochs=c["lr_epochs"],
                                         seed=cfg.seed, feature_names=names), None
    if kind in ("majority", "random"):
        return {"type": kind, "label": majority_label(train.y), "labels": labels,
                "seed": cfg.seed}, None
    raise StageError("train", f"unknown model kind {kind!r}")


def save_any(cfg: ExperimentConfig, model, path: Path) -> None:
    if cfg.neural:
        save_checkpoint(model, path)
    elif isinstance(model, dict):
        write_json(path, model)
    else:
        save_model(model, path)


def load_any(cfg: ExperimentConfig, path: Path):
    if not path.is_file():
        raise StageError("evaluate", f"model file {path} not found; run 'train' first", EXIT_DATA)
    if cfg.neural:
        return load_checkpoint(path)
    if cfg.model_kind in ("majority", "random"):
        return json.loads(path.read_text(encoding="utf-8"))
    return load_model(path)


def predict_any(cfg: ExperimentConfig, prep: Prepared, model, docs: Corpus) -> list[str]:
    kind = cfg.model_kind
    if cfg.neural:
        return model.predict_labels(prepare(model, docs, prep.lexicons if kind == "ein" else []))
    if kind == "emotion_rf":
        return model.predict(emotion_matrix(docs, prep.lexicons))
    if kind == "bow_svm":
        return model.predict(bow_transform(docs, model.feature_names))
    if kind == "w2v_lr":
        return model.predict(avg_embedding_matrix(docs, prep.embeddings))
    mc, ran = trivial_baselines([model["label"]], len(docs), model["seed"], model["labels"])
    return mc if kind == "majority" else ran


def _summary(reports: Sequence[dict]) -> dict:
    keys = ("accuracy", "macro_precision", "macro_recall", "macro_f1")
    return {k: round(float(np.mean([r[k] for r in reports])), 4) for k in keys}


def run_train(cfg: ExperimentConfig, prep: Prepared, manifest: Manifest) -> list:
    out = Path(cfg.output_dir)
    models = []
    with manifest.stage("train"):
        histories = []
        for f, (tr, va, _) in enumerate(prep.folds):
            model, history = train_one(cfg, prep, tr, va)
            path = out / model_filename(cfg, f if cfg.kfold else None)
            save_any(cfg, model, path)
            manifest.record(path, "train")
            models.append(model)
            if history is not None:
                histories.append(history)
        if histories:
            write_json(out / "history.json", histories[0] if not cfg.kfold else histories)
            manifest.record(out / "history.json", "train")
    return models


def run_evaluate(cfg: ExperimentConfig, prep: Prepared, manifest: Manifest, models=None) -> dict:
    out = Path(cfg.output_dir)
    with manifest.stage("evaluate"):
        labels = list(prep.corpus.labels)
        reports = []
        for f, (_, _, te) in enumerate(prep.folds):
            model = models[f] if models else load_any(cfg, out / model_filename(cfg, f if cfg.kfold else None))
            pred = predict_any(cfg, prep, model, te)
            reports.append(compute_metrics(pred, te.y, labels).to_dict())
        metrics = {"model": cfg.model_kind, "labels": labels, "seed": cfg.seed,
                   "test_documents": [len(te) for _, _, te in prep.folds]}
        if cfg.kfold:
            metrics.update(folds=reports, mean=_summary(reports))
        else:
            metrics["test"] = reports[0]
        write_json(out / "metrics.json", metrics)
        manifest.record(out / "metrics.json", "evaluate")
    return metrics


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Full pipeline; returns the metrics document also written to metrics.json."""
    cfg.validate()
    manifest = Manifest(cfg, "run")
    prep = run_prepare(cfg, manifest)
    models = run_train(cfg, prep, manifest)
    metrics = run_evaluate(cfg, prep, manifest, models)
    manifest.finish()
    return metrics


# ---------------------------------------------------------------------------
# analysis

def ttest_table(X: np.ndarray, names: Sequence[str], labels: Sequence[str], real_label: str,
                alphas=(0.05, 0.01)) -> dict:
    """Per-feature Welch test of real documents against all false ones pooled."""
    is_real = np.array([l == real_label for l in labels])
    n_real, n_false = int(is_real.sum()), int((~is_real).sum())
    if n_real < 2 or n_false < 2:
        return {"skipped": f"need >= 2 documents on each side of '{real_label}' vs rest "
                           f"(have {n_real} real, {n_false} false)", "rows": []}
    rows = []
    for j, name in enumerate(names):
        res = welch_t_test(X[is_real, j], X[~is_real, j], alphas)
        rows.append({"feature": name, "mean_real": float(X[is_real, j].mean()),
                     "mean_false": float(X[~is_real, j].mean()), **res.to_dict()})
    return {"real_label": real_label, "n_real": n_real, "n_false": n_false, "rows": rows}


def wordlist_table(cfg: ExperimentConfig, corpus: Corpus) -> list[dict]:
    corpora = {"corpus": corpus}
    for name, p in cfg.extra_corpora.items():
        corpora[name], _ = preprocess(load_corpus(p), cfg.max_tokens, cfg.min_tokens, cfg.dedup)
    rows = []
    for name, p in cfg.wordlists.items():
        wl = load_wordlist(p, name)
        values = {c: corpus_mean_value(docs, wl) for c, docs in corpora.items()}
        rows.append({"wordlist": name, "mean_value": values,
                     "ordering": sorted(values, key=lambda c: (-values[c], c))})
    return rows


def run_analysis(cfg: ExperimentConfig) -> dict:
    """IG ranking, real-vs-false t-tests, top emotions per class and word-list means."""
    cfg.validate()
    if not cfg.lexicon_paths:
        raise StageError("analyze", "analysis needs lexicon.<Schema> entries", EXIT_CONFIG)
    manifest = Manifest(cfg, "analyze")
    prep = run_prepare(cfg, manifest, write=False)
    out = Path(cfg.output_dir) / "analysis"
    with manifest.stage("analyze"):
        out.mkdir(parents=True, exist_ok=True)
        corpus = prep.corpus
        names = feature_names(prep.lexicons)
        X = emotion_matrix(corpus, prep.lexicons)
        y = corpus.y
        report: dict = {"documents": len(corpus), "labels": list(corpus.labels), "notices": []}
        report["information_gain"] = information_gain(X, y, bins=cfg.bins, names=names).to_dict()
        report["ttest"] = ttest_table(X, names, y, cfg.real_label, cfg.alphas)
        if report["ttest"].get("skipped"):
            report["notices"].append("t-test skipped: " + report["ttest"]["skipped"])
        if len(corpus.labels) >= 2:
            train = prep.folds[0][0]
            svm = train_linear_svm(emotion_matrix(train, prep.lexicons), train.y,
                                   c=cfg.classifier["c"], epochs=cfg.classifier["epochs"],
                                   seed=cfg.seed, feature_names=names)
            coefs = coefficients(svm)
            n = min(cfg.top_n, len({nm.rsplit(':', 1)[-1] for nm in names}))
            report["top_emotions"] = top_n_emotions(coefs, n)
            report["coefficients"] = coefs
        else:
            report["top_emotions"] = {}
            report["notices"].append("top emotions skipped: single-class corpus")
        report["wordlists"] = wordlist_table(cfg, corpus)
        for key in ("information_gain", "ttest", "top_emotions", "wordlists"):
            write_json(out / f"{key}.json", report[key])
            manifest.record(out / f"{key}.json", "analyze")
        write_json(out / "analysis.json", report)
        manifest.record(out / "analysis.json", "analyze")
    manifest.finish()
    return report


# ---------------------------------------------------------------------------
# projection

def run_projection(cfg: ExperimentConfig, part: str = "test") -> Path:
    """Penultimate-layer export of a trained network and its 2-D PCA projection."""
    cfg.validate()
    if not cfg.neural:
        raise StageError("project", f"model.kind={cfg.model_kind} has no penultimate layer", EXIT_CONFIG)
    manifest = Manifest(cfg, "project")
    prep = run_prepare(cfg, manifest, write=False)
    out = Path(cfg.output_dir)
    with manifest.stage("project"):
        model: EinModel = load_any(cfg, out / model_filename(cfg, 0 if cfg.kfold else None))
        train, val, test = prep.folds[0]
        docs = {"train": train, "validation": val, "test": test, "all": prep.corpus}[part]
        lex = prep.lexicons if cfg.model_kind == "ein" else []
        pen = out / f"penultimate_{part}.csv"
        vectors = export_penultimate(model, docs, lex, pen)
        manifest.record(pen, "project")
        coords, ratios = pca_project(vectors, 2, seed=cfg.seed)
        proj = out / f"projection_{part}.csv"
        write_projection(proj, [d.id for d in docs], docs.y, coords)
        manifest.record(proj, "project")
        write_json(out / f"projection_{part}.json", {"explained_variance_ratio": [float(r) for r in ratios]})
        manifest.record(out / f"projection_{part}.json", "project")
    manifest.finish()
    return proj


def stats_report(path, fmt: str | None = None) -> dict:
    return corpus_stats(load_corpus(path, fmt))
