"""Versioned JSON documents for the classical models."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .forest import RandomForest, Tree
from .linear import LinearModel

FORMAT = "ein-classifier"
VERSION = 1


def model_to_dict(model) -> dict:
    if isinstance(model, LinearModel):
        return {
            "format": FORMAT, "version": VERSION, "type": "linear",
            "training": model.training,
            "classes": model.classes,
            "feature_names": model.feature_names,
            "weights": model.weights.tolist(),
            "bias": model.bias.tolist(),
        }
    if isinstance(model, RandomForest):
        return {
            "format": FORMAT, "version": VERSION, "type": "random_forest",
            "classes": model.classes,
            "feature_names": model.feature_names,
            "feature_subsample": model.feature_subsample,
            "bootstrap": model.bootstrap,
            "max_depth": model.max_depth,
            "tree_seeds": model.tree_seeds,
            "trees": [t.to_dict() for t in model.trees],
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(d: dict):
    if d.get("format") != FORMAT or d.get("version") != VERSION:
        raise ValueError(f"unsupported classifier document {d.get('format')!r} v{d.get('version')}")
    if d["type"] == "linear":
        return LinearModel(d["classes"], d["feature_names"], np.array(d["weights"], dtype=float),
                           np.array(d["bias"], dtype=float), d["training"])
    if d["type"] == "random_forest":
        return RandomForest(d["classes"], [Tree.from_dict(t) for t in d["trees"]], d["tree_seeds"],
                            d["feature_subsample"], d["bootstrap"], d["feature_names"], d["max_depth"])
    raise ValueError(f"unknown classifier type {d['type']!r}")


def save_model(model, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), sort_keys=True), encoding="utf-8")


def load_model(path):
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
