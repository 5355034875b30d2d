from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass
class MetricsReport:
    """Percentages (0-100) plus the raw confusion matrix (rows gold, columns predicted)."""
    labels: list[str]
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    confusion: np.ndarray
    per_class_tp_ratio: dict[str, float]
    per_class_f1: dict[str, float]

    def to_dict(self, digits: int | None = 4) -> dict:
        r = (lambda v: round(float(v), digits)) if digits is not None else float
        return {
            "labels": list(self.labels),
            "accuracy": r(self.accuracy),
            "macro_precision": r(self.macro_precision),
            "macro_recall": r(self.macro_recall),
            "macro_f1": r(self.macro_f1),
            "confusion": self.confusion.tolist(),
            "per_class_tp_ratio": {k: r(v) for k, v in self.per_class_tp_ratio.items()},
            "per_class_f1": {k: r(v) for k, v in self.per_class_f1.items()},
        }


def confusion_matrix(predictions: Sequence[str], gold: Sequence[str],
                     labels: Sequence[str]) -> np.ndarray:
    index = {l: i for i, l in enumerate(labels)}
    cm = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for p, g in zip(predictions, gold):
        if p not in index or g not in index:
            raise ValueError(f"label outside the label set: {p!r} / {g!r}")
        cm[index[g], index[p]] += 1
    return cm


def compute_metrics(predictions: Sequence[str], gold: Sequence[str],
                    labels: Sequence[str]) -> MetricsReport:
    """Accuracy and unweighted per-class means of precision, recall and F1.

    A class never predicted has precision 0; a class with P = R = 0 has F1 0.
    Macro-F1 is the mean of per-class F1 scores.
    """
    if len(predictions) != len(gold):
        raise ValueError("predictions and gold differ in length")
    if not gold:
        raise ValueError("cannot score an empty prediction set")
    labels = list(labels)
    cm = confusion_matrix(predictions, gold, labels)
    tp = np.diag(cm).astype(float)
    pred_tot = cm.sum(axis=0).astype(float)
    gold_tot = cm.sum(axis=1).astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(pred_tot > 0, tp / pred_tot, 0.0)
        recall = np.where(gold_tot > 0, tp / gold_tot, 0.0)
        f1 = np.where(precision + recall > 0,
                      2 * precision * recall / (precision + recall), 0.0)
    return MetricsReport(
        labels=labels,
        accuracy=100.0 * tp.sum() / cm.sum(),
        macro_precision=100.0 * precision.mean(),
        macro_recall=100.0 * recall.mean(),
        macro_f1=100.0 * f1.mean(),
        confusion=cm,
        per_class_tp_ratio={l: float(recall[i]) for i, l in enumerate(labels)},
        per_class_f1={l: float(100.0 * f1[i]) for i, l in enumerate(labels)},
    )


def binary_metrics(predictions: Sequence[str], gold: Sequence[str], positive: str) -> dict:
    """Accuracy, precision, recall and F1 of the positive class, as percentages."""
    if len(predictions) != len(gold) or not gold:
        raise ValueError("need equal-length, non-empty inputs")
    tp = sum(p == positive and g == positive for p, g in zip(predictions, gold))
    fp = sum(p == positive and g != positive for p, g in zip(predictions, gold))
    fn = sum(p != positive and g == positive for p, g in zip(predictions, gold))
    correct = sum(p == g for p, g in zip(predictions, gold))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {
        "accuracy": 100.0 * correct / len(gold),
        "precision": 100.0 * precision,
        "recall": 100.0 * recall,
        "f1": 100.0 * f1,
    }

