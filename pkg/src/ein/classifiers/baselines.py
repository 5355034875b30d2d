from __future__ import annotations

from collections import Counter
from typing import Sequence

import numpy as np


def majority_label(labels: Sequence[str]) -> str:
    """Most frequent label; ties go to the lexicographically smallest."""
    if not labels:
        raise ValueError("no training labels")
    counts = Counter(labels)
    return min(counts, key=lambda c: (-counts[c], c))


def trivial_baselines(train_labels: Sequence[str], test_size: int, seed: int,
                      label_set: Sequence[str] | None = None) -> tuple[list[str], list[str]]:
    """Majority-class and uniform-random predictions for ``test_size`` items."""
    mc = majority_label(train_labels)
    labels = sorted(label_set or set(train_labels))
    rng = np.random.default_rng(seed)
    ran = [labels[i] for i in rng.integers(0, len(labels), size=test_size)]
    return [mc] * test_size, ran
