from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from ..features import EmbeddingTable, emotion_matrix, feature_names
from .config import EinConfig
from .model import Batch, EinModel, EncodedData
from .optim import make_optimizer

log = logging.getLogger(__name__)


class TrainingError(RuntimeError):
    def __init__(self, message, epoch=None, batch=None):
        self.epoch, self.batch = epoch, batch
        super().__init__(f"{message} (epoch {epoch}, batch {batch})")


@dataclass
class TrainHistory:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_macro_f1: list[float] = field(default_factory=list)
    train_accuracy: list[float] = field(default_factory=list)
    stopped_epoch: int = 0
    best_epoch: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def prepare(model: EinModel, docs: Sequence, lexicons) -> EncodedData:
    """Encode documents for ``model``; the emotion branch sees every token."""
    return model.encode(docs, emotion_matrix(docs, lexicons))


def evaluate_loss(model: EinModel, data: EncodedData) -> float:
    from . import layers
    total = 0.0
    bs = model.config.batch_size
    for start in range(0, len(data), bs):
        batch = data.batch(range(start, min(start + bs, len(data))), model.dtype)
        out, _ = model.forward(batch)
        if model.positive_label is not None:
            value, _ = layers.binary_cross_entropy(out, batch.y)
        else:
            value, _ = layers.cross_entropy(out, batch.y)
        total += value * len(batch)
    return total / len(data)


def _macro_f1(model: EinModel, data: EncodedData) -> float:
    from ..analysis.metrics import compute_metrics
    gold = [model.label_of(i) for i in data.y]
    return compute_metrics(model.predict_labels(data), gold, model.labels).macro_f1


def train(model: EinModel, train_data: EncodedData, val_data: EncodedData,
          config: EinConfig | None = None, monitor_train: bool = False) -> tuple[EinModel, TrainHistory]:
    """Mini-batch training with early stopping on validation loss.

    Training stops once validation loss has failed to improve for
    ``early_stop_patience`` consecutive epochs (a patience of 0 behaves like
    1). The returned model holds the best-validation parameters.
    """
    config = config or model.config
    if len(train_data) == 0 or len(val_data) == 0:
        raise ValueError("train and validation data must be non-empty")
    if train_data.y is None or val_data.y is None:
        raise ValueError("training data needs labels")
    model = model.copy()
    rng = np.random.default_rng([config.seed, 1])
    opt = make_optimizer(config.optimizer, config.learning_rate)
    frozen = frozenset() if config.trainable_embeddings else frozenset({"embedding"})
    history = TrainHistory()
    best_loss = np.inf
    best_params = None
    wait = 0
    n = len(train_data)
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        losses = []
        for b, start in enumerate(range(0, n, config.batch_size)):
            batch = train_data.batch(order[start:start + config.batch_size], model.dtype)
            value, grads = model.loss_and_grads(batch, training=True, rng=rng)
            if not np.isfinite(value):
                raise TrainingError("non-finite training loss", epoch, b)
            opt.step(model.params, grads, frozen)
            losses.append(value)
        val_loss = evaluate_loss(model, val_data)
        if not np.isfinite(val_loss):
            raise TrainingError("non-finite validation loss", epoch, None)
        history.train_loss.append(float(np.mean(losses)))
        history.val_loss.append(float(val_loss))
        history.val_macro_f1.append(float(_macro_f1(model, val_data)))
        if monitor_train:
            pred = model.predict_labels(train_data)
            gold = [model.label_of(i) for i in train_data.y]
            history.train_accuracy.append(float(np.mean([p == g for p, g in zip(pred, gold)])))
        history.stopped_epoch = epoch
        log.debug("epoch %d train %.4f val %.4f", epoch, history.train_loss[-1], val_loss)
        if val_loss < best_loss:
            best_loss = val_loss
            best_params = {k: v.copy() for k, v in model.params.items()}
            history.best_epoch = epoch
            wait = 0
        else:
            wait += 1
            if wait >= max(config.early_stop_patience, 1):
                break
    model.params = best_params
    return model, history


def fit(train_docs: Sequence, val_docs: Sequence, lexicons, config: EinConfig,
        embeddings: EmbeddingTable | None = None, labels: Sequence[str] | None = None,
        monitor_train: bool = False) -> tuple[EinModel, TrainHistory]:
    """Build vocabulary and model from ``train_docs`` and train it."""
    labels = sorted(labels or {d.label for d in train_docs} | {d.label for d in val_docs})
    vocab = EinModel.vocabulary_from(train_docs, config, embeddings)
    model = EinModel.build(config, vocab, labels, feature_names(lexicons), embeddings)
    return train(model, prepare(model, train_docs, lexicons), prepare(model, val_docs, lexicons),
                 config, monitor_train)


def predict(model: EinModel, doc, lexicons) -> tuple[str, np.ndarray]:
    """Label and class distribution (in ``model.labels`` order) for one document.

    Binary mode predicts the positive label when its probability is >= 0.5.
    """
    data = prepare(model, [doc], lexicons)
    dist = model.predict_proba(data)[0]
    if model.positive_label is not None:
        pos = model.labels.index(model.positive_label)
        label = model.positive_label if dist[pos] >= 0.5 else model.negative_label
    else:
        label = model.labels[int(np.argmax(dist))]
    return label, dist


# ---------------------------------------------------------------------------
# gradient verification

def _batch_loss(model: EinModel, batch: Batch, training: bool, seed: int) -> float:
    rng = np.random.default_rng(seed) if training else None
    value, _ = _loss_only(model, batch, training, rng)
    return value


def _loss_only(model, batch, training, rng):
    from . import layers
    out, cache = model.forward(batch, training, rng)
    if model.positive_label is not None:
        return layers.binary_cross_entropy(out, batch.y)
    return layers.cross_entropy(out, batch.y)


def gradient_check(model: EinModel, batch: Batch, epsilon: float = 1e-5,
                   training: bool = True, seed: int = 0) -> tuple[float, dict[str, float]]:
    """Compare backprop gradients with central differences for every parameter entry.

    In training mode the dropout masks are frozen by re-seeding the RNG for
    each evaluation. Returns the overall max relative error and the max per
    parameter tensor, where relative error is
    ``|g_a - g_n| / max(|g_a|, |g_n|, 1e-8)``.
    """
    model = model.astype(np.float64)
    batch = Batch(batch.ids, batch.mask, batch.emo.astype(np.float64), batch.y)
    rng = np.random.default_rng(seed) if training else None
    value, grads = model.loss_and_grads(batch, training, rng)
    if not np.isfinite(value):
        raise TrainingError("non-finite loss in gradient check")
    per_param = {}
    for name, p in model.params.items():
        numeric = np.zeros_like(p)
        flat = p.reshape(-1)
        nflat = numeric.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + epsilon
            f_plus = _batch_loss(model, batch, training, seed)
            flat[i] = orig - epsilon
            f_minus = _batch_loss(model, batch, training, seed)
            flat[i] = orig
            if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
                raise TrainingError(f"non-finite loss perturbing {name}[{i}]")
            nflat[i] = (f_plus - f_minus) / (2 * epsilon)
        ga = grads[name]
        denom = np.maximum(np.maximum(np.abs(ga), np.abs(numeric)), 1e-8)
        per_param[name] = float(np.max(np.abs(ga - numeric) / denom)) if p.size else 0.0
    return max(per_param.values()), per_param
