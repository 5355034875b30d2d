"""The emotionally-infused network: an attention-LSTM content branch fused with a
dense emotion branch ahead of the output layer."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..features import EmbeddingTable, load_stop_words
from . import layers
from .config import ConfigError, EinConfig

OOV = 0  # row 0 of the embedding matrix is the shared OOV vector; padding reuses it under a mask


def glorot(rng, fan_in, fan_out, shape=None):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape or (fan_in, fan_out))


@dataclass
class Batch:
    ids: np.ndarray          # (B, T) int, padded with OOV
    mask: np.ndarray         # (B, T) bool
    emo: np.ndarray          # (B, q)
    y: np.ndarray | None     # (B,) int class index or 0/1

    def __len__(self):
        return self.ids.shape[0]


@dataclass
class EncodedData:
    """Documents already mapped to vocabulary ids, plus their emotion vectors."""
    ids: list[np.ndarray]
    emo: np.ndarray
    y: np.ndarray | None = None
    doc_ids: list[str] | None = None

    def __len__(self):
        return len(self.ids)

    def batch(self, index: Sequence[int], dtype=np.float64) -> Batch:
        seqs = [self.ids[i] for i in index]
        T = max(len(s) for s in seqs)
        ids = np.zeros((len(seqs), T), dtype=np.int64)
        mask = np.zeros((len(seqs), T), dtype=bool)
        for r, s in enumerate(seqs):
            ids[r, :len(s)] = s
            mask[r, :len(s)] = True
        y = None if self.y is None else self.y[np.asarray(index)]
        return Batch(ids, mask, self.emo[np.asarray(index)].astype(dtype, copy=False), y)

    def subset(self, index: Sequence[int]) -> "EncodedData":
        index = list(index)
        return EncodedData([self.ids[i] for i in index], self.emo[index],
                           None if self.y is None else self.y[index],
                           None if self.doc_ids is None else [self.doc_ids[i] for i in index])


class EinModel:
    """Parameters plus the vocabulary, label set and emotion layout they were built for."""

    def __init__(self, config: EinConfig, vocab: Sequence[str], labels: Sequence[str],
                 emotion_names: Sequence[str], params: dict[str, np.ndarray],
                 stop_words: Iterable[str] | None = None):
        self.config = config
        self.vocab = list(vocab)
        self.word_index = {w: i + 1 for i, w in enumerate(self.vocab)}
        self.labels = list(labels)
        self.emotion_names = list(emotion_names)
        self.params = params
        if config.output_mode == "sigmoid_binary":
            if len(self.labels) != 2:
                raise ConfigError("sigmoid_binary mode needs exactly two labels")
            pos = config.positive_label or self.labels[1]
            if pos not in self.labels:
                raise ConfigError(f"positive_label {pos!r} is not a label")
            self.positive_label = pos
        else:
            self.positive_label = None
        if stop_words is None and config.remove_stop_words:
            stop_words = load_stop_words()
        self.stop_words = frozenset(stop_words or ())
        self.check_shapes()

    # -- construction -------------------------------------------------------

    @classmethod
    def build(cls, config: EinConfig, vocab: Sequence[str], labels: Sequence[str],
              emotion_names: Sequence[str], embeddings: EmbeddingTable | None = None,
              stop_words: Iterable[str] | None = None) -> "EinModel":
        """Initialise fresh parameters (Glorot-uniform dense weights, forget bias 1).

        With ``embeddings`` the vocabulary rows are copied from the table and
        words missing from it start as small random vectors.
        """
        rng = np.random.default_rng(config.seed)
        labels = sorted(labels)
        d = embeddings.dimension if embeddings is not None else config.embedding_dim
        u, a, m = config.lstm_units, config.dense_a_units, config.dense_b_units
        q = len(emotion_names)
        k = 1 if config.output_mode == "sigmoid_binary" else len(labels)
        emb = rng.uniform(-0.1, 0.1, size=(len(vocab) + 1, d))
        if embeddings is not None:
            for i, w in enumerate(vocab):
                v = embeddings.get(w)
                if v is not None:
                    emb[i + 1] = v
        p = {"embedding": emb}
        p["lstm_W"] = glorot(rng, d, 4 * u)
        p["lstm_U"] = glorot(rng, u, 4 * u)
        b = np.zeros(4 * u)
        b[u:2 * u] = 1.0
        p["lstm_b"] = b
        p["att_w"] = glorot(rng, u, 1, shape=(u,))
        p["att_b"] = np.zeros(1)
        if a > 0:
            p["dense_a_W"] = glorot(rng, q, a)
            p["dense_a_b"] = np.zeros(a)
        p["dense_b_W"] = glorot(rng, u + a, m)
        p["dense_b_b"] = np.zeros(m)
        p["out_W"] = glorot(rng, m, k)
        p["out_b"] = np.zeros(k)
        return cls(config, vocab, labels, emotion_names, p, stop_words)

    @staticmethod
    def vocabulary_from(docs: Iterable, config: EinConfig,
                        embeddings: EmbeddingTable | None = None) -> list[str]:
        """Training-corpus words (after stop-word filtering) seen at least min_word_count times.

        With a pretrained table the table's words are included as well.
        """
        stop = load_stop_words() if config.remove_stop_words else frozenset()
        counts = Counter(t for d in docs for t in d.tokens if t not in stop)
        words = {w for w, n in counts.items() if n >= config.min_word_count}
        if embeddings is not None:
            words |= set(embeddings.words)
        return sorted(words)

    def check_shapes(self):
        c, p = self.config, self.params
        u, a, m = c.lstm_units, c.dense_a_units, c.dense_b_units
        d = p["embedding"].shape[1]
        q = len(self.emotion_names)
        k = 1 if c.output_mode == "sigmoid_binary" else len(self.labels)
        expected = {
            "embedding": (len(self.vocab) + 1, d),
            "lstm_W": (d, 4 * u), "lstm_U": (u, 4 * u), "lstm_b": (4 * u,),
            "att_w": (u,), "att_b": (1,),
            "dense_b_W": (u + a, m), "dense_b_b": (m,),
            "out_W": (m, k), "out_b": (k,),
        }
        if a > 0:
            expected["dense_a_W"] = (q, a)
            expected["dense_a_b"] = (a,)
        if set(expected) != set(p):
            raise ConfigError(f"parameter set {sorted(p)} does not match config {sorted(expected)}")
        for name, shape in expected.items():
            if p[name].shape != shape:
                raise ConfigError(f"{name} has shape {p[name].shape}, expected {shape}")

    @property
    def dtype(self):
        return self.params["out_W"].dtype

    @property
    def n_parameters(self) -> int:
        return sum(v.size for v in self.params.values())

    def astype(self, dtype) -> "EinModel":
        params = {k: v.astype(dtype) for k, v in self.params.items()}
        return EinModel(self.config, self.vocab, self.labels, self.emotion_names, params,
                        self.stop_words)

    def copy(self) -> "EinModel":
        return EinModel(self.config, self.vocab, self.labels, self.emotion_names,
                        {k: v.copy() for k, v in self.params.items()}, self.stop_words)

    # -- encoding -----------------------------------------------------------

    def token_ids(self, tokens: Sequence[str]) -> np.ndarray:
        """Content-branch ids: stop words dropped, truncated, OOV mapped to row 0.

        A document left empty becomes the single OOV row.
        """
        if self.config.remove_stop_words:
            tokens = [t for t in tokens if t not in self.stop_words]
        tokens = tokens[:self.config.max_sequence]
        if not tokens:
            return np.array([OOV], dtype=np.int64)
        return np.array([self.word_index.get(t, OOV) for t in tokens], dtype=np.int64)

    def embed_sequence(self, tokens: Sequence[str]) -> np.ndarray:
        return self.params["embedding"][self.token_ids(tokens)]

    def encode(self, docs: Sequence, emo: np.ndarray) -> EncodedData:
        """Map documents to ids; ``emo`` holds their emotion vectors row by row."""
        emo = np.asarray(emo, dtype=float)
        if emo.ndim != 2 or emo.shape != (len(docs), len(self.emotion_names)):
            raise ConfigError(
                f"emotion matrix shape {emo.shape} does not match "
                f"({len(docs)}, {len(self.emotion_names)})")
        ids = [self.token_ids(d.tokens) for d in docs]
        y = None
        if docs and all(getattr(d, "label", None) in self.labels for d in docs):
            y = np.array([self.target_of(d.label) for d in docs], dtype=np.int64)
        return EncodedData(ids, emo, y, [getattr(d, "id", str(i)) for i, d in enumerate(docs)])

    def target_of(self, label: str) -> int:
        if self.positive_label is not None:
            return int(label == self.positive_label)
        return self.labels.index(label)

    def label_of(self, target: int) -> str:
        if self.positive_label is not None:
            return self.positive_label if target == 1 else self.negative_label
        return self.labels[target]

    @property
    def negative_label(self) -> str | None:
        if self.positive_label is None:
            return None
        return next(l for l in self.labels if l != self.positive_label)

    # -- forward / backward -------------------------------------------------

    def forward(self, batch: Batch, training: bool = False, rng: np.random.Generator | None = None):
        """Returns (output, cache).

        ``output`` is (B, K) class probabilities in softmax mode and (B,)
        positive-class probabilities in sigmoid mode.
        """
        c, p = self.config, self.params
        if batch.emo.shape[1] != len(self.emotion_names):
            raise ConfigError(
                f"emotion vector width {batch.emo.shape[1]} != {len(self.emotion_names)}")
        if training and rng is None:
            raise ValueError("training forward pass needs an rng for dropout")
        x = p["embedding"][batch.ids]
        H, lstm_cache = layers.lstm_forward(x, p["lstm_W"], p["lstm_U"], p["lstm_b"])
        ctx, alpha, att_cache = layers.attention_forward(H, p["att_w"], p["att_b"], batch.mask)
        mask_d = _dropout_mask(rng, ctx.shape, c.drop_d, ctx.dtype) if training else None
        ctx_d = ctx * mask_d if mask_d is not None else ctx
        parts = [ctx_d]
        za = a = mask_c = None
        if c.emotion_branch:
            za = batch.emo @ p["dense_a_W"] + p["dense_a_b"]
            a = layers.activate(za, c.hidden_activation)
            mask_c = _dropout_mask(rng, a.shape, c.drop_c, a.dtype) if training else None
            parts.append(a * mask_c if mask_c is not None else a)
        concat = np.concatenate(parts, axis=1) if len(parts) > 1 else ctx_d
        zb = concat @ p["dense_b_W"] + p["dense_b_b"]
        hb = layers.activate(zb, c.hidden_activation)
        logits = hb @ p["out_W"] + p["out_b"]
        if c.output_mode == "sigmoid_binary":
            out = layers.sigmoid(logits[:, 0])
        else:
            out = layers.softmax(logits, axis=1)
        cache = dict(batch=batch, x=x, lstm=lstm_cache, att=att_cache, alpha=alpha,
                     mask_d=mask_d, za=za, a=a, mask_c=mask_c, concat=concat, zb=zb, hb=hb)
        return out, cache

    def loss_and_grads(self, batch: Batch, training: bool = False,
                       rng: np.random.Generator | None = None):
        out, cache = self.forward(batch, training, rng)
        if self.config.output_mode == "sigmoid_binary":
            value, dlogit = layers.binary_cross_entropy(out, batch.y)
            dlogits = dlogit[:, None]
        else:
            value, dlogits = layers.cross_entropy(out, batch.y)
        return value, self.backward(dlogits, cache)

    def backward(self, dlogits, cache) -> dict[str, np.ndarray]:
        c, p = self.config, self.params
        g = {}
        hb, zb, concat = cache["hb"], cache["zb"], cache["concat"]
        g["out_W"] = hb.T @ dlogits
        g["out_b"] = dlogits.sum(axis=0)
        dhb = dlogits @ p["out_W"].T
        dzb = dhb * layers.activate_grad(zb, hb, c.hidden_activation)
        g["dense_b_W"] = concat.T @ dzb
        g["dense_b_b"] = dzb.sum(axis=0)
        dconcat = dzb @ p["dense_b_W"].T
        u = c.lstm_units
        dctx = dconcat[:, :u]
        if cache["mask_d"] is not None:
            dctx = dctx * cache["mask_d"]
        if c.emotion_branch:
            da = dconcat[:, u:]
            if cache["mask_c"] is not None:
                da = da * cache["mask_c"]
            dza = da * layers.activate_grad(cache["za"], cache["a"], c.hidden_activation)
            g["dense_a_W"] = cache["batch"].emo.T @ dza
            g["dense_a_b"] = dza.sum(axis=0)
        dH, g["att_w"], g["att_b"] = layers.attention_backward(dctx, cache["att"])
        dx, g["lstm_W"], g["lstm_U"], g["lstm_b"] = layers.lstm_backward(dH, cache["lstm"])
        batch = cache["batch"]
        demb = np.zeros_like(p["embedding"])
        np.add.at(demb, batch.ids[batch.mask], dx[batch.mask])
        g["embedding"] = demb
        return g

    def penultimate(self, batch: Batch) -> np.ndarray:
        """dense_b activations at inference."""
        _, cache = self.forward(batch, training=False)
        return cache["hb"]

    # -- inference ----------------------------------------------------------

    def predict_proba(self, data: EncodedData, batch_size: int | None = None) -> np.ndarray:
        """Class distributions (N, n_labels) in label order, for either output mode."""
        bs = batch_size or self.config.batch_size
        rows = []
        for start in range(0, len(data), bs):
            batch = data.batch(range(start, min(start + bs, len(data))), self.dtype)
            out, _ = self.forward(batch, training=False)
            if self.positive_label is not None:
                pos = self.labels.index(self.positive_label)
                dist = np.empty((len(out), 2), dtype=out.dtype)
                dist[:, pos] = out
                dist[:, 1 - pos] = 1 - out
                out = dist
            rows.append(out)
        return np.vstack(rows) if rows else np.zeros((0, len(self.labels)))

    def scores(self, data: EncodedData, batch_size: int | None = None) -> np.ndarray:
        """Raw network outputs: (N, K) softmax rows or (N,) positive-class probabilities."""
        bs = batch_size or self.config.batch_size
        outs = []
        for start in range(0, len(data), bs):
            batch = data.batch(range(start, min(start + bs, len(data))), self.dtype)
            outs.append(self.forward(batch, training=False)[0])
        return np.concatenate(outs) if outs else np.zeros(0)

    def predict_labels(self, data: EncodedData) -> list[str]:
        out = self.scores(data)
        if self.positive_label is not None:
            return [self.positive_label if s >= 0.5 else self.negative_label for s in out]
        return [self.labels[i] for i in np.argmax(out, axis=1)]

    def penultimate_matrix(self, data: EncodedData) -> np.ndarray:
        bs = self.config.batch_size
        rows = [self.penultimate(data.batch(range(s, min(s + bs, len(data))), self.dtype))
                for s in range(0, len(data), bs)]
        return np.vstack(rows) if rows else np.zeros((0, self.config.dense_b_units))


def _dropout_mask(rng, shape, rate, dtype):
    if rate <= 0:
        return None
    keep = rng.random(shape) >= rate
    return keep.astype(dtype) / (1.0 - rate)
