from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

ACTIVATIONS = ("relu", "tanh")
OPTIMIZERS = ("adam", "adadelta", "rmsprop")
OUTPUT_MODES = ("softmax_multiclass", "sigmoid_binary")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EinConfig:
    lstm_units: int = 64
    dense_a_units: int = 32          # 0 disables the emotion branch (LSTM-only baseline)
    dense_b_units: int = 32
    batch_size: int = 32
    hidden_activation: str = "relu"
    optimizer: str = "adam"
    drop_c: float = 0.2              # after dense_a
    drop_d: float = 0.2              # after attention
    max_sequence: int = 300
    output_mode: str = "softmax_multiclass"
    remove_stop_words: bool = True
    trainable_embeddings: bool = True
    seed: int = 0
    early_stop_patience: int = 5
    epochs: int = 50
    learning_rate: float | None = None   # None: optimizer default
    embedding_dim: int = 50          # used only when no pretrained table is given
    min_word_count: int = 1
    positive_label: str | None = None    # binary mode; default is the second sorted label

    def __post_init__(self):
        if self.hidden_activation not in ACTIVATIONS:
            raise ConfigError(f"hidden_activation must be one of {ACTIVATIONS}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {OPTIMIZERS}")
        if self.output_mode not in OUTPUT_MODES:
            raise ConfigError(f"output_mode must be one of {OUTPUT_MODES}")
        for name in ("drop_c", "drop_d"):
            p = getattr(self, name)
            if not 0.0 <= p < 1.0:
                raise ConfigError(f"{name} must lie in [0, 1), got {p}")
        for name in ("lstm_units", "dense_b_units", "batch_size", "max_sequence",
                     "epochs", "embedding_dim", "min_word_count"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.dense_a_units < 0:
            raise ConfigError("dense_a_units must be >= 0")
        if self.early_stop_patience < 0:
            raise ConfigError("early_stop_patience must be >= 0")
        if self.learning_rate is not None and self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")

    @property
    def emotion_branch(self) -> bool:
        return self.dense_a_units > 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EinConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown EinConfig fields: {sorted(unknown)}")
        return cls(**d)

    def with_(self, **changes) -> "EinConfig":
        return replace(self, **changes)


# Tuned architectures per dataset; "lstm" rows are the branch-less baseline.
_PRESETS = {
    ("news_articles", "lstm"): dict(lstm_units=140, dense_a_units=0, dense_b_units=320, batch_size=64,
                                    hidden_activation="relu", optimizer="adadelta", drop_c=0.5, drop_d=0.2),
    ("news_articles", "ein"): dict(lstm_units=90, dense_a_units=320, dense_b_units=60, batch_size=64,
                                   hidden_activation="relu", optimizer="adam", drop_c=0.5, drop_d=0.1),
    ("twitter", "lstm"): dict(lstm_units=180, dense_a_units=0, dense_b_units=120, batch_size=64,
                              hidden_activation="relu", optimizer="adadelta", drop_c=0.5, drop_d=0.2),
    ("twitter", "ein"): dict(lstm_units=180, dense_a_units=100, dense_b_units=60, batch_size=64,
                             hidden_activation="relu", optimizer="rmsprop", drop_c=0.2, drop_d=0.2),
    ("stop_clickbait", "lstm"): dict(lstm_units=120, dense_a_units=0, dense_b_units=260, batch_size=32,
                                     hidden_activation="tanh", optimizer="rmsprop", drop_c=0.2, drop_d=0.2,
                                     output_mode="sigmoid_binary"),
    ("stop_clickbait", "ein"): dict(lstm_units=120, dense_a_units=60, dense_b_units=120, batch_size=32,
                                    hidden_activation="relu", optimizer="adam", drop_c=0.2, drop_d=0.2,
                                    output_mode="sigmoid_binary"),
}


def preset(dataset: str, model: str = "ein", **overrides) -> EinConfig:
    """Tuned architecture for a dataset, e.g. ``preset("twitter", "ein")``."""
    key = (dataset.lower(), model.lower())
    if key not in _PRESETS:
        raise ConfigError(f"no preset for {key}; known: {sorted(_PRESETS)}")
    return EinConfig(**{**_PRESETS[key], **overrides})
