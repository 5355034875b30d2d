"""From-scratch numpy implementation of the emotionally-infused network."""

from .checkpoint import load_checkpoint, save_checkpoint
from .config import ConfigError, EinConfig, preset
from .layers import attention_backward, attention_forward, loss, lstm_backward, lstm_forward
from .model import Batch, EinModel, EncodedData
from .optim import make_optimizer, optimizer_step
from .training import TrainHistory, TrainingError, fit, gradient_check, predict, prepare, train

__all__ = [
    "Batch", "ConfigError", "EinConfig", "EinModel", "EncodedData", "TrainHistory",
    "TrainingError", "attention_backward", "attention_forward", "fit", "gradient_check",
    "load_checkpoint", "loss", "lstm_backward", "lstm_forward", "make_optimizer",
    "optimizer_step", "predict", "prepare", "preset", "save_checkpoint", "train",
]
