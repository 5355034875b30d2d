"""Emotion-lexicon features, an emotionally-infused attention-LSTM classifier,
classical baselines and the statistical analyses around them."""

__version__ = "0.1.0"
