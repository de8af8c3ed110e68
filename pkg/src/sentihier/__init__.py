"""Hierarchical CNN-BiLSTM sentiment classification for software engineering
texts, implemented from first principles on numpy, with a reproducible
cross-validation and learning-curve experiment harness."""

__version__ = "0.1.0"
