"""Classifier pipelines for the evaluation harness.

Each pipeline owns the fold-local preprocessing (vocabulary built from the
training indices only, embedding matrix assembly) and exposes a fit_predict
closure compatible with evaluation.cross_validate / learning_curve.
"""

import time

import numpy as np

from . import baseline
from .embeddings import EmbeddingTable, random_table
from .errors import ConfigurationError
from .model import Document, HiCnnLstmModel, ModelConfig
from .textprep import build_vocab, index_document, tokenize_document
from .train import TrainConfig, fit

CLASSIFIER_NAMES = ("hicnnlstm", "nb")


def embedding_matrix_for(vocab, table: EmbeddingTable | None, dim: int,
                         embedding_seed: int) -> np.ndarray:
    """One row per vocabulary index; UNK and PAD stay zero.

    With no table (random mode), each token gets a seeded uniform vector that
    depends only on (embedding_seed, token), so it is identical across folds.
    """
    if table is None:
        table = random_table(vocab.index_to_token[2:], dim, embedding_seed)
    elif table.dim != dim:
        raise ConfigurationError(
            f"embedding table dim {table.dim} != configured dim {dim}")
    matrix = np.zeros((len(vocab), dim), dtype=np.float64)
    for idx, token in enumerate(vocab.index_to_token[2:], start=2):
        matrix[idx] = table.lookup(token)
    return matrix


def prepare(dataset):
    """Tokenize every sample once; returns (tokenized docs, class indices)."""
    tokenized = [tokenize_document(text) for text in dataset.texts()]
    return tokenized, dataset.labels()


class HiCnnLstmClassifier:
    """Hierarchical CNN-BiLSTM pipeline."""

    name = "hicnnlstm"

    def __init__(self, model_config: ModelConfig, train_config: TrainConfig,
                 table: EmbeddingTable | None = None, embedding_seed: int = 42):
        self.model_config = model_config
        self.train_config = train_config
        self.table = table
        self.embedding_seed = embedding_seed

    def fit_predict_factory(self, tokenized, labels):
        def fit_predict(train_ix, test_ix, seed):
            vocab = build_vocab(tokenized[i] for i in train_ix)
            matrix = embedding_matrix_for(vocab, self.table,
                                          self.model_config.embedding_dim,
                                          self.embedding_seed)
            def to_doc(i, with_label):
                sents = tuple(tuple(s) for s in index_document(tokenized[i], vocab))
                return Document(sents, labels[i] if with_label else None)
            train_docs = [to_doc(i, True) for i in train_ix]
            cfg = ModelConfig(**{**self.model_config.__dict__, "seed": seed})
            tcfg = TrainConfig(**{**self.train_config.__dict__, "seed": seed})
            model = HiCnnLstmModel(cfg, matrix, vocab.fingerprint())
            t0 = time.perf_counter()
            model, history = fit(model, train_docs, tcfg)
            t1 = time.perf_counter()
            preds = [model.predict(to_doc(i, False)) for i in test_ix]
            t2 = time.perf_counter()
            return {"predictions": preds, "history": history,
                    "train_seconds": t1 - t0, "test_seconds": t2 - t1}
        return fit_predict


class NaiveBayesClassifier:
    """Multinomial NB bag-of-words pipeline."""

    name = "nb"

    def __init__(self, alpha: float = 1.0):
        self.alpha = alpha

    def fit_predict_factory(self, tokenized, labels):
        num_classes = max(labels) + 1
        def fit_predict(train_ix, test_ix, seed):
            vocab = build_vocab(tokenized[i] for i in train_ix)
            def to_doc(i, with_label):
                sents = tuple(tuple(s) for s in index_document(tokenized[i], vocab))
                return Document(sents, labels[i] if with_label else None)
            t0 = time.perf_counter()
            nb = baseline.nb_fit([to_doc(i, True) for i in train_ix],
                                 len(vocab), num_classes, self.alpha)
            t1 = time.perf_counter()
            preds = [baseline.nb_predict(nb, to_doc(i, False)) for i in test_ix]
            t2 = time.perf_counter()
            return {"predictions": preds, "history": None,
                    "train_seconds": t1 - t0, "test_seconds": t2 - t1}
        return fit_predict


def make_classifier(spec: str, model_config: ModelConfig, train_config: TrainConfig,
                    table: EmbeddingTable | None, embedding_seed: int = 42):
    if spec == "hicnnlstm":
        return HiCnnLstmClassifier(model_config, train_config, table, embedding_seed)
    if spec == "nb":
        return NaiveBayesClassifier()
    raise ConfigurationError(f"unknown classifier {spec!r}; choose from {CLASSIFIER_NAMES}")
