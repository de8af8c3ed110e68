"""Mini-batch training: Adam with bias correction and validation-based early
stopping with best-weight restore."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ContractViolation


class AdamState:
    """Per-parameter first/second moment accumulators and the step counter."""

    def __init__(self, params: dict, learning_rate: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.t = 0
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = {name: np.zeros_like(p) for name, p in params.items()}
        self.v = {name: np.zeros_like(p) for name, p in params.items()}

    def step(self, params: dict, grads: dict):
        """Update params in place with one bias-corrected Adam step."""
        self.t += 1
        corr1 = 1.0 - self.beta1 ** self.t
        corr2 = 1.0 - self.beta2 ** self.t
        for name, p in params.items():
            g = grads[name]
            if g.shape != p.shape:
                raise ContractViolation(
                    f"gradient shape {g.shape} does not match parameter "
                    f"{name} shape {p.shape}")
            m = self.m[name]
            v = self.v[name]
            m += (1.0 - self.beta1) * (g - m)
            v += (1.0 - self.beta2) * (g * g - v)
            m_hat = m / corr1
            v_hat = v / corr2
            p -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


def adam_step(params: dict, grads: dict, state: AdamState) -> AdamState:
    state.step(params, grads)
    return state


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 32
    max_epochs: int = 50
    patience: int = 5
    val_fraction: float = 0.1
    learning_rate: float = 1e-3
    seed: int = 42

    def __post_init__(self):
        if self.patience < 1:
            raise ConfigurationError(f"patience must be >= 1, got {self.patience}")
        if not 0.0 < self.val_fraction < 0.5:
            raise ConfigurationError(
                f"val_fraction must be in (0, 0.5), got {self.val_fraction}")


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    val_accuracy: float


@dataclass
class TrainHistory:
    epochs: list = field(default_factory=list)
    best_epoch: int = 0

    def to_csv_rows(self):
        yield "epoch,train_loss,val_loss,val_acc"
        for rec in self.epochs:
            yield (f"{rec.epoch},{rec.train_loss!r},{rec.val_loss!r},"
                   f"{rec.val_accuracy!r}")


def _stratified_val_split(labels, val_fraction: float, rng: np.random.Generator):
    """Indices (train, val); the validation slice preserves class proportions."""
    n = len(labels)
    n_val = max(1, int(math.floor(val_fraction * n + 0.5)))
    by_class = {}
    for idx, lab in enumerate(labels):
        by_class.setdefault(lab, []).append(idx)
    val = []
    # Proportional floor allocation, remainder to the largest classes first.
    shares = {c: val_fraction * len(ix) for c, ix in by_class.items()}
    take = {c: int(math.floor(s)) for c, s in shares.items()}
    leftover = n_val - sum(take.values())
    order = sorted(by_class, key=lambda c: (-(shares[c] - take[c]), c))
    for c in order[:max(leftover, 0)]:
        take[c] += 1
    for c in sorted(by_class):
        ix = np.array(by_class[c])
        rng.shuffle(ix)
        val.extend(ix[: take[c]].tolist())
    val_set = set(val)
    train = [i for i in range(n) if i not in val_set]
    return train, sorted(val)


def _evaluate(model, docs):
    """Mean cross-entropy and accuracy in inference mode."""
    total = 0.0
    correct = 0
    for doc in docs:
        probs, _ = model.forward(doc, train=False)
        total += -np.log(max(probs[doc.label], 1e-300))
        if int(np.argmax(probs)) == doc.label:
            correct += 1
    return float(total / len(docs)), correct / len(docs)


def fit(model, train_set, config: TrainConfig = TrainConfig()):
    """Train until validation loss stops improving for `patience` epochs.

    A stratified val_fraction slice is carved off first and never trained on.
    Shuffling, the validation split and dropout each draw from their own
    seeded stream, so the run is fully reproducible. The model is restored to
    the best epoch's weights before returning.
    """
    train_set = list(train_set)
    if len(train_set) < 10:
        raise ConfigurationError(
            f"training set has {len(train_set)} documents, need at least 10")
    split_rng, shuffle_rng, dropout_rng = (
        np.random.default_rng(s)
        for s in np.random.SeedSequence(config.seed).spawn(3)
    )
    labels = [doc.label for doc in train_set]
    train_ix, val_ix = _stratified_val_split(labels, config.val_fraction, split_rng)
    train_docs = [train_set[i] for i in train_ix]
    val_docs = [train_set[i] for i in val_ix]

    opt = AdamState(model.params(), learning_rate=config.learning_rate)
    history = TrainHistory()
    best_loss = np.inf
    best_weights = model.snapshot()
    stale = 0
    for epoch in range(1, config.max_epochs + 1):
        order = shuffle_rng.permutation(len(train_docs))
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = [train_docs[i] for i in order[start : start + config.batch_size]]
            loss, grads = model.loss_and_grads(batch, dropout_rng=dropout_rng)
            opt.step(model.params(), grads)
            epoch_loss += loss * len(batch)
        val_loss, val_acc = _evaluate(model, val_docs)
        history.epochs.append(EpochRecord(epoch, float(epoch_loss / len(train_docs)),
                                          val_loss, val_acc))
        if val_loss < best_loss:
            best_loss = val_loss
            best_weights = model.snapshot()
            history.best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    model.restore(best_weights)
    return model, history
