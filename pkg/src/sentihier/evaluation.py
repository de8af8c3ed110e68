"""Experimental protocols: stratified k-fold cross-validation, learning curves
over bootstrap resamples of a fixed 70/30 split, and metric computation.

The fold plan, the 70/30 split and the resample draws depend only on
(labels, seed), never on the classifier, so every classifier sees identical
data partitions for a given seed.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ContractViolation


def round_half_away(x: float) -> int:
    """round() with halves away from zero, independent of banker's rounding."""
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


@dataclass(frozen=True)
class FoldPlan:
    k: int
    folds: tuple  # k tuples of indices; disjoint, covering the dataset
    seed: int

    def train_test(self, fold: int):
        test = list(self.folds[fold])
        train = [i for f in range(self.k) if f != fold for i in self.folds[f]]
        return sorted(train), sorted(test)


def stratified_kfold(labels, k: int, seed: int) -> FoldPlan:
    """Per class: seeded shuffle, then deal round-robin across folds.

    Per-class fold counts therefore differ by at most one; classes smaller
    than k simply land in the first folds of their deal.
    """
    labels = list(labels)
    if k < 2:
        raise ConfigurationError(f"k must be >= 2, got {k}")
    if k > len(labels):
        raise ConfigurationError(f"k={k} exceeds dataset size {len(labels)}")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xF07D]))
    folds = [[] for _ in range(k)]
    by_class = {}
    for idx, lab in enumerate(labels):
        by_class.setdefault(lab, []).append(idx)
    for lab in sorted(by_class):
        ix = np.array(by_class[lab])
        rng.shuffle(ix)
        for pos, idx in enumerate(ix.tolist()):
            folds[pos % k].append(idx)
    return FoldPlan(k=k, folds=tuple(tuple(sorted(f)) for f in folds), seed=seed)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    confusion: np.ndarray  # rows = gold, cols = predicted
    accuracy: float
    per_class: tuple  # ClassMetrics per class index

    @property
    def num_classes(self):
        return len(self.per_class)


def compute_metrics(gold, predicted, num_classes: int | None = None) -> MetricsReport:
    """Accuracy plus per-class precision/recall/F1 from the confusion matrix.

    A class with zero precision and recall gets F1 = 0 (no division error).
    """
    gold = list(gold)
    predicted = list(predicted)
    if len(gold) != len(predicted):
        raise ContractViolation(
            f"gold has {len(gold)} entries, predicted has {len(predicted)}")
    if not gold:
        raise ContractViolation("compute_metrics on empty sequences")
    C = num_classes if num_classes is not None else max(max(gold), max(predicted)) + 1
    confusion = np.zeros((C, C), dtype=np.int64)
    for g, p in zip(gold, predicted):
        confusion[g, p] += 1
    accuracy = float(np.trace(confusion)) / len(gold)
    per_class = []
    for c in range(C):
        tp = confusion[c, c]
        gold_c = confusion[c, :].sum()
        pred_c = confusion[:, c].sum()
        precision = float(tp / pred_c) if pred_c else 0.0
        recall = float(tp / gold_c) if gold_c else 0.0
        f1 = (2 * precision * recall / (precision + recall)) if precision + recall else 0.0
        per_class.append(ClassMetrics(precision, recall, f1, int(gold_c)))
    return MetricsReport(confusion=confusion, accuracy=accuracy, per_class=tuple(per_class))


@dataclass
class FoldResult:
    fold: int
    report: MetricsReport
    train_seconds: float
    test_seconds: float
    history: object = None


def cross_validate(fit_predict, labels, k: int = 10, seed: int = 42,
                   num_classes: int | None = None, threads: int = 1):
    """Run the k-fold protocol for one classifier.

    fit_predict(train_indices, test_indices, fold_seed) must train on the
    train indices and return a dict with at least "predictions" (one class
    index per test index, in order); it may also report "history",
    "train_seconds" and "test_seconds". Returns (list of FoldResult, pooled
    MetricsReport). Fold seeds are pre-generated, so running folds in
    parallel cannot change any result.
    """
    labels = list(labels)
    C = num_classes if num_classes is not None else max(labels) + 1
    plan = stratified_kfold(labels, k, seed)
    fold_seeds = [int(s.generate_state(1)[0])
                  for s in np.random.SeedSequence([seed, 0xCF0]).spawn(k)]

    def run_fold(fold):
        train_ix, test_ix = plan.train_test(fold)
        t0 = time.perf_counter()
        try:
            out = fit_predict(train_ix, test_ix, fold_seeds[fold])
        except Exception as exc:
            raise type(exc)(f"fold {fold}: {exc}") from exc
        elapsed = time.perf_counter() - t0
        preds = list(out["predictions"])
        report = compute_metrics([labels[i] for i in test_ix], preds, C)
        return FoldResult(fold, report,
                          out.get("train_seconds", elapsed),
                          out.get("test_seconds", 0.0),
                          out.get("history")), preds, test_ix

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outs = list(pool.map(run_fold, range(k)))
    else:
        outs = [run_fold(f) for f in range(k)]
    results = []
    pooled_gold = []
    pooled_pred = []
    for res, preds, test_ix in outs:
        results.append(res)
        pooled_gold.extend(labels[i] for i in test_ix)
        pooled_pred.extend(preds)
    pooled = compute_metrics(pooled_gold, pooled_pred, C)
    return results, pooled


def stratified_split_70_30(labels, seed: int):
    """One seeded stratified split; train size = N - floor(0.3*N).

    This convention gives 926 -> 649 and 341 -> 239, which plain
    round-half-away of 0.7*N does not (926 -> 648).
    """
    labels = list(labels)
    n = len(labels)
    n_train = n - int(math.floor(0.3 * n + 1e-9))
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x7030]))
    by_class = {}
    for idx, lab in enumerate(labels):
        by_class.setdefault(lab, []).append(idx)
    shares = {c: 0.7 * len(ix) for c, ix in by_class.items()}
    take = {c: int(math.floor(s)) for c, s in shares.items()}
    leftover = n_train - sum(take.values())
    order = sorted(by_class, key=lambda c: (-(shares[c] - take[c]), c))
    for c in order[:max(leftover, 0)]:
        take[c] += 1
    train, test = [], []
    for c in sorted(by_class):
        ix = np.array(by_class[c])
        rng.shuffle(ix)
        train.extend(ix[: take[c]].tolist())
        test.extend(ix[take[c] :].tolist())
    return sorted(train), sorted(test)


@dataclass(frozen=True)
class CurvePoint:
    fraction: float
    resample_size: int
    test_accuracy: float


def resample_plan(labels, fractions, seed: int):
    """The split plus one bootstrap draw per fraction, fixed for all classifiers."""
    train_ix, test_ix = stratified_split_70_30(labels, seed)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xB007]))
    draws = []
    for frac in fractions:
        size = round_half_away(frac * len(train_ix))
        picks = rng.integers(0, len(train_ix), size=size)
        draws.append((frac, [train_ix[i] for i in picks]))
    return train_ix, test_ix, draws


def learning_curve(fit_predict, labels, fractions=(0.2, 0.4, 0.6, 0.8, 1.0),
                   seed: int = 42, num_classes: int | None = None):
    """Bootstrap learning curve on a fixed stratified 70/30 split.

    Returns (list of CurvePoint, list of skipped-point warnings).
    """
    fractions = list(fractions)
    if any(not 0.0 < f <= 1.0 for f in fractions) or fractions != sorted(fractions):
        raise ConfigurationError(f"fractions must be ascending and in (0, 1]: {fractions}")
    labels = list(labels)
    C = num_classes if num_classes is not None else max(labels) + 1
    train_ix, test_ix, draws = resample_plan(labels, fractions, seed)
    point_seeds = [int(s.generate_state(1)[0])
                   for s in np.random.SeedSequence([seed, 0xC0]).spawn(len(draws))]
    points = []
    warnings = []
    gold = [labels[i] for i in test_ix]
    for (frac, sample_ix), pseed in zip(draws, point_seeds):
        if len(sample_ix) < C:
            warnings.append(f"fraction {frac}: resample size {len(sample_ix)} < {C} classes, skipped")
            continue
        preds = list(fit_predict(sample_ix, test_ix, pseed)["predictions"])
        report = compute_metrics(gold, preds, C)
        points.append(CurvePoint(frac, len(sample_ix), report.accuracy))
    return points, warnings


def report_to_csv_rows(report: MetricsReport, label_names=None):
    names = label_names or [str(c) for c in range(report.num_classes)]
    yield "class,precision,recall,f1,support"
    for c, m in enumerate(report.per_class):
        yield f"{names[c]},{m.precision!r},{m.recall!r},{m.f1!r},{m.support}"
    yield f"accuracy,{report.accuracy!r},,,{int(report.confusion.sum())}"


def report_to_markdown(report: MetricsReport, label_names=None) -> str:
    names = label_names or [str(c) for c in range(report.num_classes)]
    width = max(8, max(len(n) for n in names))
    lines = [
        f"| {'class'.ljust(width)} | P     | R     | F1    | support |",
        f"|{'-' * (width + 2)}|-------|-------|-------|---------|",
    ]
    for c, m in enumerate(report.per_class):
        lines.append(
            f"| {names[c].ljust(width)} | {m.precision:.3f} | {m.recall:.3f} "
            f"| {m.f1:.3f} | {m.support:7d} |")
    lines.append(f"| {'accuracy'.ljust(width)} | {report.accuracy:.3f} |       |       "
                 f"| {int(report.confusion.sum()):7d} |")
    return "\n".join(lines)
