"""Gold-standard dataset ingestion: RFC-4180 CSV loading, the Jira
emotion-to-polarity mapping, and class-distribution verification.

Class index order is fixed as [negative, positive] for two-class datasets and
[negative, neutral, positive] for three-class ones, so indices are stable
across runs and checkpoints.
"""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError, ParseError

CLASS_ORDER_2 = ("negative", "positive")
CLASS_ORDER_3 = ("negative", "neutral", "positive")
GERRIT_ORDER = ("negative", "non-negative")

JIRA_EMOTION_MAP = {
    "love": "positive",
    "joy": "positive",
    "anger": "negative",
    "sadness": "negative",
}


@dataclass(frozen=True)
class LabeledDataset:
    name: str
    samples: tuple          # (raw text, canonical label string) pairs
    label_set: tuple        # ordered canonical labels; index = class index

    @property
    def class_counts(self) -> dict:
        counts = {lab: 0 for lab in self.label_set}
        for _, lab in self.samples:
            counts[lab] += 1
        return counts

    def label_index(self, label: str) -> int:
        return self.label_set.index(label)

    def labels(self):
        return [self.label_set.index(lab) for _, lab in self.samples]

    def texts(self):
        return [text for text, _ in self.samples]


def map_jira_emotions(label: str) -> str:
    try:
        return JIRA_EMOTION_MAP[label]
    except KeyError:
        raise ParseError(
            f"unmapped Jira emotion label {label!r}: only "
            f"{sorted(JIRA_EMOTION_MAP)} are part of the protocol") from None


def map_gerrit_merge(label: str) -> str:
    """Positive and neutral collapse into one non-negative class."""
    if label == "negative":
        return "negative"
    if label in ("positive", "neutral", "non-negative"):
        return "non-negative"
    raise ParseError(f"unknown Gerrit label {label!r}")


LABEL_MAPPINGS = {
    "none": lambda lab: lab,
    "jira_emotions": map_jira_emotions,
    "gerrit_merge": map_gerrit_merge,
}


def _canonical_label_set(labels) -> tuple:
    present = set(labels)
    for order in (CLASS_ORDER_2, CLASS_ORDER_3, GERRIT_ORDER):
        if present == set(order):
            return order
    return tuple(sorted(present))


def load_csv(path, text_column: str, label_column: str, name: str = "",
             label_mapping: str = "none") -> LabeledDataset:
    """Load a (text, label) CSV. Labels are lowercased, then mapped."""
    mapping = LABEL_MAPPINGS.get(label_mapping)
    if mapping is None:
        raise ConfigurationError(f"unknown label mapping {label_mapping!r}")
    path = Path(path)
    if not path.exists():
        raise ParseError(f"{path}: no such file")
    samples = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError(f"{path}: empty file, no header")
        for col in (text_column, label_column):
            if col not in reader.fieldnames:
                raise ParseError(
                    f"{path}: missing column {col!r}; header has {reader.fieldnames}")
        for row in reader:
            rownum = reader.line_num
            text = (row[text_column] or "").strip()
            label = (row[label_column] or "").strip().lower()
            if not text:
                raise ParseError(f"{path}: empty text at row {rownum}")
            if not label:
                raise ParseError(f"{path}: empty label at row {rownum}")
            try:
                samples.append((text, mapping(label)))
            except ParseError as exc:
                raise ParseError(f"{path}: row {rownum}: {exc}") from None
    if not samples:
        raise ParseError(f"{path}: no data rows")
    return LabeledDataset(name=name or path.stem, samples=tuple(samples),
                          label_set=_canonical_label_set(lab for _, lab in samples))


def verify_distribution(ds: LabeledDataset, expected: dict,
                        tolerance: float = 0.5) -> list:
    """Compare observed class percentages with expected ones.

    Returns a list of warning strings; empty means everything matched within
    `tolerance` percentage points. Never raises on deviation.
    """
    total_pct = sum(expected.values())
    if abs(total_pct - 100.0) > tolerance:
        raise ConfigurationError(
            f"expected percentages sum to {total_pct}, not 100 +/- {tolerance}")
    warnings = []
    n = len(ds.samples)
    counts = ds.class_counts
    for label, pct in expected.items():
        observed = 100.0 * counts.get(label, 0) / n
        if abs(observed - pct) > tolerance:
            warnings.append(
                f"{ds.name}: class {label!r} observed {observed:.1f}%, "
                f"expected {pct:.1f}% (+/- {tolerance})")
    return warnings


@dataclass(frozen=True)
class DatasetConfig:
    name: str
    path: Path
    text_column: str
    label_column: str
    label_mapping: str = "none"
    expected_samples: int | None = None
    expected_distribution: dict = field(default_factory=dict)


def load_dataset_config(path) -> DatasetConfig:
    """Parse a key=value config file; relative data paths resolve against it."""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"{path}: no such config file")
    values = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}: line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    for required in ("name", "path", "text_column", "label_column"):
        if required not in values:
            raise ConfigurationError(f"{path}: missing required key {required!r}")
    data_path = Path(values["path"])
    if not data_path.is_absolute():
        data_path = path.parent / data_path
    distribution = {}
    if values.get("expected_distribution"):
        for part in values["expected_distribution"].split(","):
            label, _, pct = part.partition(":")
            try:
                distribution[label.strip()] = float(pct)
            except ValueError:
                raise ConfigurationError(
                    f"{path}: bad expected_distribution entry {part!r}") from None
    return DatasetConfig(
        name=values["name"],
        path=data_path,
        text_column=values["text_column"],
        label_column=values["label_column"],
        label_mapping=values.get("label_mapping", "none"),
        expected_samples=int(values["expected_samples"]) if values.get("expected_samples") else None,
        expected_distribution=distribution,
    )


def load_from_config(config: DatasetConfig) -> tuple:
    """Returns (dataset, warnings from the distribution check)."""
    ds = load_csv(config.path, config.text_column, config.label_column,
                  name=config.name, label_mapping=config.label_mapping)
    warnings = []
    if config.expected_samples is not None and len(ds.samples) != config.expected_samples:
        warnings.append(
            f"{ds.name}: {len(ds.samples)} samples, expected {config.expected_samples}")
    if config.expected_distribution:
        warnings.extend(verify_distribution(ds, config.expected_distribution))
    return ds, warnings
