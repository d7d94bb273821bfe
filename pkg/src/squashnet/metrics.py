"""Classification metrics built on integer count tables."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = ["ConfusionMatrix"]


@dataclass(eq=False)
class ConfusionMatrix:
    """Square count table: rows are true classes, columns are predictions."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError(f"counts must be square, got shape {counts.shape}")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        self.counts = counts

    @classmethod
    def from_predictions(cls, y_true, y_pred, n_classes: int) -> "ConfusionMatrix":
        y_true = np.asarray(y_true, dtype=np.int64)
        y_pred = np.asarray(y_pred, dtype=np.int64)
        if y_true.shape != y_pred.shape or y_true.ndim != 1:
            raise ValueError("y_true and y_pred must be 1-D and the same length")
        for name, arr in (("true", y_true), ("predicted", y_pred)):
            if arr.size and (arr.min() < 0 or arr.max() >= n_classes):
                raise ValueError(f"{name} labels outside [0, {n_classes})")
        counts = np.zeros((n_classes, n_classes), dtype=np.int64)
        np.add.at(counts, (y_true, y_pred), 1)
        return cls(counts)

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.counts))

    @property
    def accuracy_fraction(self) -> Fraction:
        """Exact accuracy as a rational number of counts."""
        if self.total == 0:
            raise ValueError("empty confusion matrix")
        return Fraction(self.correct, self.total)

    @property
    def error_fraction(self) -> Fraction:
        return 1 - self.accuracy_fraction

    def accuracy(self) -> float:
        """Correct predictions over total predictions."""
        if self.total == 0:
            raise ValueError("empty confusion matrix")
        return self.correct / self.total

    def error(self) -> float:
        """Incorrect predictions over total; exact complement of accuracy()."""
        return 1.0 - self.accuracy()

    def to_lists(self):
        return [[int(v) for v in row] for row in self.counts]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)
