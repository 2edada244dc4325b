"""Confusion counts, derived metrics, percentage rounding and stratified splits."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..datamodel import is_farm


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def precision_frac(self) -> Fraction:
        d = self.tp + self.fp
        return Fraction(self.tp, d) if d else Fraction(0)

    def recall_frac(self) -> Fraction:
        d = self.tp + self.fn
        return Fraction(self.tp, d) if d else Fraction(0)

    def accuracy_frac(self) -> Fraction:
        return Fraction(self.tp + self.tn, self.total) if self.total else Fraction(0)

    def f1_frac(self) -> Fraction:
        # harmonic mean of precision and recall, reduced to counts
        d = 2 * self.tp + self.fp + self.fn
        return Fraction(2 * self.tp, d) if self.tp else Fraction(0)


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    accuracy: float
    f1: float

    @classmethod
    def from_counts(cls, c: ConfusionCounts) -> "Metrics":
        return cls(float(c.precision_frac()), float(c.recall_frac()),
                   float(c.accuracy_frac()), float(c.f1_frac()))


def _positive(x) -> bool:
    if isinstance(x, str):
        return x == "farm" or is_farm(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    return bool(x > 0)


def confusion(predictions: Sequence, truth: Sequence) -> ConfusionCounts:
    if len(predictions) != len(truth):
        raise ValueError(f"length mismatch: {len(predictions)} predictions vs {len(truth)} labels")
    tp = fp = tn = fn = 0
    for p, t in zip(predictions, truth):
        p, t = _positive(p), _positive(t)
        if p and t:
            tp += 1
        elif p:
            fp += 1
        elif t:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp, fp, tn, fn)


def compute_metrics(predictions: Sequence, truth: Sequence) -> tuple[ConfusionCounts, Metrics]:
    """Farm is the positive class. Predictions and truth may be booleans,
    +1/-1 (or 1/0) values, or label strings."""
    c = confusion(predictions, truth)
    return c, Metrics.from_counts(c)


def pct(value) -> int:
    """Round a ratio to an integer percentage, halves rounding up."""
    q = Fraction(value) if not isinstance(value, float) else Fraction(value).limit_denominator(10**9)
    num = q * 100
    return int((2 * num.numerator + num.denominator) // (2 * num.denominator))


def percentages(c: ConfusionCounts) -> dict[str, int]:
    return {
        "precision": pct(c.precision_frac()),
        "recall": pct(c.recall_frac()),
        "accuracy": pct(c.accuracy_frac()),
        "f1": pct(c.f1_frac()),
    }


class SplitError(ValueError):
    pass


def _binary(v) -> bool:
    label = v.label if hasattr(v, "label") else v
    return _positive(label)


def split(vectors: Sequence, train_fraction: float = 0.8, seed: int = 0):
    """Stratified train/test split; each class contributes
    round-half-up(n * train_fraction) members to the training set."""
    if not 0 < train_fraction < 1:
        raise SplitError("train_fraction must lie in (0, 1)")
    cls = np.array([_binary(v) for v in vectors])
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for positive in (True, False):
        idx = np.flatnonzero(cls == positive)
        if len(idx) < 2:
            raise SplitError(f"class {'farm' if positive else 'baseline'} has {len(idx)} members; need at least 2")
        idx = idx[rng.permutation(len(idx))]
        n_train = int(Fraction(len(idx)) * Fraction(train_fraction).limit_denominator(10**6) + Fraction(1, 2))
        n_train = min(max(n_train, 1), len(idx) - 1)
        train_idx.extend(idx[:n_train].tolist())
        test_idx.extend(idx[n_train:].tolist())
    train_idx.sort()
    test_idx.sort()
    return [vectors[i] for i in train_idx], [vectors[i] for i in test_idx]


def stratified_folds(labels: Sequence[bool], n_folds: int, seed: int) -> list[np.ndarray]:
    """Fold index arrays, each class dealt round-robin after a seeded shuffle."""
    if n_folds < 2:
        raise ValueError("need at least 2 folds")
    labels = np.asarray(labels, dtype=bool)
    rng = np.random.default_rng(seed)
    fold_of = np.empty(len(labels), dtype=int)
    offset = 0
    for positive in (True, False):
        idx = np.flatnonzero(labels == positive)
        idx = idx[rng.permutation(len(idx))]
        fold_of[idx] = (np.arange(len(idx)) + offset) % n_folds
        offset += len(idx)
    return [np.flatnonzero(fold_of == f) for f in range(n_folds)]
