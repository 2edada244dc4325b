"""Per-user 16-dimensional feature vectors and train-fold standardization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .datamodel import Dataset
from .lexical import LEXICAL_FIELDS, LexicalFeatures, english_ratio, lexical_profile
from .nonlexical import NONLEXICAL_FIELDS, NonLexicalFeatures, nonlexical_profile

FEATURE_NAMES: tuple[str, ...] = LEXICAL_FIELDS + NONLEXICAL_FIELDS
N_FEATURES = len(FEATURE_NAMES)
LEXICAL_SLICE = slice(0, len(LEXICAL_FIELDS))
NONLEXICAL_SLICE = slice(len(LEXICAL_FIELDS), N_FEATURES)


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]
    user: str
    label: str
    english_ratio: float = 0.0

    def __post_init__(self):
        if len(self.values) != N_FEATURES:
            raise FeatureError(f"expected {N_FEATURES} values, got {len(self.values)}")

    def as_dict(self) -> dict:
        d = {"user": self.user, "label": self.label, "english_ratio": self.english_ratio}
        d.update(zip(FEATURE_NAMES, self.values))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureVector":
        try:
            values = tuple(float(d[name]) for name in FEATURE_NAMES)
        except KeyError as exc:
            raise FeatureError(f"missing feature {exc.args[0]!r}") from None
        return cls(values, d["user"], d["label"], float(d.get("english_ratio", 0.0)))


def assemble(lexical: LexicalFeatures, nonlexical: NonLexicalFeatures, english_ratio: float,
             user: str = "", label: str = "unknown",
             lexical_user: str | None = None, nonlexical_user: str | None = None) -> FeatureVector:
    """Concatenate the two feature blocks, zeroing the lexical block for users
    without English posts."""
    if lexical_user is not None and nonlexical_user is not None and lexical_user != nonlexical_user:
        raise FeatureError(f"feature blocks belong to different users: {lexical_user!r} != {nonlexical_user!r}")
    lex = lexical.as_tuple() if english_ratio > 0 else (0.0,) * len(LEXICAL_FIELDS)
    values = tuple(float(v) for v in lex + nonlexical.as_tuple())
    for name, v in zip(FEATURE_NAMES, values):
        if not math.isfinite(v):
            raise FeatureError(f"non-finite value for {name}: {v}")
    if not math.isfinite(english_ratio):
        raise FeatureError("non-finite english_ratio")
    return FeatureVector(values, user, label, float(english_ratio))


def extract_features(dataset: Dataset) -> list[FeatureVector]:
    """One feature vector per account, in account order."""
    by_author = dataset.posts_by_author()
    out = []
    for acc in dataset.accounts:
        posts = by_author[acc.id]
        r = english_ratio(posts).r
        out.append(assemble(lexical_profile(posts), nonlexical_profile(posts), r, acc.id, acc.label))
    return out


@dataclass(frozen=True)
class Scaler:
    mean: np.ndarray
    std: np.ndarray

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.std

    def inverse_transform(self, Z) -> np.ndarray:
        return np.asarray(Z, dtype=float) * self.std + self.mean

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Scaler":
        return cls(np.asarray(d["mean"], dtype=float), np.asarray(d["std"], dtype=float))


def _as_matrix(vectors) -> np.ndarray:
    if len(vectors) and isinstance(vectors[0], FeatureVector):
        return np.array([v.values for v in vectors], dtype=float)
    return np.atleast_2d(np.asarray(vectors, dtype=float))


def fit_scaler(train_vectors: Sequence) -> Scaler:
    """Per-dimension standardization fitted on training data; constant
    dimensions get a unit scale so they pass through unchanged."""
    X = _as_matrix(train_vectors)
    if X.shape[0] < 2:
        raise FeatureError("need at least 2 training vectors to fit a scaler")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    const = std == 0
    std[const] = 1.0
    mean[const] = 0.0
    return Scaler(mean, std)


def apply_scaler(scaler: Scaler, vector):
    if isinstance(vector, FeatureVector):
        vals = tuple(float(v) for v in scaler.transform(vector.values))
        return FeatureVector(vals, vector.user, vector.label, vector.english_ratio)
    return scaler.transform(vector)
