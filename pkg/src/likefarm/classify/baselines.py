"""Comparison classifiers: decision tree, AdaBoost, kNN, random forest, Gaussian naive Bayes.

Tree ensembles and kNN wrap scikit-learn estimators; naive Bayes is written
out because its variance floor is absolute rather than scaled by the
largest feature variance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.ensemble import AdaBoostClassifier, RandomForestClassifier
from sklearn.neighbors import KNeighborsClassifier
from sklearn.tree import DecisionTreeClassifier

KINDS = ("tree", "adaboost", "knn", "forest", "nb")

DEFAULTS = {
    "tree": {"max_depth": None},
    "adaboost": {"n_rounds": 50},
    "knn": {"k": 5},
    "forest": {"n_trees": 100},
    "nb": {"var_floor": 1e-9},
}


class GaussianNaiveBayes:
    def __init__(self, var_floor: float = 1e-9):
        self.var_floor = var_floor

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        self.classes_ = np.unique(y)
        self.theta_ = np.array([X[y == c].mean(0) for c in self.classes_])
        self.var_ = np.array([np.maximum(X[y == c].var(0), self.var_floor) for c in self.classes_])
        self.log_prior_ = np.log(np.array([(y == c).mean() for c in self.classes_]))
        return self

    def joint_log_likelihood(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = []
        for mu, var, lp in zip(self.theta_, self.var_, self.log_prior_):
            ll = -0.5 * (np.log(2 * np.pi * var) + (X - mu) ** 2 / var).sum(1)
            out.append(lp + ll)
        return np.column_stack(out)

    def predict(self, X) -> np.ndarray:
        return self.classes_[self.joint_log_likelihood(X).argmax(1)]


def make_estimator(kind: str, seed: int = 0, **params):
    if kind not in KINDS:
        raise ValueError(f"unknown classifier kind {kind!r}; expected one of {KINDS}")
    p = {**DEFAULTS[kind], **params}
    if kind == "tree":
        return DecisionTreeClassifier(criterion="gini", max_depth=p["max_depth"], random_state=seed)
    if kind == "adaboost":
        return AdaBoostClassifier(
            DecisionTreeClassifier(max_depth=1), n_estimators=p["n_rounds"], random_state=seed
        )
    if kind == "knn":
        return KNeighborsClassifier(n_neighbors=p["k"], metric="euclidean")
    if kind == "forest":
        return RandomForestClassifier(
            n_estimators=p["n_trees"], max_features="sqrt", max_depth=None, random_state=seed
        )
    return GaussianNaiveBayes(var_floor=p["var_floor"])


@dataclass
class BaselineModel:
    kind: str
    params: dict
    estimator: object
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def predict(self, X) -> np.ndarray:
        return self.estimator.predict(np.atleast_2d(np.asarray(X, dtype=float)))


def fit_baseline(kind: str, X, y, seed: int = 0, **params) -> BaselineModel:
    y = np.asarray(y)
    if len(np.unique(y)) < 2:
        raise ValueError("training data must contain both classes")
    est = make_estimator(kind, seed, **params)
    est.fit(np.asarray(X, dtype=float), y)
    return BaselineModel(kind, {**DEFAULTS[kind], **params}, est, seed)
