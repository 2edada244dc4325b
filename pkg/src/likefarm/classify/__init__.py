"""Feature-vector classifiers: the grid-searched nu-SVM and five baselines."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..datamodel import BASELINE, is_farm
from ..eval.metrics import compute_metrics, stratified_folds
from ..features import FEATURE_NAMES, FeatureVector, Scaler, fit_scaler
from .baselines import KINDS as BASELINE_KINDS
from .baselines import BaselineModel, fit_baseline
from .svm import (
    ConvergenceError, InfeasibleNuError, NuSvm, SvmHyperParams, fit_nu_svm, nu_upper_bound,
    rbf_kernel, rbf_matrix, solve_dual,
)

MODEL_FORMAT_VERSION = 1
FARM = "farm"

__all__ = [
    "BASELINE_KINDS", "BaselineModel", "ConvergenceError", "GridSpec", "InfeasibleNuError",
    "SvmHyperParams", "SvmModel", "decision_value", "grid_search", "load_model", "predict",
    "predict_baseline", "rbf_kernel", "save_model", "train_baseline", "train_svm",
]


def _xy(vectors: Sequence, feature_idx=None) -> tuple[np.ndarray, np.ndarray, list[str]]:
    X = np.array([v.values for v in vectors], dtype=float)
    if feature_idx is not None:
        X = X[:, list(feature_idx)]
    y = np.array([1.0 if is_farm(v.label) else -1.0 for v in vectors])
    return X, y, [v.label for v in vectors]


def _positive_label(labels: Sequence[str]) -> str:
    farms = sorted({lab for lab in labels if is_farm(lab)})
    return farms[0] if len(farms) == 1 else FARM


def _row(vector, feature_idx) -> np.ndarray:
    vals = vector.values if isinstance(vector, FeatureVector) else vector
    x = np.asarray(vals, dtype=float)
    if feature_idx is not None and isinstance(vector, FeatureVector):
        x = x[list(feature_idx)]
    return x


@dataclass(frozen=True)
class SvmModel:
    svm: NuSvm
    scaler: Scaler
    feature_idx: tuple[int, ...]
    positive_label: str = FARM
    negative_label: str = BASELINE

    @property
    def hyperparams(self) -> SvmHyperParams:
        return self.svm.params

    @property
    def support_vectors(self) -> np.ndarray:
        return self.svm.support_vectors

    @property
    def dual_coefficients(self) -> np.ndarray:
        return self.svm.dual_coefficients

    @property
    def bias(self) -> float:
        return self.svm.bias

    def decision_values(self, vectors: Sequence) -> np.ndarray:
        X = np.array([_row(v, self.feature_idx) for v in vectors], dtype=float)
        if X.ndim != 2 or X.shape[1] != len(self.feature_idx):
            raise ValueError(f"dimension mismatch: model expects {len(self.feature_idx)} features")
        return self.svm.decision_function(self.scaler.transform(X))

    def predict_many(self, vectors: Sequence) -> list[str]:
        return [self.positive_label if d >= 0 else self.negative_label for d in self.decision_values(vectors)]


def train_svm(train_vectors: Sequence[FeatureVector], params: SvmHyperParams,
              feature_idx: Sequence[int] | None = None, tol: float = 1e-4) -> SvmModel:
    """Standardize on the training set and fit a nu-SVM (farm = positive class)."""
    idx = tuple(range(len(FEATURE_NAMES))) if feature_idx is None else tuple(feature_idx)
    X, y, labels = _xy(train_vectors, idx)
    if not (np.any(y > 0) and np.any(y < 0)):
        raise ValueError("training data must contain both classes")
    scaler = fit_scaler(X)
    svm = fit_nu_svm(scaler.transform(X), y, params, tol=tol)
    return SvmModel(svm, scaler, idx, _positive_label(labels))


def decision_value(model: SvmModel, vector) -> float:
    return float(model.decision_values([vector])[0])


def predict(model: SvmModel, vector) -> str:
    """Class label for one vector; a decision value of exactly 0 goes to farm."""
    return model.positive_label if decision_value(model, vector) >= 0 else model.negative_label


# -- grid search -----------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    gammas: tuple[float, ...] = tuple(2.0 ** e for e in range(-10, 1))
    nus: tuple[float, ...] = tuple(2.0 ** e for e in range(-10, 1))


@dataclass(frozen=True)
class GridResult:
    params: SvmHyperParams
    model: SvmModel
    cv_f1: float
    table: dict


class NoFeasiblePointError(ValueError):
    pass


def _f1(pred_pos: np.ndarray, truth_pos: np.ndarray) -> float:
    return compute_metrics(pred_pos.tolist(), truth_pos.tolist())[1].f1


def grid_search(train_vectors: Sequence[FeatureVector], grid_spec: GridSpec | None = None, folds: int = 5,
                seed: int = 0, feature_idx: Sequence[int] | None = None, tol: float = 1e-4) -> GridResult:
    """Exhaustive search over (gamma, nu) by mean stratified-CV F1.

    Points that are infeasible for any fold are skipped. Ties go to the
    smaller gamma, then the smaller nu. The returned model is refit on all
    of ``train_vectors``.
    """
    grid = grid_spec or GridSpec()
    idx = tuple(range(len(FEATURE_NAMES))) if feature_idx is None else tuple(feature_idx)
    X, y, _ = _xy(train_vectors, idx)
    fold_idx = stratified_folds(y > 0, folds, seed)
    prepared = []
    for k in range(folds):
        val = fold_idx[k]
        tr = np.concatenate([fold_idx[j] for j in range(folds) if j != k])
        sc = fit_scaler(X[tr])
        prepared.append((sc.transform(X[tr]), y[tr], sc.transform(X[val]), y[val]))

    scores: dict[tuple[float, float], list[float]] = {}
    gammas = sorted(grid.gammas)
    nus = sorted(grid.nus)
    for Xtr, ytr, Xva, yva in prepared:
        bound = nu_upper_bound(ytr)
        for g in gammas:
            Ktr = rbf_matrix(Xtr, Xtr, g)
            Kva = rbf_matrix(Xva, Xtr, g)
            for nu in nus:
                key = (g, nu)
                if key in scores and scores[key] is None:
                    continue
                if nu > bound + 1e-12:
                    scores[key] = None
                    continue
                try:
                    alpha, _, b, _, _ = solve_dual(Ktr, ytr, nu, tol=tol)
                except ConvergenceError:
                    scores[key] = None
                    continue
                dec = Kva @ (alpha * ytr) + b
                scores.setdefault(key, []).append(_f1(dec >= 0, yva > 0))

    best_key, best_f1 = None, -1.0
    table = {}
    for g in gammas:
        for nu in nus:
            s = scores.get((g, nu))
            if not s or len(s) != folds:
                continue
            m = float(np.mean(s))
            table[(g, nu)] = m
            if m > best_f1:
                best_key, best_f1 = (g, nu), m
    if best_key is None:
        raise NoFeasiblePointError("no feasible (gamma, nu) grid point")
    params = SvmHyperParams(*best_key)
    return GridResult(params, train_svm(train_vectors, params, idx, tol=tol), best_f1, table)


# -- baselines -------------------------------------------------------------

@dataclass
class FittedBaseline:
    model: BaselineModel
    scaler: Scaler
    feature_idx: tuple[int, ...]
    positive_label: str = FARM
    train_X: np.ndarray | None = None
    train_y: np.ndarray | None = None

    def predict_many(self, vectors: Sequence) -> list[str]:
        X = np.array([_row(v, self.feature_idx) for v in vectors], dtype=float)
        out = self.model.predict(self.scaler.transform(X))
        return [self.positive_label if p > 0 else BASELINE for p in out]


def train_baseline(kind: str, train_vectors: Sequence[FeatureVector], seed: int = 0,
                   feature_idx: Sequence[int] | None = None, **params) -> FittedBaseline:
    idx = tuple(range(len(FEATURE_NAMES))) if feature_idx is None else tuple(feature_idx)
    X, y, labels = _xy(train_vectors, idx)
    scaler = fit_scaler(X)
    Xs = scaler.transform(X)
    model = fit_baseline(kind, Xs, y.astype(int), seed=seed, **params)
    return FittedBaseline(model, scaler, idx, _positive_label(labels), Xs, y)


def predict_baseline(model: FittedBaseline, vector) -> str:
    return model.predict_many([vector])[0]


# -- model.json ------------------------------------------------------------

def save_model(model, path) -> None:
    if isinstance(model, SvmModel):
        doc = {
            "format": "likefarm-model", "version": MODEL_FORMAT_VERSION, "classifier": "svm",
            "features": [FEATURE_NAMES[i] for i in model.feature_idx],
            "positive_label": model.positive_label, "negative_label": model.negative_label,
            "hyperparams": {"gamma": model.hyperparams.gamma, "nu": model.hyperparams.nu},
            "scaler": model.scaler.to_dict(),
            "support_vectors": model.support_vectors.tolist(),
            "dual_coefficients": model.dual_coefficients.tolist(),
            "bias": model.bias, "rho": model.svm.rho,
        }
    elif isinstance(model, FittedBaseline):
        # tree ensembles are stored as their (deterministic) training recipe
        doc = {
            "format": "likefarm-model", "version": MODEL_FORMAT_VERSION, "classifier": model.model.kind,
            "features": [FEATURE_NAMES[i] for i in model.feature_idx],
            "positive_label": model.positive_label, "negative_label": BASELINE,
            "params": model.model.params, "seed": model.model.seed,
            "scaler": model.scaler.to_dict(),
            "train_X": model.train_X.tolist(), "train_y": model.train_y.tolist(),
        }
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != "likefarm-model":
        raise ValueError(f"{path}: not a model file")
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported model format version {doc.get('version')}")
    idx = tuple(FEATURE_NAMES.index(n) for n in doc["features"])
    scaler = Scaler.from_dict(doc["scaler"])
    if doc["classifier"] == "svm":
        hp = SvmHyperParams(**doc["hyperparams"])
        svm = NuSvm(np.asarray(doc["support_vectors"], dtype=float).reshape(-1, len(idx)),
                    np.asarray(doc["dual_coefficients"], dtype=float), float(doc["bias"]),
                    float(doc["rho"]), hp)
        return SvmModel(svm, scaler, idx, doc["positive_label"], doc["negative_label"])
    X = np.asarray(doc["train_X"], dtype=float)
    y = np.asarray(doc["train_y"], dtype=float)
    bm = fit_baseline(doc["classifier"], X, y.astype(int), seed=doc["seed"], **doc["params"])
    return FittedBaseline(bm, scaler, idx, doc["positive_label"], X, y)
