"""Report tables, co-clustering scatter export, run manifests and feature curves."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..datamodel import BipartiteGraph, Dataset, is_farm
from ..features import FEATURE_NAMES, N_FEATURES
from .metrics import ConfusionCounts, compute_metrics, pct, split


class ReportError(OSError):
    pass


@dataclass(frozen=True)
class ReportRow:
    campaign: str
    counts: ConfusionCounts
    total: int | None = None
    training: int | None = None
    testing: int | None = None

    def metrics(self) -> dict[str, float]:
        c = self.counts
        return {
            "precision": float(c.precision_frac()), "recall": float(c.recall_frac()),
            "accuracy": float(c.accuracy_frac()), "f1": float(c.f1_frac()),
        }


REPORT_COLUMNS = ("Campaign", "Total", "Training", "Testing", "TP", "FP", "TN", "FN",
                  "Precision", "Recall", "Accuracy", "F1")


def _blank(x) -> str:
    return "" if x is None else str(x)


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise ReportError(f"{path}: {exc.strerror or exc}") from None


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def markdown_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Pipe table padded so columns line up in plain text."""
    cells = [list(map(str, header))] + [list(map(str, r)) for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["| " + " | ".join(c.ljust(w) for c, w in zip(cells[0], widths)) + " |",
             "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
    for r in cells[1:]:
        lines.append("| " + " | ".join(c.ljust(w) for c, w in zip(r, widths)) + " |")
    return "\n".join(lines) + "\n"


def export_report(runs: Sequence[ReportRow], path) -> tuple[Path, Path]:
    """Write ``path`` as CSV (raw ratios) and a sibling ``.md`` table (integer percentages)."""
    path = Path(path)
    csv_rows, md_rows = [], []
    for r in runs:
        c, m = r.counts, r.metrics()
        base = [r.campaign, _blank(r.total), _blank(r.training), _blank(r.testing), c.tp, c.fp, c.tn, c.fn]
        csv_rows.append(base + [repr(round(m[k], 12)) for k in ("precision", "recall", "accuracy", "f1")])
        md_rows.append(base + [f"{pct(v)}%" for v in (c.precision_frac(), c.recall_frac(),
                                                     c.accuracy_frac(), c.f1_frac())])
    md_path = path.with_suffix(".md")
    _write(path, _csv_text(REPORT_COLUMNS, csv_rows))
    _write(md_path, markdown_table(REPORT_COLUMNS, md_rows))
    return path, md_path


def export_f1_matrix(f1: dict[str, dict[str, float]], classifiers: Sequence[str], path) -> tuple[Path, Path]:
    """Campaign-by-classifier F1 table (rows keep insertion order)."""
    path = Path(path)
    header = ["Campaign", *classifiers]
    csv_rows = [[camp] + [repr(round(row[k], 12)) for k in classifiers] for camp, row in f1.items()]
    md_rows = [[camp] + [f"{pct(row[k])}%" for k in classifiers] for camp, row in f1.items()]
    md_path = path.with_suffix(".md")
    _write(path, _csv_text(header, csv_rows))
    _write(md_path, markdown_table(header, md_rows))
    return path, md_path


def _outcome(predicted_farm: bool, truly_farm: bool) -> str:
    if predicted_farm:
        return "TP" if truly_farm else "FP"
    return "FN" if truly_farm else "TN"


def export_scatter(graph: BipartiteGraph, assignment, truth: dict[str, str], path,
                   cluster_labels: dict[int, str] | None = None) -> Path:
    """One row per like edge, with users and pages ordered by cluster.

    The outcome compares the class of the user's cluster with the user's
    ground truth. ``cluster_labels`` defaults to majority labeling.
    """
    from ..cocluster import label_clusters

    if cluster_labels is None:
        cluster_labels = label_clusters(assignment, truth)
    missing = [u for u in graph.row_ids if u not in assignment.user_cluster or u not in truth]
    if missing:
        raise KeyError(f"user {missing[0]!r} has no cluster or ground truth")
    rows_order = sorted(range(len(graph.row_ids)), key=lambda i: (assignment.user_cluster[graph.row_ids[i]], i))
    cols_order = sorted(range(len(graph.col_ids)),
                        key=lambda j: (assignment.page_cluster.get(graph.col_ids[j], 0), j))
    row_pos = np.empty(len(rows_order), dtype=int)
    row_pos[rows_order] = np.arange(len(rows_order))
    col_pos = np.empty(len(cols_order), dtype=int)
    col_pos[cols_order] = np.arange(len(cols_order))
    out = []
    coo = graph.biadjacency.tocoo()
    for i, j in zip(coo.row.tolist(), coo.col.tolist()):
        uid = graph.row_ids[i]
        pred = cluster_labels[assignment.user_cluster[uid]] == "farm"
        out.append((int(row_pos[i]), int(col_pos[j]), _outcome(pred, is_farm(truth[uid]))))
    out.sort()
    path = Path(path)
    _write(path, _csv_text(("user_index", "page_index", "outcome"), out))
    return path


# -- manifests ---------------------------------------------------------------

def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=_jsonable)


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if hasattr(x, "__dataclass_fields__"):
        return asdict(x)
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if hasattr(x, "value"):
        return x.value
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def config_hash(config) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def dataset_fingerprint(ds: Dataset) -> str:
    """Order-independent digest of accounts, posts, likes and pages."""
    h = hashlib.sha256()
    for part in (ds.accounts, ds.posts, ds.likes, ds.pages):
        lines = sorted(canonical_json(asdict(x)) for x in part)
        h.update(str(len(lines)).encode())
        for line in lines:
            h.update(line.encode())
            h.update(b"\n")
    return h.hexdigest()


@dataclass
class RunManifest:
    config_hash: str
    seed: int
    dataset_fingerprint: str
    classifier: str
    hyperparams: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=1, default=_jsonable) + "\n"

    def write(self, path) -> Path:
        path = Path(path)
        _write(path, self.to_json())
        return path

    @classmethod
    def read(cls, path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))


# -- incremental feature curve -------------------------------------------------

def _feature_indices(feature_order) -> list[int]:
    idx = [FEATURE_NAMES.index(f) if isinstance(f, str) else int(f) for f in feature_order
           if not isinstance(f, str) or f in FEATURE_NAMES]
    if len(idx) != len(feature_order) or sorted(idx) != list(range(N_FEATURES)):
        raise ValueError(f"feature_order must be a permutation of the {N_FEATURES} features")
    return idx


def incremental_feature_curve(vectors, feature_order, classifier_config: dict | None = None,
                              seed: int = 0, train_fraction: float = 0.8,
                              split_data=None) -> list[tuple[int, float]]:
    """Test F1 when training on the first j features of ``feature_order``.

    ``classifier_config`` is ``{"kind": "svm", "gamma": g, "nu": n}`` or a
    baseline ``{"kind": "nb", ...}``. SVM hyperparameters that are not given
    are chosen once by grid search on all features and reused for every prefix.
    """
    from ..classify import SvmHyperParams, grid_search, train_baseline, train_svm

    order = _feature_indices(feature_order)
    cfg = dict(classifier_config or {"kind": "svm"})
    kind = cfg.pop("kind", "svm")
    train, test = split_data if split_data is not None else split(vectors, train_fraction, seed)
    truth = [v.label for v in test]
    if kind == "svm" and not ("gamma" in cfg and "nu" in cfg):
        cfg = {**cfg, **asdict(grid_search(train, seed=seed).params)}
    curve = []
    for j in range(1, N_FEATURES + 1):
        idx = order[:j]
        if kind == "svm":
            model = train_svm(train, SvmHyperParams(cfg["gamma"], cfg["nu"]), feature_idx=idx)
        else:
            model = train_baseline(kind, train, seed=seed, feature_idx=idx, **cfg)
        curve.append((j, compute_metrics(model.predict_many(test), truth)[1].f1))
    return curve
