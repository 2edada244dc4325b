"""End-to-end experiment: generate, co-cluster, extract, classify, report."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .classify import BASELINE_KINDS, GridSpec, grid_search, train_baseline
from .cocluster import CoclusterConfig, cocluster, label_clusters
from .datamodel import BASELINE, Dataset, build_bipartite, farm_label
from .eval.metrics import ConfusionCounts, compute_metrics, split
from .eval.report import (
    ReportRow, RunManifest, config_hash, dataset_fingerprint, export_f1_matrix, export_report,
    export_scatter, incremental_feature_curve, _csv_text, _write,
)
from .features import FEATURE_NAMES, LEXICAL_SLICE, N_FEATURES, NONLEXICAL_SLICE, FeatureVector, extract_features
from .synthgen import CAMPAIGNS, default_paper_calibration, generate

log = logging.getLogger(__name__)

ALL_FEATURES = tuple(range(N_FEATURES))
LEXICAL_FEATURES = ALL_FEATURES[LEXICAL_SLICE]
NONLEXICAL_FEATURES = ALL_FEATURES[NONLEXICAL_SLICE]

# population "english" keeps only users with at least one English post
POPULATIONS = ("all", "english")


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    scale: float = 0.5
    n_pages: int = 3000
    k: int = 2
    min_user_degree: int = 10
    min_page_degree: int = 10
    kmeans_restarts: int = 10
    train_fraction: float = 0.8
    folds: int = 5
    grid_min_exp: int = -10
    grid_max_exp: int = 0
    campaigns: tuple[str, ...] = CAMPAIGNS
    jobs: int = 1

    def grid(self) -> GridSpec:
        vals = tuple(2.0 ** e for e in range(self.grid_min_exp, self.grid_max_exp + 1))
        return GridSpec(vals, vals)


def campaign_users(ds: Dataset, campaign: str) -> list[str]:
    keep = (BASELINE, farm_label(campaign))
    return [a.id for a in ds.accounts if a.label in keep]


def campaign_vectors(vectors: Sequence[FeatureVector], campaign: str, population: str = "all") -> list[FeatureVector]:
    if population not in POPULATIONS:
        raise ValueError(f"population must be one of {POPULATIONS}")
    keep = (BASELINE, farm_label(campaign))
    out = [v for v in vectors if v.label in keep]
    if population == "english":
        out = [v for v in out if v.english_ratio > 0]
    return out


# -- co-clustering ------------------------------------------------------------

@dataclass
class CoclusterRun:
    campaign: str
    graph: object
    assignment: object
    cluster_labels: dict
    counts: ConfusionCounts


def cocluster_campaign(ds: Dataset, campaign: str, k: int = 2, seed: int = 0, min_user_degree: int = 10,
                       min_page_degree: int = 10, kmeans_restarts: int = 10) -> CoclusterRun:
    """Co-cluster the campaign's farm users together with the baseline users
    and score the farm-labeled clusters against ground truth."""
    users = set(campaign_users(ds, campaign))
    graph = build_bipartite((lk for lk in ds.likes if lk.user in users), min_user_degree, min_page_degree)
    assignment = cocluster(graph, CoclusterConfig(k=k, kmeans_restarts=kmeans_restarts, seed=seed))
    truth = ds.labels()
    labels = label_clusters(assignment, truth)
    pred = [labels[assignment.user_cluster[u]] for u in graph.row_ids]
    counts, _ = compute_metrics(pred, [truth[u] for u in graph.row_ids])
    return CoclusterRun(campaign, graph, assignment, labels, counts)


# -- classification -------------------------------------------------------------

@dataclass
class ClassifierRun:
    campaign: str
    feature_set: str
    population: str
    row: ReportRow
    params: dict
    cv_f1: float | None = None
    baseline_f1: dict = field(default_factory=dict)
    curve: list = field(default_factory=list)


def classify_campaign(vectors: Sequence[FeatureVector], campaign: str, feature_idx: Sequence[int],
                      feature_set: str, population: str, cfg: ExperimentConfig,
                      baselines: bool = False, curve: bool = False) -> ClassifierRun:
    pop = campaign_vectors(vectors, campaign, population)
    train, test = split(pop, cfg.train_fraction, cfg.seed)
    gs = grid_search(train, cfg.grid(), cfg.folds, cfg.seed, feature_idx=feature_idx)
    truth = [v.label for v in test]
    counts, _ = compute_metrics(gs.model.predict_many(test), truth)
    n_farm = sum(1 for v in pop if v.label != BASELINE)
    n_farm_train = sum(1 for v in train if v.label != BASELINE)
    row = ReportRow(campaign, counts, total=n_farm, training=n_farm_train, testing=n_farm - n_farm_train)
    run = ClassifierRun(campaign, feature_set, population, row, asdict(gs.params), gs.cv_f1)
    if baselines:
        run.baseline_f1["svm"] = float(counts.f1_frac())
        for kind in BASELINE_KINDS:
            m = train_baseline(kind, train, seed=cfg.seed, feature_idx=feature_idx)
            run.baseline_f1[kind] = compute_metrics(m.predict_many(test), truth)[1].f1
    if curve:
        run.curve = incremental_feature_curve(
            pop, list(FEATURE_NAMES), {"kind": "svm", **asdict(gs.params)}, seed=cfg.seed, split_data=(train, test))
    return run


def _campaign_job(args):
    vectors, campaign, cfg = args
    return [
        classify_campaign(vectors, campaign, NONLEXICAL_FEATURES, "nonlexical", "all", cfg),
        classify_campaign(vectors, campaign, LEXICAL_FEATURES, "lexical", "english", cfg),
        classify_campaign(vectors, campaign, ALL_FEATURES, "combined", "all", cfg, baselines=True, curve=True),
    ]


# -- reproduction -----------------------------------------------------------------

TABLES = {
    "table2": "co-clustering",
    "table5": "nonlexical",
    "table6": "lexical",
    "table7": "combined",
    "table8": "classifiers",
}
CLASSIFIER_COLUMNS = ("svm",) + BASELINE_KINDS


@dataclass
class Reproduction:
    config: ExperimentConfig
    dataset: Dataset
    cocluster_runs: list[CoclusterRun]
    classifier_runs: dict[str, list[ClassifierRun]]
    files: list[Path]


def run_experiment(cfg: ExperimentConfig, dataset: Dataset | None = None,
                   vectors: Sequence[FeatureVector] | None = None) -> tuple[Dataset, list, dict]:
    ds = dataset if dataset is not None else generate(
        default_paper_calibration(scale=cfg.scale, seed=cfg.seed, n_pages=cfg.n_pages))
    log.info("dataset: %d accounts, %d posts, %d likes", len(ds.accounts), len(ds.posts), len(ds.likes))
    cc = [cocluster_campaign(ds, c, cfg.k, cfg.seed, cfg.min_user_degree, cfg.min_page_degree, cfg.kmeans_restarts)
          for c in cfg.campaigns]
    fv = list(vectors) if vectors is not None else extract_features(ds)
    jobs = [(fv, c, cfg) for c in cfg.campaigns]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(_campaign_job, jobs))
    else:
        results = [_campaign_job(j) for j in jobs]
    runs = {"nonlexical": [], "lexical": [], "combined": []}
    for per_campaign in results:
        for r in per_campaign:
            runs[r.feature_set].append(r)
    return ds, cc, runs


def reproduce(cfg: ExperimentConfig, out_dir, dataset: Dataset | None = None) -> Reproduction:
    """Run every experiment and write the report tables, figure data and manifests under ``out_dir``."""
    out = Path(out_dir)
    ds, cc, runs = run_experiment(cfg, dataset)
    files: list[Path] = []
    base = dict(config_hash=config_hash(asdict(cfg)), seed=cfg.seed,
                dataset_fingerprint=dataset_fingerprint(ds), config=asdict(cfg))

    rows = [ReportRow(r.campaign, r.counts, total=r.graph.shape[0]) for r in cc]
    files += export_report(rows, out / "table2.csv")
    truth = ds.labels()
    for r in cc:
        files.append(export_scatter(r.graph, r.assignment, truth, out / f"fig1_{r.campaign}.csv", r.cluster_labels))
    files.append(RunManifest(classifier="cocluster", hyperparams={"k": cfg.k},
                             metrics={r.campaign: asdict(r.counts) for r in cc}, **base)
                 .write(out / "table2.manifest.json"))

    for table, fs in (("table5", "nonlexical"), ("table6", "lexical"), ("table7", "combined")):
        files += export_report([r.row for r in runs[fs]], out / f"{table}.csv")
        files.append(RunManifest(
            classifier="svm", hyperparams={r.campaign: r.params for r in runs[fs]},
            metrics={r.campaign: {**asdict(r.row.counts), "cv_f1": r.cv_f1, **r.row.metrics()} for r in runs[fs]},
            **{**base, "config": {**base["config"], "feature_set": fs, "population": runs[fs][0].population}},
        ).write(out / f"{table}.manifest.json"))

    f1 = {r.campaign: r.baseline_f1 for r in runs["combined"]}
    files += export_f1_matrix(f1, CLASSIFIER_COLUMNS, out / "table8.csv")
    files.append(RunManifest(classifier=",".join(CLASSIFIER_COLUMNS),
                             hyperparams={"baselines": _baseline_defaults()}, metrics=f1, **base)
                 .write(out / "table8.manifest.json"))

    curve_rows = [(r.campaign, j, FEATURE_NAMES[j - 1], repr(round(f, 12))) for r in runs["combined"] for j, f in r.curve]
    p = out / "fig5.csv"
    _write(p, _csv_text(("campaign", "n_features", "feature_added", "f1"), curve_rows))
    files.append(p)
    return Reproduction(cfg, ds, cc, runs, files)


def _baseline_defaults() -> dict:
    from .classify.baselines import DEFAULTS
    return {k: dict(v) for k, v in DEFAULTS.items()}

