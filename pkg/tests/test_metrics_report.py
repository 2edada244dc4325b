import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import sparse

from likefarm.cocluster import ClusterAssignment
from likefarm.datamodel import BASELINE, BipartiteGraph, farm_label
from likefarm.eval.metrics import (
    ConfusionCounts, SplitError, compute_metrics, pct, percentages, split, stratified_folds,
)
from likefarm.eval.report import (
    REPORT_COLUMNS, ReportError, ReportRow, RunManifest, config_hash, dataset_fingerprint, export_report,
    export_scatter, incremental_feature_curve,
)
from likefarm.features import FEATURE_NAMES, N_FEATURES, FeatureVector
from likefarm.pipeline import campaign_vectors
from oracles import half_up_percent

FARM = farm_label("X")


def _vectors(n_farm, n_base):
    return [FeatureVector((float(i),) * N_FEATURES, f"u{i:05d}", FARM if i < n_farm else BASELINE)
            for i in range(n_farm + n_base)]


# -- split -------------------------------------------------------------------

def test_split_even():
    train, test = split(_vectors(100, 100), 0.8, 0)
    assert sum(v.label == FARM for v in train) == 80 and sum(v.label == BASELINE for v in train) == 80
    assert len(test) == 40


def test_split_campaign_sizes():
    train, _ = split(_vectors(583, 1408), 0.8, 0)
    assert sum(v.label == FARM for v in train) == 466


def test_split_rejects_tiny_class():
    with pytest.raises(SplitError):
        split(_vectors(1, 10), 0.8, 0)
    with pytest.raises(SplitError):
        split(_vectors(10, 10), 1.0, 0)


@given(st.integers(2, 60), st.integers(2, 60), st.floats(0.05, 0.95), st.integers(0, 1000))
@settings(max_examples=80, deadline=None)
def test_split_properties(n_farm, n_base, frac, seed):
    data = _vectors(n_farm, n_base)
    train, test = split(data, frac, seed)
    assert split(data, frac, seed) == (train, test)
    assert sorted(v.user for v in train + test) == [v.user for v in data]
    for label, n in ((FARM, n_farm), (BASELINE, n_base)):
        k = sum(v.label == label for v in train)
        assert abs(k - n * frac) <= 1 and 1 <= k < n


@given(st.lists(st.booleans(), min_size=10, max_size=80), st.integers(2, 5), st.integers(0, 99))
@settings(max_examples=50, deadline=None)
def test_folds_partition_and_stratify(labels, k, seed):
    folds = stratified_folds(labels, k, seed)
    assert sorted(np.concatenate(folds).tolist()) == list(range(len(labels)))
    pos = [int(np.asarray(labels)[f].sum()) for f in folds]
    assert max(pos) - min(pos) <= 1


# -- metrics -------------------------------------------------------------------

def _from_counts(tp, fp, tn, fn):
    truth = [1] * tp + [0] * fp + [0] * tn + [1] * fn
    pred = [1] * tp + [1] * fp + [0] * tn + [0] * fn
    return compute_metrics(pred, truth)


def test_stealthy_cocluster_row():
    c, m = _from_counts(523, 588, 18, 0)
    assert c == ConfusionCounts(523, 588, 18, 0)
    assert pct(m.precision) == 47 and pct(m.recall) == 100


def test_naive_cocluster_row():
    _, m = _from_counts(681, 9, 0, 4)
    assert m.precision == pytest.approx(0.987, abs=5e-4) and m.recall == pytest.approx(0.994, abs=5e-4)
    assert (pct(m.precision), pct(m.recall)) == (99, 99)


def test_f1_from_precision_recall():
    p, r = 0.99, 0.97
    assert 2 * p * r / (p + r) == pytest.approx(0.98, abs=5e-3)
    c, m = _from_counts(113, 1, 281, 4)
    assert m.f1 == pytest.approx(2 * m.precision * m.recall / (m.precision + m.recall))
    assert percentages(c) == {"precision": 99, "recall": 97, "accuracy": 99, "f1": 98}


def test_perfect_percentages():
    assert percentages(ConfusionCounts(113, 0, 240, 0)) == {"precision": 100, "recall": 100, "accuracy": 100,
                                                            "f1": 100}


def test_zero_denominators():
    _, m = compute_metrics([0, 0], [0, 0])
    assert (m.precision, m.recall, m.accuracy, m.f1) == (0.0, 0.0, 1.0, 0.0)


def test_length_mismatch():
    with pytest.raises(ValueError, match="length"):
        compute_metrics([1], [1, 0])


def test_label_strings():
    c, _ = compute_metrics(["farm", BASELINE, FARM], [FARM, FARM, BASELINE])
    assert c == ConfusionCounts(1, 1, 0, 1)


counts = st.tuples(*[st.integers(0, 500)] * 4)


@given(counts)
def test_f1_properties(c4):
    c = ConfusionCounts(*c4)
    f1 = c.f1_frac()
    if c.tp == 0:
        assert f1 == 0
    assert (f1 == 1) == (c.tp > 0 and c.fp == 0 and c.fn == 0)
    assert 0 <= f1 <= 1


@given(counts)
def test_percentages_match_integer_oracle(c4):
    c = ConfusionCounts(*c4)
    p = percentages(c)
    assert p["precision"] == half_up_percent(c.tp, c.tp + c.fp)
    assert p["recall"] == half_up_percent(c.tp, c.tp + c.fn)
    assert p["accuracy"] == half_up_percent(c.tp + c.tn, c.total)
    assert p["f1"] == (half_up_percent(2 * c.tp, 2 * c.tp + c.fp + c.fn) if c.tp else 0)


@given(st.lists(st.tuples(st.booleans(), st.booleans()), max_size=50), st.randoms(use_true_random=False))
def test_metrics_invariant_under_reordering(pairs, rnd):
    shuffled = pairs[:]
    rnd.shuffle(shuffled)
    a = compute_metrics([p for p, _ in pairs], [t for _, t in pairs])
    b = compute_metrics([p for p, _ in shuffled], [t for _, t in shuffled])
    assert a == b


def test_pct_half_up():
    assert pct(0.125) == 13 and pct(0.5) == 50 and pct(0.985) == 99 and pct(0.0049) == 0


# -- exports -----------------------------------------------------------------------

def test_scatter_perfect_clustering(tmp_path):
    g = BipartiteGraph(sparse.csr_matrix(np.array([[1, 0], [0, 1]])), ("f", "b"), ("p1", "p2"))
    a = ClusterAssignment({"f": 0, "b": 1}, {"p1": 0, "p2": 1})
    path = export_scatter(g, a, {"f": FARM, "b": BASELINE}, tmp_path / "s.csv")
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 2 and {r["outcome"] for r in rows} <= {"TP", "TN"}
    g4 = BipartiteGraph(sparse.csr_matrix(np.ones((2, 2))), ("f", "b"), ("p1", "p2"))
    rows = list(csv.DictReader(export_scatter(g4, a, {"f": FARM, "b": BASELINE}, tmp_path / "s4.csv").open()))
    assert len(rows) == 4 and {r["outcome"] for r in rows} == {"TP", "TN"}
    assert list(rows[0]) == ["user_index", "page_index", "outcome"]


def test_scatter_outcomes(tmp_path):
    g = BipartiteGraph(sparse.csr_matrix(np.ones((4, 1))), ("a", "b", "c", "d"), ("p",))
    a = ClusterAssignment({"a": 0, "b": 0, "c": 1, "d": 1}, {"p": 0})
    truth = {"a": FARM, "b": BASELINE, "c": FARM, "d": BASELINE}
    path = export_scatter(g, a, truth, tmp_path / "s.csv", cluster_labels={0: "farm", 1: "baseline"})
    rows = list(csv.DictReader(path.open()))
    assert sorted(r["outcome"] for r in rows) == ["FN", "FP", "TN", "TP"]


def test_report_one_row(tmp_path):
    row = ReportRow("BL-USA", ConfusionCounts(113, 0, 240, 0), 353, 1411, 353)
    csv_path, md_path = export_report([row], tmp_path / "r.csv")
    lines = csv_path.read_text().splitlines()
    assert len(lines) == 2 and lines[0].split(",") == list(REPORT_COLUMNS)
    md = md_path.read_text().splitlines()
    assert len(md) == 3 and md[2].count("100%") == 4
    assert float(lines[1].split(",")[-1]) == 1.0


def test_report_io_error_names_path(tmp_path):
    (tmp_path / "file").write_text("")
    with pytest.raises(ReportError, match="file"):
        export_report([ReportRow("x", ConfusionCounts(1, 0, 1, 0))], tmp_path / "file" / "r.csv")


def test_manifest_round_trip(tmp_path, small_dataset, small_config):
    m = RunManifest(config_hash(small_config.to_dict()), 11, dataset_fingerprint(small_dataset), "svm",
                    {"gamma": 0.5, "nu": 0.25}, {"f1": 0.9})
    m.write(tmp_path / "m.json")
    assert RunManifest.read(tmp_path / "m.json") == m
    assert json.loads((tmp_path / "m.json").read_text())["classifier"] == "svm"
    assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
    assert len(m.dataset_fingerprint) == 64


# -- incremental curve ----------------------------------------------------------------

def test_incremental_curve(small_vectors):
    pop = campaign_vectors(small_vectors, "AL-USA")
    cfg = {"kind": "svm", "gamma": 0.125, "nu": 0.25}
    curve = incremental_feature_curve(pop, list(FEATURE_NAMES), cfg, seed=0)
    assert [j for j, _ in curve] == list(range(1, N_FEATURES + 1))
    assert all(0 <= f <= 1 for _, f in curve)
    # the last prefix is the all-features run
    from likefarm.classify import SvmHyperParams, train_svm
    train, test = split(pop, 0.8, 0)
    model = train_svm(train, SvmHyperParams(0.125, 0.25))
    full = compute_metrics(model.predict_many(test), [v.label for v in test])[1].f1
    assert curve[-1][1] == full


def test_incremental_curve_single_feature(small_vectors):
    pop = campaign_vectors(small_vectors, "AL-USA")
    train, test = split(pop, 0.8, 0)
    order = [12] + [i for i in range(N_FEATURES) if i != 12]
    curve = incremental_feature_curve(pop, order, {"kind": "nb"}, seed=0)
    from likefarm.classify import train_baseline
    m = train_baseline("nb", train, feature_idx=[12])
    assert curve[0][1] == compute_metrics(m.predict_many(test), [v.label for v in test])[1].f1


@pytest.mark.parametrize("order", [list(range(15)), list(range(15)) + [0], ["nope"] + list(FEATURE_NAMES[1:])])
def test_incremental_curve_rejects_bad_order(small_vectors, order):
    with pytest.raises(ValueError, match="permutation"):
        incremental_feature_curve(small_vectors, order, {"kind": "nb"})
