"""Command-line entry point: ``likefarm <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, fields
from pathlib import Path

from . import __version__

SUBCOMMANDS = ("generate", "cocluster", "extract", "train", "evaluate", "report", "reproduce")


class CliError(Exception):
    pass


def _read_config_file(path) -> dict:
    from .synthgen import read_toml

    path = Path(path)
    if not path.is_file():
        raise CliError(f"{path}: no such file")
    if path.suffix == ".toml":
        return read_toml(path)
    return json.loads(path.read_text(encoding="utf-8"))


def _read_features(path):
    from .features import FeatureVector
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(FeatureVector.from_dict(json.loads(line)))
            except (ValueError, KeyError) as exc:
                raise CliError(f"{path}:{lineno}: {exc}") from None
    return out


def _feature_idx(feature_set: str):
    from .pipeline import ALL_FEATURES, LEXICAL_FEATURES, NONLEXICAL_FEATURES
    return {"combined": ALL_FEATURES, "lexical": LEXICAL_FEATURES, "nonlexical": NONLEXICAL_FEATURES}[feature_set]


def _out_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


# -- subcommands ----------------------------------------------------------------

def cmd_generate(args) -> int:
    from .datamodel import write_dataset
    from .synthgen import GenConfig, default_paper_calibration, generate, load_config
    from dataclasses import replace

    if args.config:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
    else:
        cfg = default_paper_calibration(scale=args.scale, seed=args.seed or 0, n_pages=args.n_pages)
    ds = generate(cfg)
    out = _out_dir(args.out)
    write_dataset(ds, out)
    (out / "config.json").write_text(json.dumps(GenConfig.to_dict(cfg), sort_keys=True, indent=1) + "\n")
    print(f"wrote {len(ds.accounts)} accounts, {len(ds.posts)} posts, {len(ds.likes)} likes to {out}")
    return 0


def cmd_cocluster(args) -> int:
    from .cocluster import CoclusterConfig, cocluster, label_clusters
    from .datamodel import BASELINE, build_bipartite, farm_label, load_dir
    from .eval.metrics import compute_metrics, percentages
    from .eval.report import RunManifest, config_hash, dataset_fingerprint, export_scatter

    ds = load_dir(args.indir)
    likes = ds.likes
    if args.campaign:
        keep = {a.id for a in ds.accounts if a.label in (BASELINE, farm_label(args.campaign))}
        likes = [lk for lk in likes if lk.user in keep]
    graph = build_bipartite(likes, args.min_user_degree, args.min_page_degree)
    cfg = CoclusterConfig(k=args.k, kmeans_restarts=args.restarts, seed=args.seed)
    assignment = cocluster(graph, cfg)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        for u in graph.row_ids:
            fh.write(json.dumps({"type": "user", "id": u, "cluster": assignment.user_cluster[u]}) + "\n")
        for p in graph.col_ids:
            fh.write(json.dumps({"type": "page", "id": p, "cluster": assignment.page_cluster[p]}) + "\n")
    truth = ds.labels()
    labels = label_clusters(assignment, truth)
    counts, _ = compute_metrics([labels[assignment.user_cluster[u]] for u in graph.row_ids],
                                [truth[u] for u in graph.row_ids])
    if args.scatter:
        export_scatter(graph, assignment, truth, args.scatter, labels)
    RunManifest(config_hash(asdict(cfg)), args.seed, dataset_fingerprint(ds), "cocluster",
                asdict(cfg), {**asdict(counts), **percentages(counts)},
                {**asdict(cfg), "campaign": args.campaign, "min_user_degree": args.min_user_degree,
                 "min_page_degree": args.min_page_degree}).write(out.with_suffix(".manifest.json"))
    print(f"{graph.shape[0]} users x {graph.shape[1]} pages; TP={counts.tp} FP={counts.fp} "
          f"TN={counts.tn} FN={counts.fn}")
    return 0


def cmd_extract(args) -> int:
    from .datamodel import load_dir
    from .features import extract_features

    ds = load_dir(args.indir)
    vectors = extract_features(ds)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        for v in vectors:
            fh.write(json.dumps(v.as_dict(), ensure_ascii=False) + "\n")
    print(f"wrote {len(vectors)} feature vectors to {out}")
    return 0


def _baseline_params(args) -> dict:
    return {k: v for k, v in {
        "tree": {"max_depth": args.max_depth},
        "adaboost": {"n_rounds": args.n_rounds},
        "knn": {"k": args.neighbors},
        "forest": {"n_trees": args.n_trees},
        "nb": {"var_floor": args.var_floor},
    }[args.classifier].items() if v is not None}


def cmd_train(args) -> int:
    from .classify import GridSpec, SvmHyperParams, grid_search, save_model, train_baseline, train_svm
    from .eval.metrics import split
    from .pipeline import campaign_vectors

    pop = campaign_vectors(_read_features(args.features), args.campaign, args.population)
    train, _ = split(pop, args.train_fraction, args.seed)
    idx = _feature_idx(args.feature_set)
    if args.classifier == "svm":
        if (args.gamma is None) != (args.nu is None):
            raise CliError("--gamma and --nu must be given together")
        if args.gamma is not None:
            model = train_svm(train, SvmHyperParams(args.gamma, args.nu), feature_idx=idx)
        else:
            vals = tuple(2.0 ** e for e in range(args.grid_min, args.grid_max + 1))
            model = grid_search(train, GridSpec(vals, vals), args.folds, args.seed, feature_idx=idx).model
        desc = f"gamma={model.hyperparams.gamma:g} nu={model.hyperparams.nu:g}"
    else:
        model = train_baseline(args.classifier, train, seed=args.seed, feature_idx=idx, **_baseline_params(args))
        desc = json.dumps(model.model.params, sort_keys=True)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_model(model, args.out)
    print(f"trained {args.classifier} on {len(train)} users ({desc}); wrote {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    from .classify import SvmModel, load_model
    from .datamodel import BASELINE
    from .eval.metrics import compute_metrics, percentages, split
    from .eval.report import ReportRow, RunManifest, config_hash, export_report
    from .pipeline import campaign_vectors
    import hashlib

    pop = campaign_vectors(_read_features(args.features), args.campaign, args.population)
    train, test = split(pop, args.train_fraction, args.seed)
    model = load_model(args.model)
    counts, _ = compute_metrics(model.predict_many(test), [v.label for v in test])
    n_farm = sum(1 for v in pop if v.label != BASELINE)
    n_train = sum(1 for v in train if v.label != BASELINE)
    row = ReportRow(args.campaign, counts, n_farm, n_train, n_farm - n_train)
    out = _out_dir(args.out)
    export_report([row], out / "evaluation.csv")
    kind = "svm" if isinstance(model, SvmModel) else model.model.kind
    run = {"campaign": args.campaign, "classifier": kind, "total": n_farm, "training": n_train, "testing": n_farm - n_train,
           "counts": asdict(counts)}
    (out / "evaluation.json").write_text(json.dumps(run, sort_keys=True, indent=1) + "\n")
    hp = asdict(model.hyperparams) if isinstance(model, SvmModel) else model.model.params
    cfg = {"campaign": args.campaign, "population": args.population, "train_fraction": args.train_fraction,
           "model": str(args.model)}
    fingerprint = hashlib.sha256(Path(args.features).read_bytes()).hexdigest()
    RunManifest(config_hash(cfg), args.seed, fingerprint, kind, hp,
                {**asdict(counts), **percentages(counts)}, cfg).write(out / "manifest.json")
    pc = percentages(counts)
    print(f"{args.campaign}: TP={counts.tp} FP={counts.fp} TN={counts.tn} FN={counts.fn} "
          f"precision={pc['precision']}% recall={pc['recall']}% accuracy={pc['accuracy']}% f1={pc['f1']}%")
    return 0


def cmd_report(args) -> int:
    from .eval.metrics import ConfusionCounts
    from .eval.report import ReportRow, export_report

    rows = []
    for path in args.runs:
        p = Path(path)
        if p.is_dir():
            p = p / "evaluation.json"
        try:
            d = json.loads(p.read_text(encoding="utf-8"))
            rows.append(ReportRow(d["campaign"], ConfusionCounts(**d["counts"]),
                                  d.get("total"), d.get("training"), d.get("testing")))
        except OSError as exc:
            raise CliError(f"{p}: {exc.strerror}") from None
        except (ValueError, KeyError, TypeError) as exc:
            raise CliError(f"{p}: malformed run file ({exc})") from None
    csv_path, md_path = export_report(rows, args.out)
    print(md_path.read_text(encoding="utf-8"), end="")
    return 0


def cmd_reproduce(args) -> int:
    from .pipeline import ExperimentConfig, reproduce

    names = {f.name for f in fields(ExperimentConfig)}
    merged = {}
    if args.config:
        file_cfg = _read_config_file(args.config)
        unknown = set(file_cfg) - names
        if unknown:
            raise CliError(f"{args.config}: unknown keys {sorted(unknown)}")
        merged.update(file_cfg)
    for name in names:
        val = getattr(args, name, None)
        if val is not None:
            merged[name] = val
    if "campaigns" in merged:
        merged["campaigns"] = tuple(merged["campaigns"])
    cfg = ExperimentConfig(**merged)
    result = reproduce(cfg, args.out)
    for p in result.files:
        if p.suffix == ".md":
            print(f"== {p.stem}")
            print(p.read_text(encoding="utf-8"), end="")
    print(f"wrote {len(result.files)} files to {args.out}")
    return 0


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from .classify import BASELINE_KINDS

    ap = argparse.ArgumentParser(prog="likefarm", description="Like-farm detection experiments.")
    ap.add_argument("--version", action="version", version=f"likefarm {__version__} (model format {_model_format()})")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a synthetic corpus")
    g.add_argument("--config", help="GenConfig as TOML or JSON (default: paper calibration)")
    g.add_argument("--scale", type=float, default=0.5)
    g.add_argument("--n-pages", type=int, default=3000)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("cocluster", help="co-cluster the user-page like graph")
    c.add_argument("--in", dest="indir", required=True)
    c.add_argument("--campaign", help="restrict to this campaign plus the baseline")
    c.add_argument("--k", type=int, default=2)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--restarts", type=int, default=10)
    c.add_argument("--min-user-degree", type=int, default=10)
    c.add_argument("--min-page-degree", type=int, default=10)
    c.add_argument("--out", required=True)
    c.add_argument("--scatter")
    c.set_defaults(func=cmd_cocluster)

    e = sub.add_parser("extract", help="compute per-user feature vectors")
    e.add_argument("--in", dest="indir", required=True)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_extract)

    def split_flags(p):
        p.add_argument("--features", required=True)
        p.add_argument("--campaign", required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--train-fraction", type=float, default=0.8)
        p.add_argument("--population", choices=("all", "english"), default="all")

    t = sub.add_parser("train", help="train a classifier on one campaign's training split")
    split_flags(t)
    t.add_argument("--classifier", choices=("svm",) + BASELINE_KINDS, default="svm")
    t.add_argument("--feature-set", choices=("combined", "lexical", "nonlexical"), default="combined")
    t.add_argument("--folds", type=int, default=5)
    t.add_argument("--grid-min", type=int, default=-10, help="smallest grid exponent (base 2)")
    t.add_argument("--grid-max", type=int, default=0, help="largest grid exponent (base 2)")
    t.add_argument("--gamma", type=float, help="skip grid search")
    t.add_argument("--nu", type=float, help="skip grid search")
    t.add_argument("--max-depth", type=int)
    t.add_argument("--n-rounds", type=int)
    t.add_argument("--neighbors", type=int)
    t.add_argument("--n-trees", type=int)
    t.add_argument("--var-floor", type=float)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    v = sub.add_parser("evaluate", help="score a model on the held-out split")
    split_flags(v)
    v.add_argument("--model", required=True)
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_evaluate)

    r = sub.add_parser("report", help="collect evaluation runs into one table")
    r.add_argument("runs", nargs="+", help="evaluation.json files or the directories holding them")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_report)

    rp = sub.add_parser("reproduce", help="run every experiment end to end")
    rp.add_argument("--config", help="experiment settings as TOML or JSON; flags take precedence")
    rp.add_argument("--seed", type=int)
    rp.add_argument("--scale", type=float)
    rp.add_argument("--n-pages", type=int)
    rp.add_argument("--k", type=int)
    rp.add_argument("--train-fraction", type=float)
    rp.add_argument("--folds", type=int)
    rp.add_argument("--grid-min", dest="grid_min_exp", type=int)
    rp.add_argument("--grid-max", dest="grid_max_exp", type=int)
    rp.add_argument("--campaigns", nargs="+")
    rp.add_argument("--jobs", type=int)
    rp.add_argument("--out", required=True)
    rp.set_defaults(func=cmd_reproduce)
    return ap


def _model_format() -> int:
    from .classify import MODEL_FORMAT_VERSION
    return MODEL_FORMAT_VERSION


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, ValueError, KeyError, OSError, RuntimeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"likefarm: error: {msg}".splitlines()[0], file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
