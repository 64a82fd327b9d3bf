"""Command-line pipeline: validate, metrics, dstat, pca, cluster, rank, simulate, report.

Stage outputs are cached as JSON in the output directory so the cheap
stages (pca, cluster, report) can be re-run without recomputing the
D statistics, which dominate runtime. Every stochastic subcommand requires
an explicit --seed; there is no wall-clock fallback, so a command line
plus its inputs fully determines the output bytes.

Exit codes: 0 success, 1 domain error (parse/validation/statistics),
2 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import warnings as _warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from ._version import __version__
from .cognates import (
    CognateFormatError,
    CognateMatrix,
    ValidationIssue,
    binary_trait,
    load_cognates,
)
from .comparative import (
    DEFAULT_N_REPS,
    BmParams,
    DStatResult,
    d_statistic,
    simulate_bm,
)
from .metrics import (
    DStatConfig,
    FeatureTable,
    MeaningClassMetrics,
    build_feature_table,
    compute_metrics,
    feature_table_from_csv,
    feature_table_to_csv,
)
from .multivariate import (
    ClusterAssignment,
    PcaResult,
    choose_k,
    kmeans,
    pca as run_pca,
    standardize,
)
from .ranking import (
    DEFAULT_STABILITY_THRESHOLD,
    DEFAULT_WORDLIST_SIZE,
    ranking_to_csv,
    select_wordlist,
    suitability_rank,
    orient_axes,
)
from .report import emit_report, emit_scatter
from .tree import NewickError, Tree, TreeError, read_newick_file


class CliError(Exception):
    """Domain error already formatted for the user."""


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _input_digests(tree_path: Path, cognates_path: Path) -> dict:
    return {
        "tree": {"path": str(tree_path), "sha256": _sha256(tree_path)},
        "cognates": {"path": str(cognates_path), "sha256": _sha256(cognates_path)},
    }


def _load_inputs(tree_path: Path, cognates_path: Path) -> tuple[Tree, CognateMatrix, list[ValidationIssue]]:
    tree = read_newick_file(tree_path)
    matrix, issues = load_cognates(cognates_path)
    return tree, matrix, issues


# -- metrics serialization (stage cache) -------------------------------------


def _dstat_to_dict(res: DStatResult) -> dict:
    return {
        "d_obs": res.d_obs,
        "mean_d_random": res.mean_d_random,
        "mean_d_bm": res.mean_d_bm,
        "D": res.D,
        "p_random": res.p_random,
        "p_bm": res.p_bm,
        "n_reps": res.n_reps,
        "n_tips_used": res.n_tips_used,
    }


def _dstat_from_dict(d: dict) -> DStatResult:
    return DStatResult(**d)


def _metrics_to_dict(m: MeaningClassMetrics) -> dict:
    return {
        "concept": m.concept,
        "n_loans": m.n_loans,
        "mean_d": m.mean_d,
        "n_singletons": m.n_singletons,
        "missing_fraction": m.missing_fraction,
        "mean_class_size": m.mean_class_size,
        "max_class_size": m.max_class_size,
        "n_classes": m.n_classes,
        "class_results": {
            cls: _dstat_to_dict(res) for cls, res in sorted(m.class_results.items())
        },
        "class_skips": dict(sorted(m.class_skips.items())),
    }


def _metrics_from_dict(d: dict) -> MeaningClassMetrics:
    return MeaningClassMetrics(
        concept=d["concept"],
        n_loans=d["n_loans"],
        mean_d=d["mean_d"],
        n_singletons=d["n_singletons"],
        missing_fraction=d["missing_fraction"],
        mean_class_size=d["mean_class_size"],
        max_class_size=d["max_class_size"],
        n_classes=d["n_classes"],
        class_results={
            cls: _dstat_from_dict(res) for cls, res in d["class_results"].items()
        },
        class_skips=dict(d["class_skips"]),
    )


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")


# -- per-concept metrics, optionally in parallel ------------------------------

_POOL_STATE: dict = {}


def _pool_init(tree: Tree, matrix: CognateMatrix, config: DStatConfig) -> None:
    _POOL_STATE["args"] = (tree, matrix, config)


def _pool_task(concept: str) -> MeaningClassMetrics:
    tree, matrix, config = _POOL_STATE["args"]
    return compute_metrics(matrix, tree, concept, config)


def _compute_all_metrics(
    matrix: CognateMatrix,
    tree: Tree,
    config: DStatConfig,
    workers: int,
) -> tuple[list[MeaningClassMetrics], list[str]]:
    """Metrics for every analyzable concept, in concept-sorted order.

    Concepts with no attestation among tree languages are skipped with a
    warning rather than aborting the run. The result is independent of the
    worker count: per-class seeds are hash-derived and assembly is sorted.
    """
    tree_languages = set(tree.tip_labels)
    usable: list[str] = []
    skipped: list[str] = []
    for concept in sorted(matrix.concepts):
        if matrix.languages_for(concept) & tree_languages:
            usable.append(concept)
        else:
            skipped.append(
                f"concept {concept!r} skipped: no attestations among tree languages"
            )
    if workers <= 1:
        results = [compute_metrics(matrix, tree, c, config) for c in usable]
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_pool_init, initargs=(tree, matrix, config)
        ) as pool:
            results = list(pool.map(_pool_task, usable, chunksize=4))
    return results, skipped


# -- pca/cluster stage helpers -----------------------------------------------


def _pca_stage(table: FeatureTable) -> tuple[PcaResult, list[str]]:
    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always")
        standardized = standardize(table)
        result = run_pca(standardized)
    return result, sorted(str(w.message) for w in caught)


def _pca_to_dict(result: PcaResult, stage_warnings: list[str]) -> dict:
    return {
        "schema_version": 1,
        "variables": list(result.variables),
        "row_labels": list(result.row_labels),
        "eigenvalues": [float(v) for v in result.eigenvalues],
        "explained_variance": [float(v) for v in result.explained_variance],
        "loadings": [[float(v) for v in row] for row in result.loadings],
        "contributions": [[float(v) for v in row] for row in result.contributions],
        "scores": [[float(v) for v in row] for row in result.scores],
        "warnings": stage_warnings,
    }


def _pca_from_dict(d: dict) -> PcaResult:
    return PcaResult(
        eigenvalues=np.array(d["eigenvalues"], dtype=float),
        loadings=np.array(d["loadings"], dtype=float),
        scores=np.array(d["scores"], dtype=float),
        contributions=np.array(d["contributions"], dtype=float),
        explained_variance=np.array(d["explained_variance"], dtype=float),
        variables=tuple(d["variables"]),
        row_labels=tuple(d["row_labels"]),
    )


def _cluster_stage(
    result: PcaResult, kmeans_k: int | None, seed: int, n_restarts: int
) -> tuple[ClusterAssignment, dict]:
    scores2 = result.scores[:, :2]
    n = len(result.row_labels)
    meta: dict = {"mode": "fixed" if kmeans_k is not None else "auto"}
    low_structure: list[str] = []
    if kmeans_k is None:
        k_hi = min(6, n - 1)
        with _warnings.catch_warnings(record=True) as caught:
            _warnings.simplefilter("always")
            kmeans_k = choose_k(scores2, range(2, k_hi + 1), seed, n_restarts)
        low_structure = [str(w.message) for w in caught]
        meta["range"] = [2, k_hi]
    assignment = kmeans(scores2, kmeans_k, seed=seed, n_restarts=n_restarts)
    meta["warnings"] = sorted(low_structure)
    return assignment, meta


def _clusters_to_dict(assignment: ClusterAssignment, meta: dict, row_labels: tuple[str, ...]) -> dict:
    return {
        "schema_version": 1,
        "k": assignment.k,
        "seed": assignment.seed,
        "n_restarts": assignment.n_restarts,
        "wcss": assignment.wcss,
        "labels": {
            concept: int(assignment.labels[i]) for i, concept in enumerate(row_labels)
        },
        "centroids": [[float(v) for v in row] for row in assignment.centroids],
        "selection": meta,
    }


def _clusters_from_dict(d: dict, row_labels: tuple[str, ...]) -> ClusterAssignment:
    labels = np.array([d["labels"][concept] for concept in row_labels], dtype=int)
    return ClusterAssignment(
        labels=labels,
        centroids=np.array(d["centroids"], dtype=float),
        wcss=float(d["wcss"]),
        k=int(d["k"]),
        seed=int(d["seed"]),
        n_restarts=int(d["n_restarts"]),
    )


# -- subcommands ---------------------------------------------------------------


def _cmd_validate(args: argparse.Namespace) -> int:
    issues: list[ValidationIssue] = []
    tree = read_newick_file(Path(args.tree))
    matrix, load_warnings = load_cognates(Path(args.cognates))
    issues.extend(load_warnings)

    tree_languages = set(tree.tip_labels)
    db_languages = set(matrix.languages)
    for lang in sorted(db_languages - tree_languages):
        issues.append(
            ValidationIssue("warning", None, f"language {lang!r} in cognates but not in tree")
        )
    for lang in sorted(tree_languages - db_languages):
        issues.append(
            ValidationIssue("warning", None, f"tree tip {lang!r} has no cognate rows")
        )

    for issue in issues:
        print(issue.render())
    errors = sum(1 for i in issues if i.level == "error")
    warn_count = sum(1 for i in issues if i.level == "warning")
    print(
        f"validated {len(matrix.languages)} languages, {len(matrix.concepts)} concepts: "
        f"{errors} errors, {warn_count} warnings"
    )
    return 0 if errors == 0 else 1


def _run_metrics_stage(args: argparse.Namespace, out: Path) -> tuple[
    list[MeaningClassMetrics], FeatureTable, dict, list[str], dict
]:
    tree_path, cognates_path = Path(args.tree), Path(args.cognates)
    tree, matrix, load_issues = _load_inputs(tree_path, cognates_path)
    config = DStatConfig(seed=args.seed, n_reps=args.reps)
    metrics, skip_warnings = _compute_all_metrics(matrix, tree, config, args.workers)
    table, provenance = build_feature_table(metrics)
    run_warnings = sorted(
        skip_warnings + [issue.message for issue in load_issues]
    )
    payload = {
        "schema_version": 1,
        "config": {"seed": args.seed, "n_reps": args.reps},
        "inputs": _input_digests(tree_path, cognates_path),
        "warnings": run_warnings,
        "concepts": [_metrics_to_dict(m) for m in metrics],
        "provenance": provenance,
    }
    out.mkdir(parents=True, exist_ok=True)
    (out / "features.csv").write_text(feature_table_to_csv(table), "utf-8")
    _write_json(out / "metrics.json", payload)
    return metrics, table, provenance, run_warnings, payload


def _cmd_metrics(args: argparse.Namespace) -> int:
    out = Path(args.out)
    metrics, table, _provenance, run_warnings, _payload = _run_metrics_stage(args, out)
    for message in run_warnings:
        print(f"warning: {message}", file=sys.stderr)
    print(f"computed metrics for {len(metrics)} concepts -> {out / 'metrics.json'}")
    print(f"feature table -> {out / 'features.csv'}")
    return 0


def _trait_over_tree_tips(
    matrix: CognateMatrix, concept: str, cognate_class: str, tree: Tree
) -> tuple[np.ndarray, np.ndarray]:
    """Presence/mask over all tree tips; tips without any database rows are missing."""
    known = [t for t in tree.tip_labels if t in matrix.languages]
    presence_known, mask_known = binary_trait(matrix, concept, cognate_class, known)
    by_label = dict(zip(known, zip(presence_known, mask_known)))
    presence = np.zeros(tree.n_tips, dtype=np.int8)
    mask = np.zeros(tree.n_tips, dtype=np.int8)
    for i, label in enumerate(tree.tip_labels):
        if label in by_label:
            presence[i], mask[i] = by_label[label]
    return presence, mask


def _cmd_dstat(args: argparse.Namespace) -> int:
    tree, matrix, _ = _load_inputs(Path(args.tree), Path(args.cognates))
    presence, mask = _trait_over_tree_tips(
        matrix, args.concept, args.cognate_class, tree
    )
    result = d_statistic(tree, presence, mask, n_reps=args.reps, seed=args.seed)
    print(f"concept={args.concept} cognate_class={args.cognate_class}")
    for name, value in _dstat_to_dict(result).items():
        print(f"{name}={value}")
    return 0


def _cmd_pca(args: argparse.Namespace) -> int:
    out = Path(args.out)
    features_path = out / "features.csv"
    if not features_path.exists():
        raise CliError(
            f"{features_path} not found; run the metrics stage first"
        )
    table = feature_table_from_csv(features_path.read_text("utf-8"))
    result, stage_warnings = _pca_stage(table)
    _write_json(out / "pca.json", _pca_to_dict(result, stage_warnings))
    explained = ", ".join(f"{100 * v:.1f}%" for v in result.explained_variance[:2])
    print(f"pca over {len(result.row_labels)} concepts (PC1, PC2 explain {explained})")
    print(f"pca results -> {out / 'pca.json'}")
    return 0


def _cmd_cluster(args: argparse.Namespace) -> int:
    out = Path(args.out)
    pca_path = out / "pca.json"
    if not pca_path.exists():
        raise CliError(f"{pca_path} not found; run the pca stage first")
    result = _pca_from_dict(json.loads(pca_path.read_text("utf-8")))
    assignment, meta = _cluster_stage(result, args.kmeans_k, args.seed, args.restarts)
    _write_json(
        out / "clusters.json", _clusters_to_dict(assignment, meta, result.row_labels)
    )
    print(f"k-means: k={assignment.k}, wcss={assignment.wcss:.4f}")
    print(f"clusters -> {out / 'clusters.json'}")
    return 0


def _assemble_and_write_report(
    out: Path,
    metrics: list[MeaningClassMetrics],
    provenance: dict,
    unoriented: PcaResult,
    assignment: ClusterAssignment,
    cluster_meta: dict,
    run_block: dict,
    wordlist_size: int,
    threshold: float,
) -> tuple[Path, Path, Path, list[str]]:
    oriented = orient_axes(unoriented)
    ranking = suitability_rank(oriented, assignment)
    selection = select_wordlist(ranking, k=wordlist_size, threshold=threshold)
    run_block = dict(run_block)
    run_block.setdefault("wordlist_size", wordlist_size)
    run_block.setdefault("stability_threshold", threshold)
    run_block.setdefault("suitability_score", "PC1 - PC2 (oriented axes)")
    run_block.setdefault(
        "kmeans",
        {
            "k": assignment.k,
            "n_restarts": assignment.n_restarts,
            "seed": assignment.seed,
            "algorithm": "kmeans++ seeding, Lloyd iterations, best-of-restarts",
            "space": "first two PC scores",
            **cluster_meta,
        },
    )
    report_text = emit_report(
        metrics, oriented, assignment, ranking, selection, run_block, provenance
    )
    scatter_text = emit_scatter(oriented, assignment, ranking)
    ranking_text = ranking_to_csv(ranking)

    report_path = out / "report.json"
    ranking_path = out / "ranking.csv"
    scatter_path = out / "scatter.svg"
    report_path.write_text(report_text, "utf-8")
    ranking_path.write_text(ranking_text, "utf-8")
    scatter_path.write_text(scatter_text, "utf-8")
    return report_path, ranking_path, scatter_path, list(selection.concepts)


def _cmd_rank(args: argparse.Namespace) -> int:
    out = Path(args.out)
    metrics, table, provenance, run_warnings, payload = _run_metrics_stage(args, out)
    unoriented, stage_warnings = _pca_stage(table)
    _write_json(out / "pca.json", _pca_to_dict(unoriented, stage_warnings))
    assignment, cluster_meta = _cluster_stage(
        unoriented, args.kmeans_k, args.seed, args.restarts
    )
    _write_json(
        out / "clusters.json",
        _clusters_to_dict(assignment, cluster_meta, unoriented.row_labels),
    )
    run_block = {
        "seed": args.seed,
        "n_reps": args.reps,
        "inputs": payload["inputs"],
        "warnings": sorted(
            run_warnings + stage_warnings + cluster_meta.get("warnings", [])
        ),
    }
    report_path, ranking_path, scatter_path, top = _assemble_and_write_report(
        out,
        metrics,
        provenance,
        unoriented,
        assignment,
        cluster_meta,
        run_block,
        args.k,
        args.theta,
    )
    print(f"report -> {report_path}")
    print(f"ranking -> {ranking_path}")
    print(f"scatter -> {scatter_path}")
    print(f"top {len(top)} concepts:")
    for concept in top:
        print(f"  {concept}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    out = Path(args.out)
    for name in ("metrics.json", "pca.json", "clusters.json"):
        if not (out / name).exists():
            raise CliError(f"{out / name} not found; run earlier stages first")
    payload = json.loads((out / "metrics.json").read_text("utf-8"))
    metrics = [_metrics_from_dict(d) for d in payload["concepts"]]
    provenance = payload["provenance"]
    pca_doc = json.loads((out / "pca.json").read_text("utf-8"))
    unoriented = _pca_from_dict(pca_doc)
    clusters_doc = json.loads((out / "clusters.json").read_text("utf-8"))
    assignment = _clusters_from_dict(clusters_doc, unoriented.row_labels)
    run_block = {
        "seed": payload["config"]["seed"],
        "n_reps": payload["config"]["n_reps"],
        "inputs": payload["inputs"],
        "warnings": sorted(
            payload["warnings"]
            + pca_doc.get("warnings", [])
            + clusters_doc.get("selection", {}).get("warnings", [])
        ),
    }
    report_path, ranking_path, scatter_path, _top = _assemble_and_write_report(
        out,
        metrics,
        provenance,
        unoriented,
        assignment,
        clusters_doc.get("selection", {}),
        run_block,
        args.k,
        args.theta,
    )
    print(f"report -> {report_path}")
    print(f"ranking -> {ranking_path}")
    print(f"scatter -> {scatter_path}")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    tree = read_newick_file(Path(args.tree))
    params = BmParams(sigma2=args.sigma2, root_value=args.root, seed=args.seed)
    values = simulate_bm(tree, params)
    lines = ["tip\tvalue"]
    for idx, label in zip(tree.tip_indices, tree.tip_labels):
        lines.append(f"{label}\t{float(values[idx])!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, "utf-8")
        print(f"simulated {tree.n_tips} tip values -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# -- argument plumbing ---------------------------------------------------------


def _positive_int(value: str) -> int:
    parsed = int(value)
    if parsed < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return parsed


def _kmeans_k(value: str):
    if value == "auto":
        return None
    return _positive_int(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexiphylo",
        description=(
            "Score meaning classes in a cognate database for suitability in "
            "lexical phylogenetic inference."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_inputs(p: argparse.ArgumentParser) -> None:
        p.add_argument("--tree", required=True, metavar="NEWICK")
        p.add_argument("--cognates", required=True, metavar="CSV")

    def add_common(p: argparse.ArgumentParser, *, seed: bool = True) -> None:
        p.add_argument("--config", metavar="JSON", default=None,
                       help="flat JSON file supplying defaults for any flag")
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help="required; stochastic runs have no wall-clock default")

    p = sub.add_parser("validate", help="check tree + cognate inputs and cross-references")
    add_inputs(p)
    add_common(p, seed=False)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("metrics", help="compute the six per-concept variables (the slow stage)")
    add_inputs(p)
    add_common(p)
    p.add_argument("--reps", type=_positive_int, default=None, help="null replicates (default 1000)")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--workers", type=_positive_int, default=None)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("dstat", help="D statistic for one cognate class")
    add_inputs(p)
    add_common(p)
    p.add_argument("--concept", required=True)
    p.add_argument("--cognate-class", required=True, dest="cognate_class")
    p.add_argument("--reps", type=_positive_int, default=None)
    p.set_defaults(func=_cmd_dstat)

    p = sub.add_parser("pca", help="standardize cached features and run PCA")
    add_common(p, seed=False)
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=_cmd_pca)

    p = sub.add_parser("cluster", help="k-means over cached PC1/PC2 scores")
    add_common(p)
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--kmeans-k", type=_kmeans_k, default=None, dest="kmeans_k",
                   help="cluster count, or 'auto' for silhouette selection (default auto)")
    p.add_argument("--restarts", type=_positive_int, default=None)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("rank", help="full pipeline: metrics, pca, cluster, rank, report")
    add_inputs(p)
    add_common(p)
    p.add_argument("--reps", type=_positive_int, default=None)
    p.add_argument("--k", type=_positive_int, default=None,
                   help="wordlist size (default 30)")
    p.add_argument("--kmeans-k", type=_kmeans_k, default=None, dest="kmeans_k")
    p.add_argument("--restarts", type=_positive_int, default=None)
    p.add_argument("--theta", type=float, default=None,
                   help="stability-mix warning threshold (default 0.8)")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--workers", type=_positive_int, default=None)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("report", help="re-emit report artifacts from cached stages")
    add_common(p, seed=False)
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--k", type=_positive_int, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("simulate", help="Brownian-motion tip values for a tree")
    p.add_argument("--tree", required=True, metavar="NEWICK")
    add_common(p)
    p.add_argument("--sigma2", type=float, required=True)
    p.add_argument("--root", type=float, default=None, help="root value (default 0)")
    p.add_argument("--out", default=None, metavar="FILE")
    p.set_defaults(func=_cmd_simulate)

    return parser


_CONFIG_DEFAULTS = {
    "reps": DEFAULT_N_REPS,
    "workers": 1,
    "k": DEFAULT_WORDLIST_SIZE,
    "theta": DEFAULT_STABILITY_THRESHOLD,
    "restarts": 25,
    "root": 0.0,
    "kmeans_k": None,
    "seed": None,
}

_STOCHASTIC_COMMANDS = {"metrics", "dstat", "cluster", "rank", "simulate"}


def _apply_config(args: argparse.Namespace) -> None:
    """Fill unset flags from --config, then from built-in defaults."""
    config: dict = {}
    if getattr(args, "config", None):
        raw = json.loads(Path(args.config).read_text("utf-8"))
        if not isinstance(raw, dict):
            raise CliError("--config must contain a flat JSON object")
        config = {str(k).replace("-", "_"): v for k, v in raw.items()}
    for name, value in config.items():
        if hasattr(args, name) and getattr(args, name) is None:
            setattr(args, name, value)
    for name, default in _CONFIG_DEFAULTS.items():
        if hasattr(args, name) and getattr(args, name) is None:
            setattr(args, name, default)
    if args.command in _STOCHASTIC_COMMANDS and getattr(args, "seed", None) is None:
        raise CliError(
            f"a --seed is required for '{args.command}' (no wall-clock default)"
        )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NewickError, TreeError, CognateFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
