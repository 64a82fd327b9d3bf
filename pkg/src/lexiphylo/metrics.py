"""Per-concept suitability variables and the concept x variable feature table.

Six variables per meaning class: loan-flagged triple count, mean D over the
concept's analyzable cognate classes, singleton-class count, fraction of
tree languages with no entry, and mean and maximum class size (languages
attesting). All counts are taken over the tree's tip languages: a language
absent from the tree cannot contribute phylogenetic signal, so it is left
out of every variable rather than only some.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rng import derived_seed
from .cognates import CognateMatrix
from .comparative import DEFAULT_N_REPS, DStatResult, d_statistic
from .tree import Tree

FEATURE_COLUMNS = (
    "n_loans",
    "mean_D",
    "n_singletons",
    "missing_fraction",
    "mean_class_size",
    "max_class_size",
)

MIN_TIPS_FOR_D = 4


@dataclass(frozen=True)
class DStatConfig:
    """Knobs for the per-class D computations inside compute_metrics."""

    seed: int
    n_reps: int = DEFAULT_N_REPS

    def class_seed(self, concept: str, cognate_class: str) -> int:
        # Hash-derived so results do not depend on evaluation order.
        return derived_seed(self.seed, concept, cognate_class)


@dataclass(frozen=True)
class MeaningClassMetrics:
    concept: str
    n_loans: int
    mean_d: float | None  # None when no cognate class was analyzable
    n_singletons: int
    missing_fraction: float
    mean_class_size: float
    max_class_size: int
    n_classes: int
    class_results: dict[str, DStatResult] = field(default_factory=dict)
    class_skips: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class FeatureTable:
    row_labels: tuple[str, ...]
    columns: tuple[str, ...]
    values: np.ndarray
    standardized: bool = False


def compute_metrics(
    matrix: CognateMatrix,
    tree: Tree,
    concept: str,
    config: DStatConfig,
) -> MeaningClassMetrics:
    """All six variables for one concept, plus per-class D detail.

    A cognate class is analyzable when the concept has at least
    ``MIN_TIPS_FOR_D`` attested tree languages and the class's
    presence/absence trait varies among them; other classes are recorded in
    ``class_skips`` with a reason. ``mean_d`` averages the analyzable
    classes only, and is None when there are none.
    """
    tree_languages = set(tree.tip_labels)
    attested = matrix.languages_for(concept) & tree_languages
    if not attested:
        raise ValueError(f"concept {concept!r} has no attestations among tree languages")

    classes = {
        cls: langs & tree_languages
        for cls, langs in matrix.classes_for(concept).items()
    }
    classes = {cls: langs for cls, langs in classes.items() if langs}
    sizes = {cls: len(langs) for cls, langs in classes.items()}
    n_loans = sum(
        1
        for (lang, con, cls) in matrix.loans
        if con == concept and lang in tree_languages and cls in classes
    )

    class_results: dict[str, DStatResult] = {}
    class_skips: dict[str, str] = {}
    taxa = list(tree.tip_labels)
    mask = np.array([1 if lang in attested else 0 for lang in taxa], dtype=np.int8)
    for cls in sorted(classes):
        if len(attested) < MIN_TIPS_FOR_D:
            class_skips[cls] = f"fewer than {MIN_TIPS_FOR_D} usable tips"
            continue
        if sizes[cls] == len(attested):
            class_skips[cls] = "constant trait (attested by every usable language)"
            continue
        presence = np.array(
            [1 if lang in classes[cls] else 0 for lang in taxa], dtype=np.int8
        )
        try:
            class_results[cls] = d_statistic(
                tree,
                presence,
                mask,
                n_reps=config.n_reps,
                seed=config.class_seed(concept, cls),
            )
        except ValueError as exc:
            class_skips[cls] = str(exc)

    mean_d = (
        float(np.mean([res.D for res in class_results.values()]))
        if class_results
        else None
    )
    size_values = list(sizes.values())
    return MeaningClassMetrics(
        concept=concept,
        n_loans=n_loans,
        mean_d=mean_d,
        n_singletons=sum(1 for s in size_values if s == 1),
        missing_fraction=1.0 - len(attested) / len(tree_languages),
        mean_class_size=float(np.mean(size_values)),
        max_class_size=max(size_values),
        n_classes=len(classes),
        class_results=class_results,
        class_skips=class_skips,
    )


def build_feature_table(
    metrics: list[MeaningClassMetrics],
) -> tuple[FeatureTable, dict[str, dict]]:
    """Assemble the concept x 6 table, imputing undefined mean_D cells.

    Rows are sorted by concept ID. Concepts whose every class was skipped
    get the cross-concept mean of the defined mean_D values, so the PCA row
    set stays equal to the concept set. Returns the table plus a provenance
    sidecar recording, per concept, whether mean_D was computed or imputed
    and which classes were skipped and why.
    """
    if len(metrics) < 3:
        raise ValueError(f"need >= 3 concepts for a feature table, got {len(metrics)}")
    by_concept = {m.concept: m for m in metrics}
    if len(by_concept) != len(metrics):
        raise ValueError("duplicate concept in metrics list")
    ordered = [by_concept[c] for c in sorted(by_concept)]

    defined = [m.mean_d for m in ordered if m.mean_d is not None]
    if not defined:
        raise ValueError("no concept has a defined mean_D; nothing to impute from")
    imputation = float(np.mean(defined))

    rows = []
    provenance: dict[str, dict] = {}
    for m in ordered:
        mean_d = m.mean_d if m.mean_d is not None else imputation
        rows.append(
            [
                float(m.n_loans),
                mean_d,
                float(m.n_singletons),
                m.missing_fraction,
                m.mean_class_size,
                float(m.max_class_size),
            ]
        )
        provenance[m.concept] = {
            "mean_D": "imputed" if m.mean_d is None else "computed",
            "n_classes_analyzed": len(m.class_results),
            "skipped_classes": dict(sorted(m.class_skips.items())),
        }

    table = FeatureTable(
        row_labels=tuple(m.concept for m in ordered),
        columns=FEATURE_COLUMNS,
        values=np.array(rows, dtype=float),
        standardized=False,
    )
    return table, provenance


def feature_table_to_csv(table: FeatureTable) -> str:
    """Delimited-text export with a header row."""
    lines = ["concept," + ",".join(table.columns)]
    for label, row in zip(table.row_labels, table.values):
        lines.append(label + "," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def feature_table_from_csv(text: str) -> FeatureTable:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("empty feature table")
    header = lines[0].split(",")
    if header[0] != "concept":
        raise ValueError("feature table must start with a 'concept' column")
    columns = tuple(header[1:])
    labels: list[str] = []
    rows: list[list[float]] = []
    for line in lines[1:]:
        fields = line.split(",")
        if len(fields) != len(header):
            raise ValueError(f"ragged feature-table row: {line!r}")
        labels.append(fields[0])
        rows.append([float(v) for v in fields[1:]])
    return FeatureTable(tuple(labels), columns, np.array(rows, dtype=float), False)
