"""Long-format cognate database: ingestion, validation, and per-concept views.

The input is a single delimited table (comma or tab, autodetected from the
header) with columns ``language, concept, cognate_id, loan``. A (language,
concept) pair with no row is *missing*: absence of evidence, deliberately
distinct from a cognate class being absent. One language may attest several
classes for the same concept (synonyms/doublets). Cognate-class IDs are
scoped to their concept.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

import numpy as np

REQUIRED_COLUMNS = ("language", "concept", "cognate_id")
LOAN_COLUMN = "loan"


class CognateFormatError(ValueError):
    """Malformed cognate table; ``line`` is the 1-based source line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} at line {line}")
        self.line = line


@dataclass(frozen=True)
class ValidationIssue:
    """One structured validation-report line."""

    level: str  # "warning" or "error"
    line: int | None
    message: str

    def render(self) -> str:
        where = f"line {self.line}" if self.line is not None else "-"
        return f"{self.level} {where}: {self.message}"


@dataclass(frozen=True)
class CognateMatrix:
    """Immutable language x concept -> set-of-cognate-classes mapping."""

    languages: tuple[str, ...]
    concepts: tuple[str, ...]
    entries: dict[tuple[str, str], frozenset[str]]
    loans: frozenset[tuple[str, str, str]]

    def has_entry(self, language: str, concept: str) -> bool:
        return (language, concept) in self.entries

    def languages_for(self, concept: str) -> frozenset[str]:
        """Languages with at least one entry for ``concept``."""
        self._require_concept(concept)
        return frozenset(lang for (lang, con) in self.entries if con == concept)

    def classes_for(self, concept: str) -> dict[str, frozenset[str]]:
        """Map each cognate class of ``concept`` to its attesting languages."""
        self._require_concept(concept)
        out: dict[str, set[str]] = {}
        for (lang, con), classes in self.entries.items():
            if con != concept:
                continue
            for cls in classes:
                out.setdefault(cls, set()).add(lang)
        return {cls: frozenset(langs) for cls, langs in sorted(out.items())}

    def _require_concept(self, concept: str) -> None:
        if concept not in self.concepts:
            raise ValueError(f"unknown concept {concept!r}")


@dataclass(frozen=True)
class ConceptSummary:
    concept: str
    n_classes: int
    class_sizes: dict[str, int]
    n_singletons: int
    n_attested_languages: int
    n_loan_triples: int


def _open_source(source: str | Path | IO[str]) -> IO[str]:
    if isinstance(source, Path):
        return source.open(encoding="utf-8")
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def load_cognates(source: str | Path | IO[str]) -> tuple[CognateMatrix, list[ValidationIssue]]:
    """Load and validate a delimited cognate table.

    ``source`` may be a Path, an open text stream, or the raw table text as
    a str. Returns the matrix plus a list of warnings (errors raise
    CognateFormatError with the offending line number).
    """
    fh = _open_source(source)
    try:
        lines = fh.read().splitlines()
    finally:
        fh.close()
    if not lines or not lines[0].strip():
        raise CognateFormatError("empty input (no header)", 1)

    header_line = lines[0]
    delimiter = "\t" if "\t" in header_line else ","
    header = [h.strip() for h in header_line.split(delimiter)]
    col_index = {name: i for i, name in enumerate(header)}
    for required in REQUIRED_COLUMNS:
        if required not in col_index:
            raise CognateFormatError(f"missing required column {required!r}", 1)

    warnings: list[ValidationIssue] = []
    has_loan = LOAN_COLUMN in col_index
    if not has_loan:
        warnings.append(
            ValidationIssue("warning", 1, "loan column absent; all loan flags set to 0")
        )

    languages: list[str] = []
    concepts: list[str] = []
    seen_languages: set[str] = set()
    seen_concepts: set[str] = set()
    entries: dict[tuple[str, str], set[str]] = {}
    loans: set[tuple[str, str, str]] = set()
    seen_rows: set[tuple[str, str, str]] = set()

    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        fields = [f.strip() for f in raw.split(delimiter)]
        if len(fields) < len(header):
            raise CognateFormatError(
                f"expected {len(header)} fields, got {len(fields)}", lineno
            )
        language = fields[col_index["language"]]
        concept = fields[col_index["concept"]]
        cognate_id = fields[col_index["cognate_id"]]
        if not language:
            raise CognateFormatError("empty language", lineno)
        if not concept:
            raise CognateFormatError("empty concept", lineno)
        if not cognate_id:
            raise CognateFormatError("empty cognate_id", lineno)

        row = (language, concept, cognate_id)
        if row in seen_rows:
            raise CognateFormatError(
                f"duplicate row ({language}, {concept}, {cognate_id})", lineno
            )
        seen_rows.add(row)

        loan_flag = 0
        if has_loan:
            loan_raw = fields[col_index[LOAN_COLUMN]]
            if loan_raw in ("", "0"):
                loan_flag = 0
            elif loan_raw == "1":
                loan_flag = 1
            else:
                raise CognateFormatError(
                    f"loan flag must be 0, 1, or empty, got {loan_raw!r}", lineno
                )

        if language not in seen_languages:
            seen_languages.add(language)
            languages.append(language)
        if concept not in seen_concepts:
            seen_concepts.add(concept)
            concepts.append(concept)
        entries.setdefault((language, concept), set()).add(cognate_id)
        if loan_flag:
            loans.add(row)

    if not entries:
        raise CognateFormatError("no data rows", len(lines))

    matrix = CognateMatrix(
        languages=tuple(languages),
        concepts=tuple(concepts),
        entries={key: frozenset(val) for key, val in entries.items()},
        loans=frozenset(loans),
    )
    return matrix, warnings


def write_cognates(matrix: CognateMatrix) -> str:
    """Serialize back to CSV; rows sorted so output is deterministic."""
    rows = []
    for (language, concept), classes in matrix.entries.items():
        for cls in classes:
            loan = 1 if (language, concept, cls) in matrix.loans else 0
            rows.append((language, concept, cls, loan))
    rows.sort()
    lines = ["language,concept,cognate_id,loan"]
    lines.extend(f"{lang},{con},{cls},{loan}" for lang, con, cls, loan in rows)
    return "\n".join(lines) + "\n"


def binary_trait(
    matrix: CognateMatrix,
    concept: str,
    cognate_class: str,
    taxa: Iterable[str],
) -> tuple[np.ndarray, np.ndarray]:
    """Presence/absence of one cognate class over ``taxa``, plus attested mask.

    ``presence[i]`` is 1 iff taxon i attests the class under ``concept``;
    ``mask[i]`` is 0 iff (taxon i, concept) is missing. Missing taxa are to
    be excluded downstream, never read as absence.
    """
    matrix._require_concept(concept)
    classes = matrix.classes_for(concept)
    if cognate_class not in classes:
        raise ValueError(
            f"unknown cognate class {cognate_class!r} for concept {concept!r}"
        )
    taxa = list(taxa)
    unknown = [t for t in taxa if t not in matrix.languages]
    if unknown:
        raise ValueError(f"taxon {unknown[0]!r} not in matrix languages")
    attesting = classes[cognate_class]
    presence = np.zeros(len(taxa), dtype=np.int8)
    mask = np.zeros(len(taxa), dtype=np.int8)
    for i, taxon in enumerate(taxa):
        if matrix.has_entry(taxon, concept):
            mask[i] = 1
            if taxon in attesting:
                presence[i] = 1
    return presence, mask


def concept_summary(matrix: CognateMatrix, concept: str) -> ConceptSummary:
    """Counts for one concept: classes, sizes, singletons, attestation, loans."""
    classes = matrix.classes_for(concept)
    if not classes:
        raise ValueError(f"no data for concept {concept!r}")
    sizes = {cls: len(langs) for cls, langs in classes.items()}
    attested = matrix.languages_for(concept)
    n_loans = sum(1 for (lang, con, cls) in matrix.loans if con == concept)
    return ConceptSummary(
        concept=concept,
        n_classes=len(classes),
        class_sizes=sizes,
        n_singletons=sum(1 for s in sizes.values() if s == 1),
        n_attested_languages=len(attested),
        n_loan_triples=n_loans,
    )
