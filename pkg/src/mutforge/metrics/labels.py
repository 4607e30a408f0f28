"""
Equivalence label files.

CSV columns: ``mutant_id, annotator, label`` with label one of EQUIVALENT,
NONEQUIVALENT or UNSURE. The skeleton written for annotators adds context
columns (file, lines, original and mutated text); readers ignore them.
Each annotator contributes one row per mutant. A mutant is equivalent only
when every annotator who labeled it said EQUIVALENT.
"""

import csv
import logging
from collections.abc import Sequence
from enum import StrEnum
from pathlib import Path

from pydantic import BaseModel, ConfigDict

from mutforge.errors import IntegrityError
from mutforge.schemas.mutation import MutantStatus, MutationPool, MutationRecord, StatusKind

logger = logging.getLogger(__name__)

LABEL_COLUMNS = ("mutant_id", "annotator", "label")
CONTEXT_COLUMNS = ("file", "line_start", "line_end", "original_text", "mutated_text")


class EquivalenceLabel(StrEnum):
    EQUIVALENT = "EQUIVALENT"
    NONEQUIVALENT = "NONEQUIVALENT"
    UNSURE = "UNSURE"


class EquivalenceLabels(BaseModel):
    """
    Attributes:
        labels: mutant id -> annotator -> label.
    """

    model_config = ConfigDict(frozen=True)

    labels: dict[str, dict[str, EquivalenceLabel]] = {}

    def annotators(self) -> list[str]:
        return sorted({a for by_annotator in self.labels.values() for a in by_annotator})

    def labeled_ids(self) -> set[str]:
        return set(self.labels)

    def is_equivalent(self, mutant_id: str) -> bool:
        votes = self.labels.get(mutant_id, {})
        return bool(votes) and all(v is EquivalenceLabel.EQUIVALENT for v in votes.values())

    def paired(self) -> tuple[list[str], list[str]]:
        """
        Labels of the two annotators over the mutants both labeled.

        Raises:
            IntegrityError: Unless there are exactly two annotators.
        """
        annotators = self.annotators()
        if len(annotators) != 2:
            raise IntegrityError(f"agreement needs exactly two annotators, found {len(annotators)}")
        first, second = annotators
        common = sorted(m for m, votes in self.labels.items() if first in votes and second in votes)
        return (
            [self.labels[m][first].value for m in common],
            [self.labels[m][second].value for m in common],
        )


def write_label_skeleton(records: Sequence[MutationRecord], path: Path, annotators: Sequence[str] = ("",)) -> None:
    """One row per (mutant, annotator) with an empty label column."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([*LABEL_COLUMNS, *CONTEXT_COLUMNS])
        for record in records:
            for annotator in annotators:
                loc = record.location
                writer.writerow(
                    [
                        record.id,
                        annotator,
                        "",
                        loc.file,
                        loc.line_start,
                        loc.line_end,
                        record.original_text,
                        record.mutated_text,
                    ]
                )


def read_labels(path: Path) -> EquivalenceLabels:
    """
    Parse a completed label file; rows with an empty label are ignored.

    Raises:
        IntegrityError: On missing columns, unknown labels or a repeated
            (mutant, annotator) pair.
    """
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        missing = [c for c in LABEL_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise IntegrityError(f"{path} lacks columns {missing}")
        labels: dict[str, dict[str, EquivalenceLabel]] = {}
        blank = 0
        for row_number, row in enumerate(reader, start=2):
            value = (row["label"] or "").strip().upper()
            if not value:
                blank += 1
                continue
            try:
                label = EquivalenceLabel(value)
            except ValueError:
                raise IntegrityError(f"{path}:{row_number}: unknown label '{row['label']}'") from None
            mutant_id = row["mutant_id"].strip()
            annotator = (row["annotator"] or "").strip() or "annotator"
            votes = labels.setdefault(mutant_id, {})
            if annotator in votes:
                raise IntegrityError(f"{path}:{row_number}: '{annotator}' labeled '{mutant_id}' twice")
            votes[annotator] = label
    if blank:
        logger.warning(
            "Label file has unlabeled rows",
            extra={"extra_fields": {"file": str(path), "blank_rows": blank}},
        )
    return EquivalenceLabels(labels=labels)


def apply_labels(pool: MutationPool, labels: EquivalenceLabels) -> MutationPool:
    """Mark viable records labeled equivalent as EquivalentLabeled."""
    records = [
        r.with_status(MutantStatus.equivalent_labeled())
        if r.status_kind is StatusKind.VIABLE and labels.is_equivalent(r.id)
        else r
        for r in pool.records
    ]
    return pool.replace_records(records)
