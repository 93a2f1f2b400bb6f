"""Weak labeling of students as college / non-college by pattern rules.

Rules are case-insensitive regular expressions matched independently
against the bio and against every tweet.  A student matching only college
rules is labeled college, only non-college rules non-college; matching
both sides is a conflict and leaves the student unlabeled with both rule
sets recorded for review.  Rules live in an editable JSON Lines file, and
a labels file may carry a manual ``override`` column that takes precedence
over the weak label downstream.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .records import StudentRecord, _data_text

COLLEGE = "college"
NON_COLLEGE = "non-college"
UNLABELED = "unlabeled"
LABEL_VALUES = (COLLEGE, NON_COLLEGE, UNLABELED)


class LabelError(ValueError):
    """Raised for invalid rules or label files."""


@dataclass(frozen=True)
class LabelRule:
    """One labeling rule: a regex pattern voting for one label."""

    pattern: str
    label: str
    description: str

    def __post_init__(self) -> None:
        if self.label not in (COLLEGE, NON_COLLEGE):
            raise LabelError(f"rule label must be college or non-college, got {self.label!r}")
        try:
            compiled = re.compile(self.pattern, re.IGNORECASE)
        except re.error as exc:
            raise LabelError(f"rule {self.description!r}: invalid pattern: {exc}") from exc
        object.__setattr__(self, "_compiled", compiled)

    def matches(self, record: StudentRecord) -> bool:
        """True when the pattern hits the bio or any single tweet."""
        compiled: re.Pattern = self._compiled  # type: ignore[attr-defined]
        if compiled.search(record.bio):
            return True
        return any(compiled.search(tweet) for tweet in record.tweets)

    def to_dict(self) -> dict:
        return {"pattern": self.pattern, "label": self.label, "description": self.description}


@dataclass(frozen=True)
class WeakLabel:
    """Label assigned by the rules, with the rules that produced it.

    ``matched_rules`` holds the descriptions of the rules backing the
    assigned label and is empty exactly when the value is unlabeled.  A
    conflict (rules on both sides matched) also comes out unlabeled, with
    the two sides preserved in the conflict fields.
    """

    value: str
    matched_rules: tuple[str, ...] = ()
    conflict_college: tuple[str, ...] = ()
    conflict_non_college: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.value not in LABEL_VALUES:
            raise LabelError(f"unknown label value {self.value!r}")
        if (self.value == UNLABELED) != (not self.matched_rules):
            raise LabelError("matched_rules must be empty exactly for unlabeled records")

    @property
    def is_conflict(self) -> bool:
        return bool(self.conflict_college or self.conflict_non_college)


def label_student(record: StudentRecord, rules: Sequence[LabelRule]) -> WeakLabel:
    """Apply every rule to one student and combine the votes.

    Idempotent and independent of rule order up to the ordering of the
    recorded rule descriptions, which follows the given rule sequence.
    """
    if not rules:
        raise LabelError("rule list must be nonempty")
    college_hits = tuple(r.description for r in rules if r.label == COLLEGE and r.matches(record))
    non_college_hits = tuple(
        r.description for r in rules if r.label == NON_COLLEGE and r.matches(record)
    )
    if college_hits and non_college_hits:
        return WeakLabel(UNLABELED, (), college_hits, non_college_hits)
    if college_hits:
        return WeakLabel(COLLEGE, college_hits)
    if non_college_hits:
        return WeakLabel(NON_COLLEGE, non_college_hits)
    return WeakLabel(UNLABELED)


@dataclass
class LabelPartition:
    """Exhaustive, disjoint split of a corpus by weak label."""

    college: list[StudentRecord] = field(default_factory=list)
    non_college: list[StudentRecord] = field(default_factory=list)
    unlabeled: list[StudentRecord] = field(default_factory=list)
    labels: dict[str, WeakLabel] = field(default_factory=dict)

    def counts(self) -> dict[str, int]:
        return {
            COLLEGE: len(self.college),
            NON_COLLEGE: len(self.non_college),
            UNLABELED: len(self.unlabeled),
        }


def label_corpus(records: Iterable[StudentRecord], rules: Sequence[LabelRule]) -> LabelPartition:
    """Label every record and partition the corpus by the result."""
    partition = LabelPartition()
    buckets = {
        COLLEGE: partition.college,
        NON_COLLEGE: partition.non_college,
        UNLABELED: partition.unlabeled,
    }
    for record in records:
        label = label_student(record, rules)
        partition.labels[record.id] = label
        buckets[label.value].append(record)
    return partition


# ---------------------------------------------------------------------------
# Rule and label files
# ---------------------------------------------------------------------------


def _parse_rules(text: str, origin: str) -> list[LabelRule]:
    rules = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LabelError(f"{origin} line {line_no}: invalid JSON: {exc.msg}") from exc
        if not isinstance(data, Mapping):
            raise LabelError(f"{origin} line {line_no}: rule must be an object")
        try:
            rules.append(
                LabelRule(
                    pattern=str(data.get("pattern", "")),
                    label=str(data.get("label", "")),
                    description=str(data.get("description", "")),
                )
            )
        except LabelError as exc:
            raise LabelError(f"{origin} line {line_no}: {exc}") from exc
    return rules


def load_rules(path: str | Path) -> list[LabelRule]:
    """Load rules from a JSON Lines file; any invalid rule is fatal."""
    return _parse_rules(Path(path).read_text(encoding="utf-8"), str(path))


def default_rules() -> list[LabelRule]:
    """The bundled starter rule set.

    Small and precision-oriented: campus-life phrases and class-year
    shorthands vote college; parental/occupational self-descriptions vote
    non-college.  Meant to be replaced or extended per deployment.
    """
    return _parse_rules(_data_text("rules.jsonl"), "bundled rules.jsonl")


def label_rows(partition: LabelPartition, records: Iterable[StudentRecord]) -> list[dict]:
    """Serializable labels-file rows, one per record, in record order."""
    rows = []
    for record in records:
        label = partition.labels[record.id]
        row: dict = {
            "id": record.id,
            "label": label.value,
            "matched_rules": list(label.matched_rules),
        }
        if label.is_conflict:
            row["conflict_college"] = list(label.conflict_college)
            row["conflict_non_college"] = list(label.conflict_non_college)
        rows.append(row)
    return rows


def effective_label(row: Mapping) -> str:
    """Label for one labels-file row, honoring a manual override."""
    override = row.get("override")
    if override is not None:
        if override not in LABEL_VALUES:
            raise LabelError(f"override {override!r} is not a known label")
        return override
    label = row.get("label")
    if label not in LABEL_VALUES:
        raise LabelError(f"label {label!r} is not a known label")
    return label


def read_labels(path: str | Path) -> dict[str, str]:
    """Map of student id → effective label from a labels file."""
    labels: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LabelError(f"{path} line {line_no}: invalid JSON: {exc.msg}") from exc
        if not isinstance(row, Mapping) or not isinstance(row.get("id"), str):
            raise LabelError(f"{path} line {line_no}: row must be an object with a string id")
        labels[row["id"]] = effective_label(row)
    return labels
