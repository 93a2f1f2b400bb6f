"""STEM role-model identification from industry and education.

A candidate qualifies as a role model when their industry is in the STEM
group outright, or in the STEM-related group and at least one of their
education majors resolves to a STEM major.  The industry → group mapping
and the STEM major list (with aliases) are editable JSON Lines data; the
bundled defaults cover the standard 147-industry vocabulary and a
38-major list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .records import CandidateRecord, _data_text, _norm_key

GROUP_STEM = "STEM"
GROUP_RELATED = "STEM-related"
GROUP_NON_STEM = "non-STEM"
GROUPS = (GROUP_STEM, GROUP_RELATED, GROUP_NON_STEM)

REASON_STEM = "stem-industry"
REASON_RELATED_WITH_DEGREE = "stem-related-with-stem-degree"
REASON_RELATED_WITHOUT_DEGREE = "stem-related-without-stem-degree"
REASON_NON_STEM = "non-stem-industry"
REASON_UNKNOWN = "unknown-industry"
REASONS = (
    REASON_STEM,
    REASON_RELATED_WITH_DEGREE,
    REASON_RELATED_WITHOUT_DEGREE,
    REASON_NON_STEM,
    REASON_UNKNOWN,
)


class TaxonomyError(ValueError):
    """Raised for malformed taxonomy or major-list files."""


@dataclass(frozen=True)
class IndustryTaxonomy:
    """Mapping from industry name to STEM / STEM-related / non-STEM."""

    groups: Mapping[str, str]  # normalized industry name -> group

    def __post_init__(self) -> None:
        if not self.groups:
            raise TaxonomyError("taxonomy must not be empty")
        for name, group in self.groups.items():
            if group not in GROUPS:
                raise TaxonomyError(f"industry {name!r} has unknown group {group!r}")

    def group_of(self, industry: str) -> str | None:
        """Group for an industry name, case- and whitespace-insensitive."""
        return self.groups.get(_norm_key(industry))

    def __len__(self) -> int:
        return len(self.groups)


@dataclass(frozen=True)
class StemMajorList:
    """Canonical STEM majors plus aliases, matched case-insensitively."""

    canonical: tuple[str, ...]
    _lookup: Mapping[str, str] = field(repr=False)  # normalized name/alias -> canonical

    def resolve(self, major: str) -> str | None:
        """Canonical major for a free-text degree subject, or None.

        Matching is exact after case folding and whitespace collapsing —
        no fuzzy matching, so "B.S. in Computer Science" does not resolve
        but "computer science" and the alias "cs" do.
        """
        return self._lookup.get(_norm_key(major))

    def __len__(self) -> int:
        return len(self.canonical)


def _build_taxonomy(text: str, origin: str) -> IndustryTaxonomy:
    groups: dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TaxonomyError(f"{origin} line {line_no}: invalid JSON: {exc.msg}") from exc
        name = row.get("industry")
        group = row.get("group")
        if not isinstance(name, str) or not name.strip():
            raise TaxonomyError(f"{origin} line {line_no}: industry name must be a nonempty string")
        key = _norm_key(name)
        if key in groups:
            raise TaxonomyError(f"{origin} line {line_no}: duplicate industry {name!r}")
        if group not in GROUPS:
            raise TaxonomyError(f"{origin} line {line_no}: unknown group {group!r}")
        groups[key] = group
    return IndustryTaxonomy(groups)


def load_taxonomy(path: str | Path) -> IndustryTaxonomy:
    return _build_taxonomy(Path(path).read_text(encoding="utf-8"), str(path))


def default_taxonomy() -> IndustryTaxonomy:
    """The bundled taxonomy covering all 147 standard industry names."""
    return _build_taxonomy(_data_text("taxonomy.jsonl"), "bundled taxonomy.jsonl")


def _build_majors(text: str, origin: str) -> StemMajorList:
    canonical: list[str] = []
    lookup: dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TaxonomyError(f"{origin} line {line_no}: invalid JSON: {exc.msg}") from exc
        major = row.get("major")
        aliases = row.get("aliases", [])
        if not isinstance(major, str) or not major.strip():
            raise TaxonomyError(f"{origin} line {line_no}: major must be a nonempty string")
        if not isinstance(aliases, list) or any(not isinstance(a, str) for a in aliases):
            raise TaxonomyError(f"{origin} line {line_no}: aliases must be a list of strings")
        canonical.append(major)
        for name in [major, *aliases]:
            key = _norm_key(name)
            if key in lookup:
                raise TaxonomyError(
                    f"{origin} line {line_no}: {name!r} already maps to {lookup[key]!r}"
                )
            lookup[key] = major
    if not canonical:
        raise TaxonomyError(f"{origin}: major list must not be empty")
    return StemMajorList(tuple(canonical), lookup)


def load_majors(path: str | Path) -> StemMajorList:
    return _build_majors(Path(path).read_text(encoding="utf-8"), str(path))


def default_majors() -> StemMajorList:
    """The bundled 38-major STEM list."""
    return _build_majors(_data_text("majors.jsonl"), "bundled majors.jsonl")


# ---------------------------------------------------------------------------
# The role-model predicate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoleModelDecision:
    """Outcome of the predicate plus the branch that produced it."""

    is_role_model: bool
    reason: str
    stem_major: str | None = None  # canonical major that qualified, if any


def is_role_model(candidate: CandidateRecord, taxonomy: IndustryTaxonomy,
                  majors: StemMajorList) -> RoleModelDecision:
    """Decide whether one candidate counts as a STEM role model.

    Depends only on the industry and education majors; every other
    candidate field is ignored.
    """
    group = taxonomy.group_of(candidate.industry)
    if group is None:
        return RoleModelDecision(False, REASON_UNKNOWN)
    if group == GROUP_STEM:
        return RoleModelDecision(True, REASON_STEM)
    if group == GROUP_RELATED:
        for major in candidate.education_majors:
            resolved = majors.resolve(major)
            if resolved is not None:
                return RoleModelDecision(True, REASON_RELATED_WITH_DEGREE, resolved)
        return RoleModelDecision(False, REASON_RELATED_WITHOUT_DEGREE)
    return RoleModelDecision(False, REASON_NON_STEM)


@dataclass
class FilterResult:
    """Role models in input order plus per-branch counts over all inputs."""

    role_models: list[CandidateRecord]
    decisions: dict[str, RoleModelDecision]
    counts: dict[str, int]


def filter_role_models(candidates: Iterable[CandidateRecord], taxonomy: IndustryTaxonomy,
                       majors: StemMajorList) -> FilterResult:
    """Keep the candidates that qualify, preserving input order."""
    kept: list[CandidateRecord] = []
    decisions: dict[str, RoleModelDecision] = {}
    counts = {reason: 0 for reason in REASONS}
    for candidate in candidates:
        decision = is_role_model(candidate, taxonomy, majors)
        decisions[candidate.id] = decision
        counts[decision.reason] += 1
        if decision.is_role_model:
            kept.append(candidate)
    return FilterResult(kept, decisions, counts)
