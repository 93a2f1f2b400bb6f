"""Ranking role models per student and scoring match accuracy.

Every candidate is scored against the student with the combined attribute
similarity; the top k (default 5) come back as a ``MatchResult``.  Ties
break by candidate id ascending, and candidates with no comparable
attributes at all (no-signal) sort below every scored candidate.

Accuracy follows the counting rule: for n = 1..5, the fraction of students
whose top-5 contains at least n correct matches, where a correct match is
a STEM role model sharing the student's annotated gender, race, and city
(or state, at the state levels).  Evaluation levels: city-all, state-all,
and the same two restricted to students from a configurable top-10 city
list.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .records import AttributeProfile, RecordError, read_jsonl, write_jsonl
from .similarity import (
    DEFAULT_FUZZY_THRESHOLD,
    SimilarityBreakdown,
    lev_similarity,
    max_matching_size,
    normalize_location,
)

DEFAULT_K = 5

LEVEL_CITY_ALL = "city-all"
LEVEL_STATE_ALL = "state-all"
LEVEL_CITY_TOP10 = "city-top10"
LEVEL_STATE_TOP10 = "state-top10"
LEVELS = (LEVEL_CITY_ALL, LEVEL_STATE_ALL, LEVEL_CITY_TOP10, LEVEL_STATE_TOP10)

# Default city list for the top-10 evaluation levels.
DEFAULT_TOP10_CITIES = (
    "San Francisco",
    "New York City",
    "Atlanta",
    "Los Angeles",
    "Dallas",
    "Chicago",
    "Washington D.C.",
    "Boston",
    "Seattle",
    "Houston",
)


class MatchError(ValueError):
    """Raised for unusable ranking or evaluation inputs."""


@dataclass(frozen=True)
class MatchResult:
    """Top-k candidates for one student, best first."""

    student_id: str
    ranked: tuple[tuple[str, SimilarityBreakdown], ...]

    def __post_init__(self) -> None:
        ids = [cid for cid, _ in self.ranked]
        if len(ids) != len(set(ids)):
            raise MatchError(f"duplicate candidate ids in result for {self.student_id!r}")

    def candidate_ids(self) -> tuple[str, ...]:
        return tuple(cid for cid, _ in self.ranked)

    def all_no_signal(self) -> bool:
        return all(breakdown.no_signal for _, breakdown in self.ranked)


class CandidateIndex:
    """Candidate profiles preprocessed for scoring many students.

    Builds the arrays and caches that make corpus-scale ranking cheap:
    categorical codes, normalized locations, and interest-vocabulary
    bitmasks for the fuzzy-overlap matching.  Scoring through the index is
    arithmetic-identical to calling ``similarity.combined_score`` pair by
    pair; the ranking oracle test in the suite holds it to that.
    """

    def __init__(self, candidates: Sequence[tuple[str, AttributeProfile]],
                 threshold: float = DEFAULT_FUZZY_THRESHOLD):
        if not 0.0 <= threshold <= 1.0:
            raise MatchError(f"fuzzy threshold {threshold} outside [0, 1]")
        ids = [cid for cid, _ in candidates]
        if len(ids) != len(set(ids)):
            raise MatchError("duplicate candidate ids")
        self.threshold = threshold
        self.ids = np.array(ids)
        self.profiles = [profile for _, profile in candidates]
        n = len(self.profiles)

        self._gender_codes, self._gender_vocab = _encode([p.gender for p in self.profiles])
        self._race_codes, self._race_vocab = _encode([p.race for p in self.profiles])

        locations = [
            normalize_location(p.location) if p.location is not None else None
            for p in self.profiles
        ]
        self._loc_codes, self._loc_vocab = _encode(locations)
        self._loc_sim_cache: dict[str, np.ndarray] = {}

        # Interest vocabulary over candidate interest strings; each
        # candidate keeps its interests as vocabulary indices plus a
        # bitmask for a cheap no-overlap rejection.
        vocab: dict[str, int] = {}
        self._cand_interests: list[tuple[int, ...]] = []
        self._cand_masks = [0] * n
        for i, profile in enumerate(self.profiles):
            indices = []
            mask = 0
            for interest in sorted(profile.interests):
                index = vocab.setdefault(interest, len(vocab))
                indices.append(index)
                mask |= 1 << index
            self._cand_interests.append(tuple(indices))
            self._cand_masks[i] = mask
        self._vocab_words = list(vocab)
        self._cand_sizes = [len(t) for t in self._cand_interests]
        self._student_mask_cache: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self.profiles)

    def _interest_mask(self, interest: str) -> int:
        """Bitmask of candidate-vocabulary words fuzzy-equal to ``interest``."""
        mask = self._student_mask_cache.get(interest)
        if mask is None:
            mask = 0
            for index, word in enumerate(self._vocab_words):
                if lev_similarity(interest, word) >= self.threshold:
                    mask |= 1 << index
            self._student_mask_cache[interest] = mask
        return mask

    def _location_sims(self, student_location: str) -> np.ndarray:
        """Similarity of one student location to every candidate location code."""
        sims = self._loc_sim_cache.get(student_location)
        if sims is None:
            sims = np.array(
                [lev_similarity(student_location, loc) for loc in self._loc_vocab]
            )
            self._loc_sim_cache[student_location] = sims
        return sims

    def score(self, student: AttributeProfile) -> tuple[np.ndarray, np.ndarray, dict]:
        """Combined scores and no-signal flags for one student vs all candidates.

        Returns (combined, no_signal, components); components holds the
        per-attribute similarity arrays and their presence masks for
        assembling breakdowns.
        """
        n = len(self.profiles)
        total = np.zeros(n)
        count = np.zeros(n, dtype=int)
        components: dict[str, tuple[np.ndarray, np.ndarray]] = {}

        for name, value, codes, vocab in (
            ("gender", student.gender, self._gender_codes, self._gender_vocab),
            ("race", student.race, self._race_codes, self._race_vocab),
        ):
            if value is None:
                present = np.zeros(n, dtype=bool)
                sims = np.zeros(n)
            else:
                present = codes >= 0
                code = vocab.get(value, -2)  # -2: never equals an encoded value
                sims = np.where(present & (codes == code), 1.0, 0.0)
            components[name] = (sims, present)
            total += sims * present
            count += present

        present = np.zeros(n, dtype=bool)
        sims = np.zeros(n)
        if student.location is not None:
            present = self._loc_codes >= 0
            if self._loc_vocab:
                by_code = self._location_sims(normalize_location(student.location))
                sims = np.where(present, by_code[np.maximum(self._loc_codes, 0)], 0.0)
        components["location"] = (sims, present)
        total += sims * present
        count += present

        interest_sims, interest_present = self._interest_component(student)
        components["interest"] = (interest_sims, interest_present)
        total += interest_sims * interest_present
        count += interest_present

        no_signal = count == 0
        combined = np.divide(total, count, out=np.zeros(n), where=~no_signal)
        return combined, no_signal, components

    def _interest_component(self, student: AttributeProfile) -> tuple[np.ndarray, np.ndarray]:
        n = len(self.profiles)
        sims = np.zeros(n)
        if not student.interests:
            return sims, np.zeros(n, dtype=bool)
        present = np.array([size > 0 for size in self._cand_sizes])
        left_masks = [self._interest_mask(s) for s in sorted(student.interests)]
        union = 0
        for mask in left_masks:
            union |= mask
        p = len(left_masks)
        cand_interests = self._cand_interests
        cand_masks = self._cand_masks
        for i in range(n):
            q = self._cand_sizes[i]
            if q == 0:
                continue
            m = 0
            if union & cand_masks[i]:
                m = _matching_size(left_masks, cand_interests[i])
            sims[i] = m / (p + q - m)
        return sims, present


def _encode(values: Sequence[str | None]) -> tuple[np.ndarray, dict[str, int]]:
    """Integer codes for optional strings; None becomes -1."""
    vocab: dict[str, int] = {}
    codes = np.empty(len(values), dtype=int)
    for i, value in enumerate(values):
        if value is None:
            codes[i] = -1
        else:
            codes[i] = vocab.setdefault(value, len(vocab))
    return codes, vocab


def _matching_size(left_masks: Sequence[int], right_indices: Sequence[int]) -> int:
    """Maximum matching between student interests and one candidate's.

    ``left_masks`` are fuzzy-match bitmasks over the candidate vocabulary;
    ``right_indices`` are this candidate's vocabulary indices.  The one-
    and two-interest cases are closed-form; larger sets run Kuhn's
    algorithm.
    """
    adj = []
    for mask in left_masks:
        a = 0
        for pos, vj in enumerate(right_indices):
            if (mask >> vj) & 1:
                a |= 1 << pos
        adj.append(a)
    if len(adj) == 1:
        return 1 if adj[0] else 0
    if len(adj) == 2:
        a0, a1 = adj
        if not a0:
            return 1 if a1 else 0
        if not a1:
            return 1
        if a0 != a1 or a0 & (a0 - 1):
            return 2
        return 1
    return max_matching_size(adj, len(right_indices))


def _select_top(index: CandidateIndex, student_id: str, student: AttributeProfile,
                k: int) -> MatchResult:
    combined, no_signal, components = index.score(student)
    order = np.lexsort((index.ids, -combined, no_signal))
    top = order[: min(k, len(order))]

    ranked = []
    for i in top:
        parts = {}
        for name in ("gender", "race", "location", "interest"):
            sims, present = components[name]
            parts[name] = float(sims[i]) if present[i] else None
        breakdown = SimilarityBreakdown(
            gender=parts["gender"],
            race=parts["race"],
            location=parts["location"],
            interest=parts["interest"],
            combined=float(combined[i]),
            no_signal=bool(no_signal[i]),
        )
        ranked.append((str(index.ids[i]), breakdown))
    return MatchResult(student_id, tuple(ranked))


def rank(student_id: str, student: AttributeProfile,
         candidates: Sequence[tuple[str, AttributeProfile]] | CandidateIndex,
         k: int = DEFAULT_K, threshold: float = DEFAULT_FUZZY_THRESHOLD) -> MatchResult:
    """Top-k role models for one student.

    ``candidates`` may be a prebuilt ``CandidateIndex`` to amortize
    preprocessing across students (``match_corpus`` does exactly that).
    """
    if k < 1:
        raise MatchError(f"k must be >= 1, got {k}")
    if isinstance(candidates, CandidateIndex):
        index = candidates
    else:
        if not candidates:
            raise MatchError("candidate list must be nonempty")
        index = CandidateIndex(candidates, threshold)
    if len(index) == 0:
        raise MatchError("candidate list must be nonempty")
    return _select_top(index, student_id, student, k)


def match_corpus(students: Sequence[tuple[str, AttributeProfile]],
                 candidates: Sequence[tuple[str, AttributeProfile]],
                 k: int = DEFAULT_K,
                 threshold: float = DEFAULT_FUZZY_THRESHOLD) -> list[MatchResult]:
    """Rank candidates for every student; one result per student, in order."""
    if not students:
        return []
    if not candidates:
        raise MatchError("candidate list must be nonempty")
    if k < 1:
        raise MatchError(f"k must be >= 1, got {k}")
    index = CandidateIndex(candidates, threshold)
    return [_select_top(index, student_id, profile, k) for student_id, profile in students]


# ---------------------------------------------------------------------------
# Ground truth and accuracy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroundTruthAnnotation:
    """Manually curated demographic truth for one subject.

    ``is_stem_role_model`` applies to candidates; ``planted_candidate_id``
    is recorded by the synthetic generator for planted students.
    """

    subject_id: str
    gender: str | None = None
    race: str | None = None
    city: str | None = None
    state: str | None = None
    is_stem_role_model: bool | None = None
    planted_candidate_id: str | None = None

    def __post_init__(self) -> None:
        if not self.subject_id:
            raise MatchError("annotation subject_id must be nonempty")
        for name in ("city", "state"):
            value = getattr(self, name)
            if value is not None and not value.strip():
                raise MatchError(f"annotated {name} must be nonempty when present")

    @classmethod
    def from_dict(cls, data: Mapping) -> "GroundTruthAnnotation":
        subject_id = data.get("subject_id")
        if not isinstance(subject_id, str):
            raise MatchError("annotation row must carry a string subject_id")
        flag = data.get("is_stem_role_model")
        if flag is not None and not isinstance(flag, bool):
            raise MatchError(f"is_stem_role_model must be boolean, got {flag!r}")
        return cls(
            subject_id=subject_id,
            gender=data.get("gender"),
            race=data.get("race"),
            city=data.get("city"),
            state=data.get("state"),
            is_stem_role_model=flag,
            planted_candidate_id=data.get("planted_candidate_id"),
        )


def load_annotations(path: str | Path) -> dict[str, GroundTruthAnnotation]:
    annotations: dict[str, GroundTruthAnnotation] = {}
    for row in read_jsonl(path):
        annotation = GroundTruthAnnotation.from_dict(row)
        if annotation.subject_id in annotations:
            raise MatchError(f"duplicate annotation for {annotation.subject_id!r}")
        annotations[annotation.subject_id] = annotation
    return annotations


def _check_level(level: str) -> None:
    if level not in LEVELS:
        raise MatchError(f"unknown evaluation level {level!r}; expected one of {LEVELS}")


def _place_field(level: str) -> str:
    return "city" if level.startswith("city") else "state"


def is_correct_match(student: GroundTruthAnnotation, candidate: GroundTruthAnnotation,
                     level: str) -> bool:
    """Correct iff the candidate is a STEM role model sharing gender, race,
    and place (city or state per the level).

    Any absent field on either side makes the match incorrect: students
    that could not be annotated count as zero correct matches.
    """
    _check_level(level)
    if not candidate.is_stem_role_model:
        return False
    if student.gender is None or candidate.gender is None or student.gender != candidate.gender:
        return False
    if student.race is None or candidate.race is None or student.race != candidate.race:
        return False
    field_name = _place_field(level)
    ours = getattr(student, field_name)
    theirs = getattr(candidate, field_name)
    if ours is None or theirs is None:
        return False
    return normalize_location(ours) == normalize_location(theirs)


@dataclass(frozen=True)
class AccuracyReport:
    """Per-n matching accuracy for one evaluation level.

    ``accuracies[i]`` is the fraction of the cohort with at least i+1
    correct matches in their top-5; the sequence is nonincreasing by
    construction.  Students whose entire ranked list was no-signal stay in
    the cohort (they count as zero correct) but are also reported
    separately.
    """

    level: str
    cohort_size: int
    accuracies: tuple[float, ...]
    no_signal_students: int

    def accuracy_at(self, n: int) -> float:
        return self.accuracies[n - 1]

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "cohort_size": self.cohort_size,
            "no_signal_students": self.no_signal_students,
            "accuracy": {str(n): value for n, value in enumerate(self.accuracies, start=1)},
        }


def evaluate(results: Sequence[MatchResult], annotations: Mapping[str, GroundTruthAnnotation],
             level: str, top10_cities: Sequence[str] = DEFAULT_TOP10_CITIES,
             n_max: int = DEFAULT_K) -> AccuracyReport:
    """Score ranked results against ground truth at one evaluation level.

    Every student must have an annotation row (absent fields are fine and
    count as incorrect).  A ranked candidate without an annotation row is
    simply not a correct match.  The top-10 levels restrict the cohort to
    students whose annotated city is on the ``top10_cities`` list.
    """
    _check_level(level)
    missing = sorted({r.student_id for r in results} - set(annotations))
    if missing:
        raise MatchError(f"students without annotation rows: {', '.join(missing)}")

    if level.endswith("top10"):
        wanted = {normalize_location(city) for city in top10_cities}
        cohort = [
            r for r in results
            if annotations[r.student_id].city is not None
            and normalize_location(annotations[r.student_id].city) in wanted
        ]
    else:
        cohort = list(results)

    at_least = [0] * n_max
    no_signal_students = 0
    for result in cohort:
        student = annotations[result.student_id]
        if result.all_no_signal():
            no_signal_students += 1
        correct = 0
        for candidate_id, _ in result.ranked:
            candidate = annotations.get(candidate_id)
            if candidate is not None and is_correct_match(student, candidate, level):
                correct += 1
        for n in range(1, min(correct, n_max) + 1):
            at_least[n - 1] += 1

    size = len(cohort)
    accuracies = tuple(count / size if size else 0.0 for count in at_least)
    return AccuracyReport(level, size, accuracies, no_signal_students)


# ---------------------------------------------------------------------------
# Matches files
# ---------------------------------------------------------------------------


def match_rows(results: Iterable[MatchResult]) -> list[dict]:
    return [
        {
            "student_id": result.student_id,
            "ranked": [
                {"candidate_id": candidate_id, **breakdown.to_dict()}
                for candidate_id, breakdown in result.ranked
            ],
        }
        for result in results
    ]


def write_matches(path: str | Path, results: Iterable[MatchResult]) -> None:
    write_jsonl(path, match_rows(results))


def load_matches(path: str | Path) -> list[MatchResult]:
    results = []
    for row in read_jsonl(path):
        student_id = row.get("student_id")
        ranked_rows = row.get("ranked")
        if not isinstance(student_id, str) or not isinstance(ranked_rows, list):
            raise RecordError(f"{path}: malformed match row")
        ranked = tuple(
            (entry["candidate_id"], SimilarityBreakdown.from_dict(entry))
            for entry in ranked_rows
        )
        results.append(MatchResult(student_id, ranked))
    return results
