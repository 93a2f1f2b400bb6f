"""Record types and JSON Lines ingestion for students and candidates.

Students carry Twitter-style data (tweets, bio, free-text location) and
candidates carry LinkedIn-style data (industry, education, interests,
skills).  Demographic predictions from external services are ingested as
``PredictorOutput`` rows attached to each record instead of being fetched
live, so runs are reproducible offline.

All record types are immutable once constructed and validate their own
invariants, which keeps downstream stages free to share them across threads
without copying.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

PREDICTOR_SOURCES = ("name-gender", "name-demographics", "face")
GENDER_VALUES = ("female", "male")
RACE_VALUES = ("White", "Black", "Asian", "Api", "Hispanic")
ATTRIBUTE_VALUES: dict[str, tuple[str, ...]] = {
    "gender": GENDER_VALUES,
    "race": RACE_VALUES,
}

# Hard cap on tweets kept per student.  Tweets are chronological (oldest
# first); truncation keeps the tail, i.e. the most recent tweets.
MAX_TWEETS = 200

_WS_RUN = re.compile(r"\s+")


class RecordError(ValueError):
    """Raised when a record violates one of its invariants."""


def _norm_key(text: str) -> str:
    """Case/whitespace-insensitive key used for vocabulary lookups."""
    return _WS_RUN.sub(" ", text.strip()).casefold()


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredictorOutput:
    """One demographic prediction for one subject from one source.

    ``value`` and ``accuracy`` are both null when the source could not
    produce a prediction; ``accuracy`` is the source's reported accuracy
    for this kind of prediction, not a per-subject confidence.
    """

    source: str
    attribute: str
    value: str | None = None
    accuracy: float | None = None

    def __post_init__(self) -> None:
        if self.source not in PREDICTOR_SOURCES:
            raise RecordError(f"unknown predictor source {self.source!r}")
        if self.attribute not in ATTRIBUTE_VALUES:
            raise RecordError(f"unknown predicted attribute {self.attribute!r}")
        if (self.value is None) != (self.accuracy is None):
            raise RecordError("prediction value and accuracy must be both set or both null")
        if self.accuracy is not None and not 0.0 <= self.accuracy <= 1.0:
            raise RecordError(f"accuracy {self.accuracy} outside [0, 1]")
        if self.value is not None and self.value not in ATTRIBUTE_VALUES[self.attribute]:
            raise RecordError(f"value {self.value!r} not in the {self.attribute} vocabulary")

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "attribute": self.attribute,
            "value": self.value,
            "accuracy": self.accuracy,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "PredictorOutput":
        if not isinstance(data, Mapping):
            raise RecordError("predictor output must be an object")
        accuracy = data.get("accuracy")
        if accuracy is not None:
            if isinstance(accuracy, bool) or not isinstance(accuracy, (int, float)):
                raise RecordError("accuracy must be a number or null")
            accuracy = float(accuracy)
        value = data.get("value")
        if value is not None and not isinstance(value, str):
            raise RecordError("prediction value must be a string or null")
        return cls(
            source=_require_str(data, "source"),
            attribute=_require_str(data, "attribute"),
            value=value,
            accuracy=accuracy,
        )


@dataclass(frozen=True)
class StudentRecord:
    """One college-student-candidate Twitter user.

    A record with no tweets is only accepted when the bio is nonempty,
    otherwise there is nothing to label, classify, or match on.
    """

    id: str
    tweets: tuple[str, ...] = ()
    bio: str = ""
    display_name: str = ""
    location_raw: str = ""
    predictor_outputs: tuple[PredictorOutput, ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise RecordError("student id must be nonempty")
        if not self.tweets and not self.bio.strip():
            raise RecordError("student has zero tweets and an empty bio")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "tweets": list(self.tweets),
            "bio": self.bio,
            "display_name": self.display_name,
            "location_raw": self.location_raw,
            "predictor_outputs": [p.to_dict() for p in self.predictor_outputs],
        }

    @classmethod
    def from_dict(cls, data: Mapping, max_tweets: int = MAX_TWEETS) -> "StudentRecord":
        if not isinstance(data, Mapping):
            raise RecordError("student record must be an object")
        tweets = _str_list(data, "tweets")
        if len(tweets) > max_tweets:
            tweets = tweets[-max_tweets:]
        return cls(
            id=_require_str(data, "id"),
            tweets=tuple(tweets),
            bio=_optional_str(data, "bio"),
            display_name=_optional_str(data, "display_name"),
            location_raw=_optional_str(data, "location_raw"),
            predictor_outputs=_outputs(data),
        )


@dataclass(frozen=True)
class CandidateRecord:
    """One role-model-candidate LinkedIn profile.

    ``unknown_industry`` is set at load time when the industry string is
    not found in the industry taxonomy; such records are kept but can never
    qualify as role models.
    """

    id: str
    full_name: str = ""
    industry: str = ""
    education_majors: tuple[str, ...] = ()
    interests_raw: tuple[str, ...] = ()
    skills_raw: tuple[str, ...] = ()
    location_raw: str = ""
    predictor_outputs: tuple[PredictorOutput, ...] = ()
    unknown_industry: bool = False

    def __post_init__(self) -> None:
        if not self.id:
            raise RecordError("candidate id must be nonempty")
        if not self.location_raw.strip():
            raise RecordError("candidate location_raw must be nonempty")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "full_name": self.full_name,
            "industry": self.industry,
            "education_majors": list(self.education_majors),
            "interests_raw": list(self.interests_raw),
            "skills_raw": list(self.skills_raw),
            "location_raw": self.location_raw,
            "predictor_outputs": [p.to_dict() for p in self.predictor_outputs],
            "unknown_industry": self.unknown_industry,
        }

    @classmethod
    def from_dict(cls, data: Mapping, industries: frozenset[str] | None = None) -> "CandidateRecord":
        """Build a candidate from a parsed JSON object.

        ``industries`` is a set of normalized industry names; when given,
        the unknown-industry flag is recomputed against it, otherwise any
        flag already present in the data is kept.
        """
        if not isinstance(data, Mapping):
            raise RecordError("candidate record must be an object")
        industry = _optional_str(data, "industry")
        if industries is not None:
            unknown = _norm_key(industry) not in industries
        else:
            unknown = bool(data.get("unknown_industry", False))
        return cls(
            id=_require_str(data, "id"),
            full_name=_optional_str(data, "full_name"),
            industry=industry,
            education_majors=tuple(_str_list(data, "education_majors")),
            interests_raw=tuple(_str_list(data, "interests_raw")),
            skills_raw=tuple(_str_list(data, "skills_raw")),
            location_raw=_optional_str(data, "location_raw"),
            predictor_outputs=_outputs(data),
            unknown_industry=unknown,
        )


@dataclass(frozen=True)
class AttributeProfile:
    """Resolved, comparison-ready attributes for one person.

    Absent attributes stay ``None`` rather than taking a sentinel value;
    similarity scoring skips them instead of penalizing them.
    """

    gender: str | None = None
    race: str | None = None
    location: str | None = None
    interests: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.gender is not None and self.gender not in GENDER_VALUES:
            raise RecordError(f"gender {self.gender!r} not in the gender vocabulary")
        if self.race is not None and self.race not in RACE_VALUES:
            raise RecordError(f"race {self.race!r} not in the race vocabulary")
        if self.location is not None and not self.location:
            raise RecordError("location must be nonempty when present")
        object.__setattr__(self, "interests", frozenset(self.interests))
        for interest in self.interests:
            if not interest:
                raise RecordError("interest strings must be nonempty")
            if interest.startswith("#"):
                raise RecordError(f"interest {interest!r} still carries a '#' prefix")

    def to_dict(self) -> dict:
        return {
            "gender": self.gender,
            "race": self.race,
            "location": self.location,
            "interests": sorted(self.interests),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "AttributeProfile":
        if not isinstance(data, Mapping):
            raise RecordError("profile must be an object")
        interests = data.get("interests", [])
        if not isinstance(interests, list) or any(not isinstance(i, str) for i in interests):
            raise RecordError("interests must be a list of strings")
        return cls(
            gender=data.get("gender"),
            race=data.get("race"),
            location=data.get("location"),
            interests=frozenset(interests),
        )


# ---------------------------------------------------------------------------
# Field coercion helpers
# ---------------------------------------------------------------------------


def _require_str(data: Mapping, key: str) -> str:
    value = data.get(key)
    if not isinstance(value, str):
        raise RecordError(f"field {key!r} must be a string")
    return value


def _optional_str(data: Mapping, key: str) -> str:
    value = data.get(key, "")
    if value is None:
        return ""
    if not isinstance(value, str):
        raise RecordError(f"field {key!r} must be a string")
    return value


def _str_list(data: Mapping, key: str) -> list[str]:
    value = data.get(key, [])
    if not isinstance(value, list) or any(not isinstance(item, str) for item in value):
        raise RecordError(f"field {key!r} must be a list of strings")
    return value


def _outputs(data: Mapping) -> tuple[PredictorOutput, ...]:
    raw = data.get("predictor_outputs", [])
    if not isinstance(raw, list):
        raise RecordError("field 'predictor_outputs' must be a list")
    return tuple(PredictorOutput.from_dict(item) for item in raw)


# ---------------------------------------------------------------------------
# JSON Lines loading
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoadError:
    """One rejected input line: its 1-based line number and the reason."""

    line: int
    message: str


@dataclass
class LoadResult:
    """Validated records plus the per-line errors encountered on the way."""

    records: list
    errors: list[LoadError] = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)


def _load_jsonl(path: str | Path, build) -> LoadResult:
    """Shared per-line loader: parse, build, deduplicate by id.

    A malformed or invalid line is reported with its line number and
    skipped; the rest of the file still loads.  An unreadable file raises.
    """
    records: list = []
    errors: list[LoadError] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                record = build(data)
            except RecordError as exc:
                errors.append(LoadError(line_no, str(exc)))
                continue
            except json.JSONDecodeError as exc:
                errors.append(LoadError(line_no, f"invalid JSON: {exc.msg}"))
                continue
            if record.id in seen:
                errors.append(LoadError(line_no, f"duplicate id {record.id!r}"))
                continue
            seen.add(record.id)
            records.append(record)
    return LoadResult(records, errors)


def load_students(path: str | Path, max_tweets: int = MAX_TWEETS) -> LoadResult:
    """Load students from a JSON Lines file.

    Returns every record that passes validation; rejected lines are listed
    in ``errors`` with their line numbers.  Duplicate ids keep the first
    occurrence.  Tweet lists longer than ``max_tweets`` are truncated to
    the most recent ``max_tweets`` entries.
    """
    return _load_jsonl(path, lambda data: StudentRecord.from_dict(data, max_tweets))


def load_candidates(path: str | Path, industries: Iterable[str] | None = None) -> LoadResult:
    """Load candidates from a JSON Lines file.

    ``industries`` is the set of known industry names (the bundled
    taxonomy by default).  A candidate whose industry is not in the set is
    kept but flagged ``unknown_industry``; that is a data-quality signal,
    not an error.
    """
    if industries is None:
        vocabulary = default_industry_names()
    else:
        vocabulary = frozenset(_norm_key(name) for name in industries)
    return _load_jsonl(path, lambda data: CandidateRecord.from_dict(data, vocabulary))


def write_jsonl(path: str | Path, rows: Iterable[Mapping]) -> None:
    """Write one JSON object per line, UTF-8, deterministic field order."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False))
            handle.write("\n")


def read_jsonl(path: str | Path) -> list[dict]:
    """Read a whole JSON Lines file; raises on any malformed line."""
    rows = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise RecordError(f"line {line_no}: invalid JSON: {exc.msg}") from exc
    return rows


# ---------------------------------------------------------------------------
# Bundled data
# ---------------------------------------------------------------------------


def _data_text(name: str) -> str:
    return (resources.files("stem_match") / "data" / name).read_text(encoding="utf-8")


def default_industry_names() -> frozenset[str]:
    """Normalized industry names from the bundled taxonomy file."""
    names = set()
    for line in _data_text("taxonomy.jsonl").splitlines():
        if line.strip():
            names.add(_norm_key(json.loads(line)["industry"]))
    return frozenset(names)


_NAME_TABLE: dict | None = None


def _name_table() -> dict:
    global _NAME_TABLE
    if _NAME_TABLE is None:
        _NAME_TABLE = json.loads(_data_text("name_lookup.json"))
    return _NAME_TABLE


def predict_from_name(full_name: str) -> tuple[PredictorOutput, ...]:
    """Offline name-based predictor: given name → gender, surname → race.

    Stands in for the live name services; every lookup miss produces a
    null prediction so the resolution step can tell "service had no
    answer" apart from "service was never consulted".
    """
    table = _name_table()
    parts = full_name.split()
    given = parts[0].casefold() if parts else ""
    surname = parts[-1].casefold() if len(parts) > 1 else ""

    gender_row = table["given"].get(given)
    race_row = table["surname"].get(surname)
    gender = PredictorOutput(
        source="name-gender",
        attribute="gender",
        value=gender_row[0] if gender_row else None,
        accuracy=gender_row[1] if gender_row else None,
    )
    race = PredictorOutput(
        source="name-demographics",
        attribute="race",
        value=race_row[0] if race_row else None,
        accuracy=race_row[1] if race_row else None,
    )
    return (gender, race)
