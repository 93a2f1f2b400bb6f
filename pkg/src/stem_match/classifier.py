"""Tweet-usage features and the college / non-college linear classifier.

Each feature is the fraction of a student's tweets containing a marker
(emoji, hashtag, HAHA/LOL laughter, retweet), discretized into ten bins.
A linear max-margin model (hinge loss + L2, trained by deterministic
subgradient descent with a decaying step size) turns weak labels into
predictions for the unlabeled majority.  The retweet feature is off by
default: it is retained only for ablation runs, where it tends to cost a
little accuracy rather than add any.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .labeling import COLLEGE, NON_COLLEGE
from .records import StudentRecord

# Unicode blocks counted as emoji: Miscellaneous Symbols and Pictographs,
# Emoticons, Transport and Map Symbols, Supplemental Symbols and Pictographs.
EMOJI_RANGES = (
    (0x1F300, 0x1F5FF),
    (0x1F600, 0x1F64F),
    (0x1F680, 0x1F6FF),
    (0x1F900, 0x1F9FF),
)

# Whole-token, case-sensitive laughter markers: HAHA (two or more HA
# repetitions, optional trailing H) and LOL with any number of Os.
_HAHA = re.compile(r"\b(?:HA){2,}H?\b")
_LOL = re.compile(r"\bLO+L\b")
_HASHTAG = re.compile(r"#\w")
RETWEET_PREFIX = "RT @"

BASE_FEATURES = ("emoji_bin", "hashtag_bin", "hahalol_bin")
RETWEET_FEATURE = "retweet_bin"
N_BINS = 10


class ClassifierError(ValueError):
    """Raised for unusable training data or mismatched feature vectors."""


def contains_emoji(text: str) -> bool:
    return any(lo <= ord(ch) <= hi for ch in text for lo, hi in EMOJI_RANGES)


def contains_hashtag(text: str) -> bool:
    return _HASHTAG.search(text) is not None


def contains_hahalol(text: str) -> bool:
    return _HAHA.search(text) is not None or _LOL.search(text) is not None


def is_retweet(text: str) -> bool:
    return text.startswith(RETWEET_PREFIX)


def _bin(count: int, total: int) -> int:
    # Integer form of min(floor(10 * count/total), 9); exact, no float
    # boundary artifacts.
    return min((10 * count) // total, N_BINS - 1)


@dataclass(frozen=True)
class FeatureVector:
    """Binned tweet-usage features for one student.

    ``raw_frequencies`` keeps the underlying (emoji, hashtag, hahalol,
    retweet) fractions; ``retweet_bin`` is None unless the ablation
    feature was requested.
    """

    emoji_bin: int
    hashtag_bin: int
    hahalol_bin: int
    retweet_bin: int | None
    raw_frequencies: tuple[float, float, float, float]


def extract_features(record: StudentRecord, with_retweet: bool = False) -> FeatureVector:
    """Compute relative-frequency features over a student's tweets."""
    total = len(record.tweets)
    if total == 0:
        raise ClassifierError(f"student {record.id!r} has no tweets to extract features from")
    emoji = sum(1 for t in record.tweets if contains_emoji(t))
    hashtag = sum(1 for t in record.tweets if contains_hashtag(t))
    hahalol = sum(1 for t in record.tweets if contains_hahalol(t))
    retweet = sum(1 for t in record.tweets if is_retweet(t))
    return FeatureVector(
        emoji_bin=_bin(emoji, total),
        hashtag_bin=_bin(hashtag, total),
        hahalol_bin=_bin(hahalol, total),
        retweet_bin=_bin(retweet, total) if with_retweet else None,
        raw_frequencies=(emoji / total, hashtag / total, hahalol / total, retweet / total),
    )


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 42
    epochs: int = 200
    lam: float = 0.01
    with_retweet: bool = False

    def active_features(self) -> tuple[str, ...]:
        if self.with_retweet:
            return BASE_FEATURES + (RETWEET_FEATURE,)
        return BASE_FEATURES


@dataclass(frozen=True)
class ClassifierModel:
    """Linear model: one weight per active feature plus a bias."""

    weights: tuple[float, ...]
    bias: float
    active_features: tuple[str, ...]
    seed: int
    epochs: int
    lam: float
    cv_accuracy: float | None = None
    objective_history: tuple[float, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.active_features):
            raise ClassifierError("one weight per active feature expected")


def _design_row(features: FeatureVector, active: Sequence[str]) -> list[float]:
    row = []
    for name in active:
        value = getattr(features, name)
        if value is None:
            raise ClassifierError(f"feature/model arity mismatch: {name} missing from vector")
        row.append(value / (N_BINS - 1))  # rescale bins 0..9 into [0, 1]
    return row


def _design_matrix(features: Sequence[FeatureVector], active: Sequence[str]) -> np.ndarray:
    return np.array([_design_row(f, active) for f in features], dtype=float)


def _signs(labels: Sequence[str]) -> np.ndarray:
    signs = np.empty(len(labels))
    for i, label in enumerate(labels):
        if label == COLLEGE:
            signs[i] = 1.0
        elif label == NON_COLLEGE:
            signs[i] = -1.0
        else:
            raise ClassifierError(f"training label must be college or non-college, got {label!r}")
    return signs


def _objective(X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, lam: float) -> float:
    margins = y * (X @ w + b)
    return float(0.5 * lam * (w @ w) + np.mean(np.maximum(0.0, 1.0 - margins)))


def train(features: Sequence[FeatureVector], labels: Sequence[str],
          config: TrainConfig = TrainConfig()) -> ClassifierModel:
    """Fit the max-margin model on weakly labeled feature vectors.

    Full-batch subgradient descent on mean hinge loss + (lam/2)·||w||²,
    epoch step size 1/(lam·t) with halving until the step does not
    increase the objective, so the recorded objective history is
    nonincreasing and training is deterministic (and invariant to
    duplicating the training set).
    """
    if len(features) != len(labels):
        raise ClassifierError("features and labels must align")
    y = _signs(labels)
    n_pos = int(np.sum(y > 0))
    n_neg = len(y) - n_pos
    if n_pos < 2 or n_neg < 2:
        raise ClassifierError("need at least 2 examples of each class to train")
    active = config.active_features()
    X = _design_matrix(features, active)
    n = len(y)

    w = np.zeros(len(active))
    b = 0.0
    objective = _objective(X, y, w, b, config.lam)
    history = [objective]
    for t in range(1, config.epochs + 1):
        margins = y * (X @ w + b)
        violating = (margins < 1.0) * y
        grad_w = config.lam * w - (violating @ X) / n
        grad_b = -float(np.sum(violating)) / n
        step = 1.0 / (config.lam * t)
        for _ in range(60):
            w_next = w - step * grad_w
            b_next = b - step * grad_b
            candidate = _objective(X, y, w_next, b_next, config.lam)
            if candidate <= objective:
                w, b, objective = w_next, b_next, candidate
                break
            step *= 0.5
        history.append(objective)

    return ClassifierModel(
        weights=tuple(float(v) for v in w),
        bias=float(b),
        active_features=active,
        seed=config.seed,
        epochs=config.epochs,
        lam=config.lam,
        objective_history=tuple(history),
    )


def decision_score(model: ClassifierModel, features: FeatureVector) -> float:
    row = _design_row(features, model.active_features)
    return float(sum(w * x for w, x in zip(model.weights, row)) + model.bias)


def infer(model: ClassifierModel, features: FeatureVector) -> str:
    """Predicted label; a decision score of exactly zero reads as college."""
    return COLLEGE if decision_score(model, features) >= 0.0 else NON_COLLEGE


def cross_validate(features: Sequence[FeatureVector], labels: Sequence[str], k: int = 10,
                   config: TrainConfig = TrainConfig()) -> float:
    """Mean held-out accuracy over k seeded, deterministic folds.

    Examples are shuffled per class with the config seed and dealt
    round-robin (class by class through a shared counter) so fold sizes
    differ by at most one and every fold is populated when n ≥ k.
    """
    if k < 2:
        raise ClassifierError("cross-validation needs k >= 2")
    if len(features) != len(labels):
        raise ClassifierError("features and labels must align")
    if len(features) < k:
        raise ClassifierError(f"need at least k={k} labeled examples, got {len(features)}")
    y = _signs(labels)  # validates label values up front

    rng = np.random.default_rng(config.seed)
    fold_of = np.empty(len(labels), dtype=int)
    counter = 0
    for sign in (1.0, -1.0):
        members = np.flatnonzero(y == sign)
        rng.shuffle(members)
        for index in members:
            fold_of[index] = counter % k
            counter += 1

    accuracies = []
    for fold in range(k):
        test_idx = np.flatnonzero(fold_of == fold)
        train_idx = np.flatnonzero(fold_of != fold)
        model = train([features[i] for i in train_idx], [labels[i] for i in train_idx], config)
        hits = sum(1 for i in test_idx if infer(model, features[i]) == labels[i])
        accuracies.append(hits / len(test_idx))
    return float(np.mean(accuracies))


# ---------------------------------------------------------------------------
# Persistence: plain-text weight file
# ---------------------------------------------------------------------------


def save_model(model: ClassifierModel, path: str | Path) -> None:
    lines = ["# stem-match linear classifier"]
    for name, weight in zip(model.active_features, model.weights):
        lines.append(f"feature {name} {weight!r}")
    lines.append(f"bias {model.bias!r}")
    lines.append(f"lambda {model.lam!r}")
    lines.append(f"seed {model.seed}")
    lines.append(f"epochs {model.epochs}")
    if model.cv_accuracy is not None:
        lines.append(f"cv_accuracy {model.cv_accuracy!r}")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> ClassifierModel:
    names: list[str] = []
    weights: list[float] = []
    scalars: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "feature" and len(parts) == 3:
            names.append(parts[1])
            weights.append(float(parts[2]))
        elif len(parts) == 2:
            scalars[parts[0]] = parts[1]
        else:
            raise ClassifierError(f"unparseable model line: {line!r}")
    try:
        return ClassifierModel(
            weights=tuple(weights),
            bias=float(scalars["bias"]),
            active_features=tuple(names),
            seed=int(scalars["seed"]),
            epochs=int(scalars["epochs"]),
            lam=float(scalars["lambda"]),
            cv_accuracy=float(scalars["cv_accuracy"]) if "cv_accuracy" in scalars else None,
        )
    except KeyError as exc:
        raise ClassifierError(f"model file missing field {exc.args[0]!r}") from exc
