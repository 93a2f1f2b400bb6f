"""Independent reference implementations the tests check against.

Deliberately written with different algorithms than the package: plain
memoized recursion for edit distance, exhaustive enumeration for maximum
matching, and a per-pair full sort for ranking, so agreement is evidence
rather than tautology.
"""

from __future__ import annotations

from functools import lru_cache

from stem_match.similarity import combined_score


def edit_distance(a: str, b: str) -> int:
    """Textbook recursive Levenshtein with memoization."""

    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        cost = 0 if a[i - 1] == b[j - 1] else 1
        return min(go(i - 1, j) + 1, go(i, j - 1) + 1, go(i - 1, j - 1) + cost)

    return go(len(a), len(b))


def edit_similarity(a: str, b: str) -> float:
    total = len(a) + len(b)
    if total == 0:
        return 1.0
    return (total - edit_distance(a, b)) / total


def exhaustive_matching_size(left: list[str], right: list[str], threshold: float) -> int:
    """Maximum one-to-one matching size by trying every injective assignment."""
    edges = [
        [edit_similarity(a, b) >= threshold for b in right]
        for a in left
    ]

    def best(i: int, used: frozenset[int]) -> int:
        if i == len(left):
            return 0
        # either leave left[i] unmatched ...
        result = best(i + 1, used)
        # ... or match it to any free compatible right vertex
        for j in range(len(right)):
            if j not in used and edges[i][j]:
                result = max(result, 1 + best(i + 1, used | {j}))
        return result

    return best(0, frozenset())


def classical_jaccard(a: set[str], b: set[str]) -> float:
    return len(a & b) / len(a | b)


def full_sort_rank(student_id, student, candidates, k, threshold):
    """Score every pair one at a time, sort, and cut at k.

    Ordering: signal before no-signal, then combined descending, then
    candidate id ascending.
    """
    scored = []
    for candidate_id, profile in candidates:
        breakdown = combined_score(student, profile, threshold)
        scored.append((candidate_id, breakdown))
    scored.sort(key=lambda item: (item[1].no_signal, -item[1].combined, item[0]))
    return scored[:k]
