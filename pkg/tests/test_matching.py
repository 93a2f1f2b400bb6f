"""Ranking, the candidate index fast path, and accuracy evaluation."""

import random

import pytest

import oracles
from stem_match.matching import (
    DEFAULT_TOP10_CITIES,
    LEVELS,
    CandidateIndex,
    GroundTruthAnnotation,
    MatchError,
    MatchResult,
    evaluate,
    is_correct_match,
    load_annotations,
    load_matches,
    match_corpus,
    rank,
    write_matches,
)
from stem_match.records import AttributeProfile
from stem_match.similarity import SimilarityBreakdown, combined_score

GENDERS = ("female", "male", None)
RACES = ("White", "Black", "Asian", "Api", "Hispanic", None)
CITIES = ("dallas, tx", "boston, ma", "austin, tx", None)
TAGS = ("robotics", "robotic", "chess", "baking", "poetry", "gardens")


def random_profile(rng):
    interests = frozenset(rng.sample(TAGS, rng.randint(0, 3)))
    return AttributeProfile(
        gender=rng.choice(GENDERS),
        race=rng.choice(RACES),
        location=rng.choice(CITIES),
        interests=interests,
    )


def random_pool(rng, n, prefix):
    return [(f"{prefix}{i:04d}", random_profile(rng)) for i in range(n)]


# ---------------------------------------------------------------------------
# rank()
# ---------------------------------------------------------------------------


def test_rank_matches_full_sort_oracle_small():
    rng = random.Random(7)
    candidates = random_pool(rng, 40, "c")
    for s in range(10):
        student = random_profile(rng)
        expected = oracles.full_sort_rank("s", student, candidates, 5, 0.8)
        result = rank("s", student, candidates, k=5)
        assert result.candidate_ids() == tuple(cid for cid, _ in expected)
        for (got_id, got), (_, want) in zip(result.ranked, expected):
            assert got == want, got_id


def test_rank_breaks_ties_by_candidate_id():
    student = AttributeProfile(gender="female")
    twin = AttributeProfile(gender="female")
    candidates = [("c9", twin), ("c1", twin), ("c5", twin)]
    result = rank("s", student, candidates, k=3)
    assert result.candidate_ids() == ("c1", "c5", "c9")


def test_rank_puts_no_signal_candidates_last():
    student = AttributeProfile(gender="female", interests=frozenset({"chess"}))
    scoreless = AttributeProfile(location="nowhere")   # nothing comparable
    weak = AttributeProfile(gender="male")             # comparable but 0.0
    candidates = [("c1", scoreless), ("c2", weak)]
    result = rank("s", student, candidates, k=2)
    assert result.candidate_ids() == ("c2", "c1")
    assert result.ranked[0][1].combined == 0.0
    assert not result.ranked[0][1].no_signal
    assert result.ranked[1][1].no_signal


def test_rank_k_larger_than_pool_returns_everything():
    rng = random.Random(3)
    candidates = random_pool(rng, 4, "c")
    result = rank("s", random_profile(rng), candidates, k=10)
    assert len(result.ranked) == 4


def test_match_corpus_validates_inputs():
    student = ("s1", AttributeProfile(gender="female"))
    candidate = ("c1", AttributeProfile(gender="female"))
    with pytest.raises(MatchError):
        match_corpus([student], [], k=5)
    with pytest.raises(MatchError):
        match_corpus([student], [candidate], k=0)
    assert match_corpus([], [candidate], k=5) == []


def test_candidate_index_rejects_duplicates_and_bad_threshold():
    profile = AttributeProfile(gender="female")
    with pytest.raises(MatchError):
        CandidateIndex([("c1", profile), ("c1", profile)], 0.8)
    with pytest.raises(MatchError):
        CandidateIndex([("c1", profile)], 1.5)


def test_index_scores_agree_with_pairwise_scoring_exactly():
    # the vectorized index must be bit-identical to scoring pairs one at a
    # time, not merely close
    rng = random.Random(21)
    candidates = random_pool(rng, 120, "c")
    index = CandidateIndex(candidates, 0.8)
    for _ in range(25):
        student = random_profile(rng)
        combined, no_signal, _ = index.score(student)
        for pos, (cid, profile) in enumerate(candidates):
            breakdown = combined_score(student, profile, 0.8)
            assert combined[pos] == breakdown.combined, cid
            assert bool(no_signal[pos]) == breakdown.no_signal, cid


def test_match_result_rejects_duplicate_candidates():
    breakdown = SimilarityBreakdown(1.0, None, None, None, 1.0, False)
    with pytest.raises(MatchError):
        MatchResult("s1", (("c1", breakdown), ("c1", breakdown)))


def test_match_file_round_trip(tmp_path):
    rng = random.Random(11)
    students = random_pool(rng, 6, "s")
    candidates = random_pool(rng, 30, "c")
    results = match_corpus(students, candidates, k=5)
    path = tmp_path / "matches.jsonl"
    write_matches(path, results)
    assert load_matches(path) == results


# ---------------------------------------------------------------------------
# Ground truth and evaluation
# ---------------------------------------------------------------------------


def annotation(subject_id, gender="female", race="Asian", city="Dallas",
               state="TX", role_model=None, planted=None):
    return GroundTruthAnnotation(
        subject_id=subject_id, gender=gender, race=race, city=city,
        state=state, is_stem_role_model=role_model, planted_candidate_id=planted,
    )


def result_for(student_id, candidate_ids):
    breakdown = SimilarityBreakdown(1.0, None, None, None, 1.0, False)
    return MatchResult(student_id, tuple((cid, breakdown) for cid in candidate_ids))


def test_annotation_round_trip_and_validation():
    note = annotation("s1", role_model=True, planted="c3")
    assert GroundTruthAnnotation.from_dict({
        "subject_id": "s1", "gender": "female", "race": "Asian",
        "city": "Dallas", "state": "TX", "is_stem_role_model": True,
        "planted_candidate_id": "c3",
    }) == note
    with pytest.raises(MatchError):
        GroundTruthAnnotation.from_dict({"subject_id": "s1", "is_stem_role_model": "yes"})
    with pytest.raises(MatchError):
        GroundTruthAnnotation(subject_id="s1", city="  ")


def test_load_annotations_rejects_duplicates(tmp_path):
    path = tmp_path / "gt.jsonl"
    path.write_text(
        '{"subject_id": "s1"}\n{"subject_id": "s1"}\n', encoding="utf-8"
    )
    with pytest.raises(MatchError):
        load_annotations(path)


def test_is_correct_match_needs_all_conditions():
    student = annotation("s1")
    good = annotation("c1", role_model=True)
    assert is_correct_match(student, good, "city-all")
    # every single deviation breaks it
    assert not is_correct_match(student, annotation("c1", role_model=False), "city-all")
    assert not is_correct_match(student, annotation("c1", role_model=None), "city-all")
    assert not is_correct_match(student, annotation("c1", role_model=True, gender="male"), "city-all")
    assert not is_correct_match(student, annotation("c1", role_model=True, race="White"), "city-all")
    assert not is_correct_match(student, annotation("c1", role_model=True, city="Austin"), "city-all")


def test_is_correct_match_absent_fields_count_as_incorrect():
    student = annotation("s1", gender=None)
    candidate = annotation("c1", role_model=True, gender=None)
    assert not is_correct_match(student, candidate, "city-all")


def test_state_level_compares_state_instead_of_city():
    student = annotation("s1", city="Dallas", state="TX")
    candidate = annotation("c1", role_model=True, city="Austin", state="TX")
    assert not is_correct_match(student, candidate, "city-all")
    assert is_correct_match(student, candidate, "state-all")


def test_place_comparison_is_normalized():
    student = annotation("s1", city="  DALLAS ")
    candidate = annotation("c1", role_model=True, city="dallas")
    assert is_correct_match(student, candidate, "city-all")


def test_evaluate_counts_students_with_at_least_n_correct():
    annotations = {
        "s1": annotation("s1"),
        "s2": annotation("s2"),
        "s3": annotation("s3", city="Seattle", state="WA"),
        "good1": annotation("good1", role_model=True),
        "good2": annotation("good2", role_model=True),
        "bad": annotation("bad", role_model=False),
    }
    results = [
        result_for("s1", ["good1", "good2", "bad"]),  # two correct
        result_for("s2", ["good1", "bad"]),           # one correct
        result_for("s3", ["good1"]),                  # zero (city mismatch)
    ]
    report = evaluate(results, annotations, "city-all", n_max=3)
    assert report.cohort_size == 3
    assert report.accuracy_at(1) == 2 / 3
    assert report.accuracy_at(2) == 1 / 3
    assert report.accuracy_at(3) == 0.0


def test_evaluate_ranked_candidate_without_annotation_is_not_correct():
    annotations = {"s1": annotation("s1"), "known": annotation("known", role_model=True)}
    report = evaluate([result_for("s1", ["mystery", "known"])], annotations, "city-all")
    assert report.accuracy_at(1) == 1.0
    assert report.accuracy_at(2) == 0.0


def test_evaluate_requires_student_annotations():
    with pytest.raises(MatchError) as err:
        evaluate([result_for("s9", ["c1"])], {}, "city-all")
    assert "s9" in str(err.value)


def test_evaluate_top10_filters_cohort_by_annotated_city():
    annotations = {
        "s1": annotation("s1", city="Dallas"),            # on the list
        "s2": annotation("s2", city="Walla Walla"),       # not on it
        "good1": annotation("good1", role_model=True),
    }
    results = [result_for("s1", ["good1"]), result_for("s2", ["good1"])]
    report = evaluate(results, annotations, "city-top10")
    assert report.cohort_size == 1
    assert report.accuracy_at(1) == 1.0
    assert "Dallas" in DEFAULT_TOP10_CITIES


def test_evaluate_counts_no_signal_students_separately():
    silent = SimilarityBreakdown(None, None, None, None, 0.0, True)
    results = [
        MatchResult("s1", (("good1", silent),)),
        result_for("s2", ["good1"]),
    ]
    annotations = {
        "s1": annotation("s1"),
        "s2": annotation("s2"),
        "good1": annotation("good1", role_model=True),
    }
    report = evaluate(results, annotations, "city-all")
    assert report.no_signal_students == 1
    assert report.cohort_size == 2  # still part of the cohort


def test_evaluate_empty_cohort_reports_zeros():
    annotations = {"s1": annotation("s1", city="Nowhere")}
    report = evaluate([result_for("s1", [])], annotations, "city-top10")
    assert report.cohort_size == 0
    assert all(report.accuracy_at(n) == 0.0 for n in range(1, 6))


def test_state_accuracy_dominates_city_accuracy_on_random_data():
    rng = random.Random(17)
    cities = [("Dallas", "TX"), ("Austin", "TX"), ("Boston", "MA"), ("Miami", "FL")]
    annotations = {}
    results = []
    for i in range(40):
        city, state = rng.choice(cities)
        annotations[f"s{i}"] = annotation(f"s{i}", gender=rng.choice(("female", "male")),
                                          city=city, state=state)
    for j in range(60):
        city, state = rng.choice(cities)
        annotations[f"c{j}"] = annotation(f"c{j}", gender=rng.choice(("female", "male")),
                                          city=city, state=state,
                                          role_model=rng.random() < 0.7)
    for i in range(40):
        picks = rng.sample(range(60), 5)
        results.append(result_for(f"s{i}", [f"c{j}" for j in picks]))
    city_report = evaluate(results, annotations, "city-all")
    state_report = evaluate(results, annotations, "state-all")
    for n in range(1, 6):
        assert state_report.accuracy_at(n) >= city_report.accuracy_at(n)


def test_levels_are_the_four_documented_ones():
    assert LEVELS == ("city-all", "state-all", "city-top10", "state-top10")
    with pytest.raises(MatchError):
        evaluate([], {}, "galaxy-all")
