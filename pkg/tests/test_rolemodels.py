"""Industry taxonomy, STEM major list, and the role-model predicate."""

import pytest

from stem_match.records import CandidateRecord
from stem_match.rolemodels import (
    GROUP_NON_STEM,
    GROUP_RELATED,
    GROUP_STEM,
    REASON_NON_STEM,
    REASON_RELATED_WITH_DEGREE,
    REASON_RELATED_WITHOUT_DEGREE,
    REASON_STEM,
    REASON_UNKNOWN,
    REASONS,
    IndustryTaxonomy,
    TaxonomyError,
    default_majors,
    default_taxonomy,
    filter_role_models,
    is_role_model,
    load_majors,
    load_taxonomy,
)

TAXONOMY = IndustryTaxonomy({
    "biotechnology": GROUP_STEM,
    "computer software": GROUP_STEM,
    "financial services": GROUP_RELATED,
    "hospital & health care": GROUP_RELATED,
    "restaurants": GROUP_NON_STEM,
})


def candidate(industry, majors=(), unknown=False, cid="c1"):
    return CandidateRecord(
        id=cid, industry=industry, education_majors=tuple(majors),
        location_raw="Denver, CO", unknown_industry=unknown,
    )


# ---------------------------------------------------------------------------
# Predicate branches
# ---------------------------------------------------------------------------


def test_stem_industry_is_a_role_model_regardless_of_degree():
    decision = is_role_model(candidate("Biotechnology"), TAXONOMY, default_majors())
    assert decision.is_role_model
    assert decision.reason == REASON_STEM
    assert decision.stem_major is None


def test_related_industry_needs_a_stem_degree():
    majors = default_majors()
    with_degree = is_role_model(
        candidate("Financial Services", majors=["Computer Science"]), TAXONOMY, majors
    )
    assert with_degree.is_role_model
    assert with_degree.reason == REASON_RELATED_WITH_DEGREE
    assert with_degree.stem_major == "Computer Science"

    without = is_role_model(
        candidate("Financial Services", majors=["History"]), TAXONOMY, majors
    )
    assert not without.is_role_model
    assert without.reason == REASON_RELATED_WITHOUT_DEGREE


def test_major_resolution_is_exact_after_normalization():
    majors = default_majors()
    # aliases and case/whitespace variants resolve ...
    for form in ("cs", "CS", "  computer   science ", "Comp Sci"):
        decision = is_role_model(candidate("Financial Services", majors=[form]), TAXONOMY, majors)
        assert decision.is_role_model, form
        assert decision.stem_major == "Computer Science"
    # ... but embedded mentions do not (no fuzzy matching)
    decision = is_role_model(
        candidate("Financial Services", majors=["B.S. in Computer Science"]), TAXONOMY, majors
    )
    assert not decision.is_role_model


def test_non_stem_industry_is_never_a_role_model():
    decision = is_role_model(
        candidate("Restaurants", majors=["Computer Science"]), TAXONOMY, default_majors()
    )
    assert not decision.is_role_model
    assert decision.reason == REASON_NON_STEM


def test_unknown_industry_is_its_own_reason():
    decision = is_role_model(
        candidate("Basket Weaving", unknown=True), TAXONOMY, default_majors()
    )
    assert not decision.is_role_model
    assert decision.reason == REASON_UNKNOWN


def test_filter_preserves_order_and_counts_every_reason():
    pool = [
        candidate("Biotechnology", cid="c1"),
        candidate("Restaurants", cid="c2"),
        candidate("Financial Services", majors=["cs"], cid="c3"),
        candidate("Financial Services", cid="c4"),
        candidate("Who Knows", unknown=True, cid="c5"),
    ]
    result = filter_role_models(pool, TAXONOMY, default_majors())
    assert [c.id for c in result.role_models] == ["c1", "c3"]
    assert set(result.counts) == set(REASONS)
    assert result.counts == {
        REASON_STEM: 1,
        REASON_RELATED_WITH_DEGREE: 1,
        REASON_RELATED_WITHOUT_DEGREE: 1,
        REASON_NON_STEM: 1,
        REASON_UNKNOWN: 1,
    }
    assert result.decisions["c4"].reason == REASON_RELATED_WITHOUT_DEGREE


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def test_taxonomy_lookup_is_case_and_whitespace_insensitive():
    assert TAXONOMY.group_of("BIOTECHNOLOGY") == GROUP_STEM
    assert TAXONOMY.group_of("  hospital  &  health care ") == GROUP_RELATED
    assert TAXONOMY.group_of("underwater basket weaving") is None


def test_load_taxonomy_rejects_duplicates_and_bad_groups(tmp_path):
    path = tmp_path / "taxonomy.jsonl"
    path.write_text(
        '{"industry": "A", "group": "STEM"}\n{"industry": "a", "group": "STEM"}\n',
        encoding="utf-8",
    )
    with pytest.raises(TaxonomyError):
        load_taxonomy(path)
    path.write_text('{"industry": "A", "group": "VERY-STEM"}\n', encoding="utf-8")
    with pytest.raises(TaxonomyError):
        load_taxonomy(path)


def test_load_majors_rejects_duplicate_aliases(tmp_path):
    path = tmp_path / "majors.jsonl"
    path.write_text(
        '{"major": "Computer Science", "aliases": ["cs"]}\n'
        '{"major": "Cognitive Science", "aliases": ["cs"]}\n',
        encoding="utf-8",
    )
    with pytest.raises(TaxonomyError):
        load_majors(path)


def test_bundled_taxonomy_covers_the_standard_industry_list():
    taxonomy = default_taxonomy()
    assert len(taxonomy) == 147
    groups = list(taxonomy.groups.values())
    assert groups.count(GROUP_STEM) == 23
    assert groups.count(GROUP_RELATED) == 27
    assert groups.count(GROUP_NON_STEM) == 97
    # spot checks across the three groups
    assert taxonomy.group_of("Computer Software") == GROUP_STEM
    assert taxonomy.group_of("Higher Education") == GROUP_RELATED
    assert taxonomy.group_of("Restaurants") == GROUP_NON_STEM


def test_bundled_majors_list():
    majors = default_majors()
    assert len(majors) == 38
    assert majors.resolve("computer science") == "Computer Science"
    assert majors.resolve("underwater basket weaving") is None
