"""The end-to-end pipeline as a chain of file contracts."""

import json

import pytest

from stem_match.pipeline import (
    STAGES,
    PipelineConfig,
    PipelineError,
    run_pipeline,
)
from stem_match.synthetic import SynthConfig, generate_synthetic


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    config = SynthConfig(seed=23, n_students=50, n_candidates=150,
                         planted_fraction=0.5)
    return generate_synthetic(config, root)


def make_config(corpus, out_dir, **overrides):
    options = dict(
        students=corpus["students"],
        candidates=corpus["candidates"],
        annotations=corpus["gt"],
        out_dir=out_dir,
        seed=4,
        cv_folds=3,
    )
    options.update(overrides)
    return PipelineConfig(**options)


def test_run_produces_every_artifact(tmp_path, corpus):
    result = run_pipeline(make_config(corpus, tmp_path / "out"))
    for name, path in result.paths.items():
        assert path.exists(), name
    assert result.skipped == []
    pages = sorted((tmp_path / "out" / "pages").glob("*.html"))
    assert pages, "no pages were rendered"
    report = json.loads((tmp_path / "out" / "report.json").read_text(encoding="utf-8"))
    assert report == result.report


def test_report_covers_each_stage(tmp_path, corpus):
    report = run_pipeline(make_config(corpus, tmp_path / "out")).report
    assert set(report) >= {"cohort", "classifier", "rolemodels", "matching", "evaluation"}
    cohort = report["cohort"]
    assert cohort["students"] == 50
    labels = cohort["weak_labels"]
    assert labels["college"] + labels["non-college"] + labels["unlabeled"] == 50
    assert cohort["college"] >= labels["college"]
    rolemodels = report["rolemodels"]
    assert 0 < rolemodels["kept"] <= 150
    assert sum(rolemodels["reasons"].values()) == rolemodels["kept"]
    assert report["matching"]["students_ranked"] == cohort["college"]
    assert set(report["evaluation"]) == {"city-all", "state-all", "city-top10", "state-top10"}
    for level in report["evaluation"].values():
        assert level["cohort_size"] >= 0


def test_evaluation_is_omitted_without_annotations(tmp_path, corpus):
    config = make_config(corpus, tmp_path / "out", annotations=None)
    report = run_pipeline(config).report
    assert "evaluation" not in report


def test_resume_skips_everything_after_a_complete_run(tmp_path, corpus):
    config = make_config(corpus, tmp_path / "out")
    run_pipeline(config)
    second = run_pipeline(config, resume=True)
    assert second.skipped == list(STAGES)


def test_resume_reruns_only_stages_with_missing_outputs(tmp_path, corpus):
    config = make_config(corpus, tmp_path / "out")
    first = run_pipeline(config)
    baseline = first.paths["matches"].read_bytes()
    first.paths["matches"].unlink()
    second = run_pipeline(config, resume=True)
    assert "rank" not in second.skipped
    assert "label" in second.skipped
    # a rerun over the same inputs reproduces the artifact byte for byte
    assert first.paths["matches"].read_bytes() == baseline


def test_rerun_from_scratch_is_byte_identical(tmp_path, corpus):
    first = run_pipeline(make_config(corpus, tmp_path / "one"))
    second = run_pipeline(make_config(corpus, tmp_path / "two"))
    for name, path in first.paths.items():
        other = second.paths[name]
        if path.is_dir():
            ours = sorted(p.name for p in path.iterdir())
            theirs = sorted(p.name for p in other.iterdir())
            assert ours == theirs
            for child in ours:
                assert (path / child).read_bytes() == (other / child).read_bytes()
        else:
            assert path.read_bytes() == other.read_bytes(), name


def test_errors_name_the_failing_stage(tmp_path, corpus):
    config = make_config(corpus, tmp_path / "out",
                         candidates=tmp_path / "no-such-file.jsonl")
    with pytest.raises(PipelineError) as err:
        run_pipeline(config)
    assert err.value.stage == "identify"


def test_config_rejects_unknown_keys(tmp_path, corpus):
    with pytest.raises(ValueError) as err:
        PipelineConfig.from_dict(
            {"students": "a", "candidates": "b", "out_dir": "c", "mystery": 1},
            base_dir=tmp_path,
        )
    assert "mystery" in str(err.value)


def test_config_load_resolves_paths_against_the_config_file(tmp_path, corpus):
    nested = tmp_path / "conf"
    nested.mkdir()
    (nested / "students.jsonl").write_bytes(corpus["students"].read_bytes())
    (nested / "candidates.jsonl").write_bytes(corpus["candidates"].read_bytes())
    config_path = nested / "pipeline.json"
    config_path.write_text(json.dumps({
        "students": "students.jsonl",
        "candidates": "candidates.jsonl",
        "out_dir": "out",
    }), encoding="utf-8")
    config = PipelineConfig.load(config_path)
    assert config.students == nested / "students.jsonl"
    assert config.out_dir == nested / "out"
    result = run_pipeline(config)
    assert result.paths["report"].exists()
