"""Command-line entry points, exercised through ``main(argv)``."""

import json

import pytest

from stem_match.cli import main


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli-corpus")
    synth_config = root / "synth.json"
    synth_config.write_text(json.dumps({
        "seed": 31, "n_students": 30, "n_candidates": 90,
        "planted_fraction": 0.5,
    }), encoding="utf-8")
    assert main(["synth", "--config", str(synth_config), "--out-dir", str(root)]) == 0
    return root


def read_lines(path):
    return path.read_text(encoding="utf-8").splitlines()


def test_synth_writes_the_corpus(corpus):
    for name in ("students.jsonl", "candidates.jsonl", "gt.jsonl"):
        assert (corpus / name).exists(), name
    assert len(read_lines(corpus / "students.jsonl")) == 30
    assert len(read_lines(corpus / "candidates.jsonl")) == 90


def test_stagewise_commands_chain_together(corpus, tmp_path):
    # outputs land in a directory that does not exist yet: every stage
    # command must create its own parents
    out = tmp_path / "nested" / "out"

    assert main(["label", "--students", str(corpus / "students.jsonl"),
                 "--out", str(out / "labels.jsonl")]) == 0
    labels = [json.loads(line) for line in read_lines(out / "labels.jsonl")]
    assert len(labels) == 30

    assert main(["classify", "--train", str(out / "labels.jsonl"),
                 "--students", str(corpus / "students.jsonl"),
                 "--model-out", str(out / "model.txt"),
                 "--out", str(out / "predicted.jsonl")]) == 0
    assert (out / "model.txt").exists()
    assert len(read_lines(out / "predicted.jsonl")) == 30

    assert main(["identify", "--candidates", str(corpus / "candidates.jsonl"),
                 "--out", str(out / "rolemodels.jsonl")]) == 0
    kept = [json.loads(line) for line in read_lines(out / "rolemodels.jsonl")]
    assert kept and all(row["reason"] for row in kept)

    assert main(["attributes", "--in", str(corpus / "students.jsonl"),
                 "--kind", "student", "--out", str(out / "sprof.jsonl")]) == 0
    assert main(["attributes", "--in", str(out / "rolemodels.jsonl"),
                 "--kind", "candidate", "--out", str(out / "cprof.jsonl")]) == 0

    assert main(["rank", "--students", str(out / "sprof.jsonl"),
                 "--rolemodels", str(out / "cprof.jsonl"),
                 "-k", "5", "--out", str(out / "matches.jsonl")]) == 0
    matches = [json.loads(line) for line in read_lines(out / "matches.jsonl")]
    assert len(matches) == 30
    assert all(len(row["ranked"]) <= 5 for row in matches)

    assert main(["evaluate", "--matches", str(out / "matches.jsonl"),
                 "--annotations", str(corpus / "gt.jsonl"),
                 "--level", "state-all",
                 "--out", str(out / "eval.json")]) == 0
    evaluation = json.loads((out / "eval.json").read_text(encoding="utf-8"))
    assert evaluation["level"] == "state-all"
    assert evaluation["cohort_size"] == 30


def test_pipeline_command_runs_from_a_config_file(corpus, tmp_path):
    config_path = tmp_path / "pipeline.json"
    config_path.write_text(json.dumps({
        "students": str(corpus / "students.jsonl"),
        "candidates": str(corpus / "candidates.jsonl"),
        "annotations": str(corpus / "gt.jsonl"),
        "out_dir": str(tmp_path / "out"),
        "cv_folds": 3,
    }), encoding="utf-8")
    assert main(["pipeline", "--config", str(config_path)]) == 0
    assert (tmp_path / "out" / "report.json").exists()
    # a resumed run over complete outputs is a no-op that still succeeds
    assert main(["pipeline", "--config", str(config_path), "--resume"]) == 0


def test_missing_input_file_is_a_clean_error(tmp_path, capsys):
    code = main(["label", "--students", str(tmp_path / "absent.jsonl"),
                 "--out", str(tmp_path / "labels.jsonl")])
    assert code == 1
    captured = capsys.readouterr()
    assert "error:" in captured.err


def test_bad_flag_value_is_a_clean_error(corpus, tmp_path, capsys):
    assert main(["attributes", "--in", str(corpus / "students.jsonl"),
                 "--kind", "student", "--out", str(tmp_path / "sprof.jsonl")]) == 0
    assert main(["attributes", "--in", str(corpus / "candidates.jsonl"),
                 "--kind", "candidate", "--out", str(tmp_path / "cprof.jsonl")]) == 0
    code = main(["rank", "--students", str(tmp_path / "sprof.jsonl"),
                 "--rolemodels", str(tmp_path / "cprof.jsonl"),
                 "--fuzzy-threshold", "7.0",
                 "--out", str(tmp_path / "m.jsonl")])
    assert code == 1
    assert "error:" in capsys.readouterr().err
    assert not (tmp_path / "m.jsonl").exists()
