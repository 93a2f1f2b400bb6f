"""Command-line interface.

One subcommand per pipeline stage plus ``pipeline`` (run everything from
a config file) and ``synth`` (generate a synthetic population).  Each
stage subcommand reads and writes plain JSONL files so stages can be
chained, inspected, and rerun by hand.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import attributes as attr
from . import classifier as clf
from . import labeling
from . import matching
from . import pipeline as pipeline_mod
from . import rolemodels
from . import synthetic
from .records import CandidateRecord, LoadResult, StudentRecord, load_candidates, load_students, read_jsonl, write_jsonl


def _report_load(result: LoadResult, path: str) -> None:
    for error in result.errors:
        print(f"warning: {path} line {error.line}: {error.message}", file=sys.stderr)


def _cmd_label(args: argparse.Namespace) -> int:
    loaded = load_students(args.students)
    _report_load(loaded, args.students)
    rules = labeling.load_rules(args.rules) if args.rules else labeling.default_rules()
    partition = labeling.label_corpus(loaded.records, rules)
    write_jsonl(args.out, labeling.label_rows(partition, loaded.records))
    counts = partition.counts()
    print(f"labeled {len(loaded.records)} students: {counts}")
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    loaded = load_students(args.students)
    _report_load(loaded, args.students)
    labels = labeling.read_labels(args.train)
    config = clf.TrainConfig(seed=args.seed, epochs=args.epochs, lam=args.lam,
                             with_retweet=args.with_retweet)
    train_records = [
        r for r in loaded.records
        if r.tweets and labels.get(r.id) in (labeling.COLLEGE, labeling.NON_COLLEGE)
    ]
    features = [clf.extract_features(r, args.with_retweet) for r in train_records]
    model = clf.train(features, [labels[r.id] for r in train_records], config)
    if args.model_out:
        clf.save_model(model, args.model_out)
    rows = []
    n_predicted = 0
    for record in loaded.records:
        weak = labels.get(record.id, labeling.UNLABELED)
        predicted = None
        if weak == labeling.UNLABELED and record.tweets:
            predicted = clf.infer(model, clf.extract_features(record, args.with_retweet))
            n_predicted += 1
        row = {"id": record.id, "weak_label": weak,
               "college": weak == labeling.COLLEGE or predicted == labeling.COLLEGE}
        if predicted is not None:
            row["predicted"] = predicted
        rows.append(row)
    write_jsonl(args.out, rows)
    print(f"trained on {len(train_records)} students, predicted {n_predicted}")
    return 0


def _cmd_identify(args: argparse.Namespace) -> int:
    taxonomy = rolemodels.load_taxonomy(args.taxonomy) if args.taxonomy else rolemodels.default_taxonomy()
    majors = rolemodels.load_majors(args.majors) if args.majors else rolemodels.default_majors()
    loaded = load_candidates(args.candidates, industries=taxonomy.groups)
    _report_load(loaded, args.candidates)
    result = rolemodels.filter_role_models(loaded.records, taxonomy, majors)
    rows = []
    for candidate in result.role_models:
        row = candidate.to_dict()
        row["reason"] = result.decisions[candidate.id].reason
        rows.append(row)
    write_jsonl(args.out, rows)
    print(f"kept {len(rows)} of {len(loaded.records)} candidates: {result.counts}")
    return 0


def _cmd_attributes(args: argparse.Namespace) -> int:
    pairs = []
    if args.kind == "student":
        loaded = load_students(args.in_path)
        _report_load(loaded, args.in_path)
        records: list[StudentRecord | CandidateRecord] = list(loaded.records)
    else:
        records = [CandidateRecord.from_dict(row) for row in read_jsonl(args.in_path)]
    for record in records:
        pairs.append((record.id, attr.build_profile(record)))
    attr.write_profiles(args.out, pairs)
    print(f"wrote {len(pairs)} {args.kind} profiles")
    return 0


def _cmd_rank(args: argparse.Namespace) -> int:
    students = attr.load_profiles(args.students)
    candidates = attr.load_profiles(args.rolemodels)
    results = matching.match_corpus(students, candidates, args.k, args.fuzzy_threshold)
    matching.write_matches(args.out, results)
    no_signal = sum(1 for r in results if r.all_no_signal())
    print(f"ranked {len(candidates)} candidates for {len(results)} students "
          f"({no_signal} with no signal)")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    results = matching.load_matches(args.matches)
    annotations = matching.load_annotations(args.annotations)
    report = matching.evaluate(results, annotations, args.level)
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(text + "\n", encoding="utf-8")
    print(f"{args.level}: cohort {report.cohort_size}, "
          f"accuracy@1 {report.accuracy_at(1):.3f}")
    return 0


def _cmd_pipeline(args: argparse.Namespace) -> int:
    config = pipeline_mod.PipelineConfig.load(args.config)
    result = pipeline_mod.run_pipeline(config, resume=args.resume)
    if result.skipped:
        print(f"skipped (outputs exist): {', '.join(result.skipped)}")
    for name in ("labels", "predicted", "rolemodels", "matches", "report"):
        print(f"{name}: {result.paths[name]}")
    print(f"pages: {result.paths['pages']}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise synthetic.SynthError(f"{args.config}: invalid JSON: {exc.msg}") from exc
        config = synthetic.SynthConfig.from_dict(data)
    else:
        config = synthetic.SynthConfig()
    paths = synthetic.generate_synthetic(config, args.out_dir)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stem-match",
                                     description="Match students with STEM role models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("label", help="weakly label students as college / non-college")
    p.add_argument("--students", required=True)
    p.add_argument("--rules", default=None, help="rules JSONL (default: bundled rules)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_label)

    p = sub.add_parser("classify", help="train on weak labels and predict the unlabeled")
    p.add_argument("--train", required=True, help="labels JSONL from the label step")
    p.add_argument("--students", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--with-retweet", action="store_true")
    p.add_argument("--model-out", default=None)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lam", type=float, default=0.01)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("identify", help="filter candidates down to STEM role models")
    p.add_argument("--candidates", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--taxonomy", default=None)
    p.add_argument("--majors", default=None)
    p.set_defaults(func=_cmd_identify)

    p = sub.add_parser("attributes", help="resolve demographic + interest profiles")
    p.add_argument("--in", dest="in_path", required=True, metavar="IN")
    p.add_argument("--kind", choices=("student", "candidate"), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_attributes)

    p = sub.add_parser("rank", help="rank role models for every student")
    p.add_argument("--students", required=True, help="student profiles JSONL")
    p.add_argument("--rolemodels", required=True, help="role-model profiles JSONL")
    p.add_argument("-k", type=int, default=matching.DEFAULT_K)
    p.add_argument("--fuzzy-threshold", type=float, default=matching.DEFAULT_FUZZY_THRESHOLD)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("evaluate", help="score matches against ground truth")
    p.add_argument("--matches", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--level", choices=matching.LEVELS, default=matching.LEVEL_CITY_ALL)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("pipeline", help="run every stage from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--resume", action="store_true",
                   help="skip stages whose outputs already exist")
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("synth", help="generate a synthetic population")
    p.add_argument("--config", default=None, help="synth config JSON (default: built-in)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
