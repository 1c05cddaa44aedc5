"""Command-line entry point for the full pipeline.

Configuration precedence: built-in defaults < --config JSON file <
SANSKRITKIT_* environment variables < explicit flags. Outputs embed their
manifest as '#' comment headers so artifacts are self-describing, and
nothing time-dependent is written: identical config and seed give
byte-identical files.

Exit codes: 0 success, 1 usage, 2 data error, 3 backend error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager
from collections import Counter
from pathlib import Path
from typing import Optional

from . import conllu, deplin, metrics, sandhi, tagcodec, taskgen, translit
from .backend import BackendConfig, BackendError, make_backend, predict_sources
from .types import ValidationError, validate_tree

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BACKEND = 3

ENV_PREFIX = "SANSKRITKIT_"

_DEFAULTS = {
    "seed": 0,
    "jobs": 4,
    "budget": taskgen.DEFAULT_PARAGRAPH_BUDGET,
    "dev_size": 8190,
    "test_size": 8398,
    "joiner": taskgen.DEFAULT_JOINER,
}


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_USAGE)


def _merged_option(args: argparse.Namespace, key: str, cast=str):
    """defaults < config file < environment < explicit flag."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    env = os.environ.get(ENV_PREFIX + key.upper())
    if env is not None:
        return cast(env)
    if getattr(args, "_config_file", None) and key in args._config_file:
        return cast(args._config_file[key])
    return _DEFAULTS.get(key)


def _load_config_file(args: argparse.Namespace) -> None:
    path = getattr(args, "config", None)
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            args._config_file = json.load(fh)
    else:
        args._config_file = {}


@contextmanager
def _open_in(path: Optional[str]):
    if path in (None, "-"):
        yield sys.stdin
    else:
        with open(path, "r", encoding="utf-8") as fh:
            yield fh


@contextmanager
def _open_out(path: Optional[str]):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _read_corpus(path: str, stats: Optional[conllu.ReadStats] = None):
    return list(conllu.read_conllu(path, stats=stats))


# ---------------------------------------------------------------- commands


def cmd_ingest(args) -> int:
    stats = conllu.ReadStats()
    sentences = []
    for path in args.inputs:
        sentences.extend(_read_corpus(path, stats))
    per_category: Counter = Counter()
    tokens_by_cat: Counter = Counter()
    sents_by_cat: Counter = Counter()
    bad_trees = 0
    for s in sentences:
        category = s.category or "other"
        per_category[category] += len(s.raw_text)
        tokens_by_cat[category] += len(s)
        sents_by_cat[category] += 1
        if s.has_heads and not validate_tree(s).passes:
            bad_trees += 1
    if args.out:
        with _open_out(args.out) as out:
            out.write(conllu.write_conllu(sentences))
    print(f"# sentences: {stats.sentences}  tokens: {stats.tokens}  "
          f"skipped-lines: {stats.skipped_lines}  invalid-trees: {bad_trees}")
    print("category\tsentences\ttokens\tchars")
    for category, chars in per_category.most_common():
        print(f"{category}\t{sents_by_cat[category]}\t"
              f"{tokens_by_cat[category]}\t{chars}")
    return EXIT_OK


def cmd_translit(args) -> int:
    table = translit.load_master_table(args.table)
    with _open_in(args.infile) as stream, _open_out(args.out) as out:
        for line in stream:
            out.write(
                translit.transliterate(
                    line.rstrip("\n"), args.source, args.target, table=table
                )
                + "\n"
            )
    return EXIT_OK


def cmd_build_codebook(args) -> int:
    sentences = _read_corpus(args.infile)
    alphabet = args.alphabet or tagcodec.DEFAULT_RESERVED_ALPHABET
    if not args.no_scan:
        lines = []
        for s in sentences:
            lines.append(s.raw_text)
            lines.extend(t.form for t in s.tokens)
            lines.extend(t.lemma for t in s.tokens)
        tagcodec.assert_reserved_safe(lines, alphabet)
    frequencies = tagcodec.count_tags(t.morph for s in sentences for t in s.tokens)
    book = tagcodec.build_codebook(frequencies, alphabet)
    tagcodec.write_codebook(book, args.out)
    print(f"codebook {book.version}: {len(book)} tags -> {args.out}")
    return EXIT_OK


def cmd_encode_tags(args) -> int:
    book = tagcodec.read_codebook(args.codebook)
    with _open_in(args.infile) as stream, _open_out(args.out) as out:
        for line in stream:
            out.write(book.code_for(line.rstrip("\n")) + "\n")
    return EXIT_OK


def cmd_decode_tags(args) -> int:
    book = tagcodec.read_codebook(args.codebook)
    with _open_in(args.infile) as stream, _open_out(args.out) as out:
        for line in stream:
            out.write(book.tag_for(line.strip()) + "\n")
    return EXIT_OK


def _rule_table(args) -> sandhi.RuleTable:
    return sandhi.load_rule_table(args.rules, include_optional=args.optional_rules)


def cmd_sandhi_synth(args) -> int:
    print(sandhi.synth_sequence(args.words, _rule_table(args)))
    return EXIT_OK


def cmd_sandhi_analyze(args) -> int:
    rules = _rule_table(args)
    candidates = sandhi.analyze_junction(args.merged, args.position, rules)
    for cand in sorted(candidates, key=lambda c: c.pair):
        rule = "plain" if cand.rule is None else (
            f"{cand.rule.left_pattern}+{cand.rule.right_pattern}"
            f"->{cand.rule.output}"
        )
        print(f"{cand.left}\t{cand.right}\t{rule}")
    return EXIT_OK


def cmd_sandhi_validate(args) -> int:
    ok = sandhi.validate_segmentation(args.merged, args.words, _rule_table(args))
    print("valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_DATA


def cmd_make_samples(args) -> int:
    seed = _merged_option(args, "seed", int)
    budget = _merged_option(args, "budget", int)
    sentences = _read_corpus(args.infile)
    if args.mask_mantras:
        sentences = [taskgen.mask_mantras(s) for s in sentences]
    book = tagcodec.read_codebook(args.codebook) if args.codebook else None
    spec = taskgen.TaskSpec(
        tasks=tuple(args.tasks),
        granularity=args.granularity,
        include_reconstructed=not args.no_reconstructed,
        joiner=_merged_option(args, "joiner"),
    )
    header = [
        "# sanskritkit: make-samples",
        f"# tasks: {spec.prefix}",
        f"# granularity: {spec.granularity}",
        f"# include-reconstructed: {spec.include_reconstructed}",
        f"# budget: {budget}",
        f"# seed: {seed}",
    ]
    if book is not None:
        header.append(f"# codebook-version: {book.version}")
    samples = taskgen.generate_samples(sentences, spec, codebook=book, budget=budget)
    with _open_out(args.out) as out:
        count = taskgen.write_samples(samples, out, header=header)
    print(f"wrote {count} samples", file=sys.stderr)
    return EXIT_OK


def cmd_make_ocr_samples(args) -> int:
    noisy_lines = Path(args.noisy).read_text(encoding="utf-8").splitlines()
    clean_lines = Path(args.clean).read_text(encoding="utf-8").splitlines()
    if len(noisy_lines) != len(clean_lines):
        raise ValidationError(
            f"noisy file has {len(noisy_lines)} lines, clean has {len(clean_lines)}"
        )
    samples = [
        taskgen.make_ocr_sample(noisy, clean, max_chars=args.max_chars)
        for noisy, clean in zip(noisy_lines, clean_lines)
    ]
    header = ["# sanskritkit: make-ocr-samples", f"# max-chars: {args.max_chars}"]
    with _open_out(args.out) as out:
        count = taskgen.write_samples(samples, out, header=header)
    print(f"wrote {count} samples", file=sys.stderr)
    return EXIT_OK


def cmd_make_paragraphs(args) -> int:
    budget = _merged_option(args, "budget", int)
    sentences = _read_corpus(args.infile)
    paragraphs = taskgen.build_paragraphs(sentences, budget=budget)
    with _open_out(args.out) as out:
        out.write(f"# budget: {budget}\n# paragraphs: {len(paragraphs)}\n")
        for p in paragraphs:
            out.write(
                f"{p.sentences[0].text_id}\t{len(p)}\t{p.char_len}\t{p.raw_text}\n"
            )
    return EXIT_OK


def cmd_make_splits(args) -> int:
    seed = _merged_option(args, "seed", int)
    dev_size = _merged_option(args, "dev_size", int)
    test_size = _merged_option(args, "test_size", int)
    sentences = _read_corpus(args.infile)
    excluded = set(args.exclude_category or [])

    def exclusions(sentence) -> bool:
        return sentence.category in excluded

    split = conllu.make_splits(
        sentences, dev_size, test_size, exclusions=exclusions, seed=seed
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    conllu.write_conllu(split.train, out_dir / "train.conllu")
    conllu.write_conllu(split.dev, out_dir / "dev.conllu")
    conllu.write_conllu(split.test, out_dir / "test.conllu")
    conllu.write_manifest(split.manifest, out_dir / "manifest.tsv")
    print(
        f"train={len(split.train)} dev={len(split.dev)} test={len(split.test)} "
        f"-> {out_dir}"
    )
    return EXIT_OK


def cmd_dep_linearize(args) -> int:
    sentences = _read_corpus(args.infile)
    book = tagcodec.read_codebook(args.codebook) if args.codebook else None
    config = deplin.DepSampleConfig(
        features=args.features, tag_codebook=book,
        joiner=_merged_option(args, "joiner"),
    )
    pairs = deplin.linearize_corpus(sentences, config)
    header = [f"#format={deplin.FORMAT_TAG}", f"# features: {args.features}"]
    with _open_out(args.out) as out:
        taskgen.write_pairs(pairs, out, header=header)
    print(f"wrote {len(pairs)} dependency samples", file=sys.stderr)
    return EXIT_OK


def cmd_dep_delinearize(args) -> int:
    pairs = taskgen.read_sample_pairs(args.infile)
    config = deplin.DepSampleConfig(
        features=args.features, joiner=_merged_option(args, "joiner")
    )
    sentences = []
    repairs = 0
    for source, target in pairs:
        sentence, report = deplin.delinearize(source, target, config)
        sentences.append(sentence)
        repairs += report.total
    with _open_out(args.out) as out:
        conllu.write_conllu(sentences, out)
    print(f"delinearized {len(sentences)} sentences, {repairs} repairs",
          file=sys.stderr)
    return EXIT_OK


def cmd_predict(args) -> int:
    config = BackendConfig(
        kind=args.backend,
        endpoint=args.endpoint or "",
        oracle_path=args.oracle or "",
        timeout=args.timeout,
        max_in_flight=_merged_option(args, "jobs", int),
    )
    backend = make_backend(config)
    pairs = taskgen.read_sample_pairs(args.infile)
    outcomes = predict_sources([src for src, _ in pairs], backend, config)
    failures = [o for o in outcomes if not o.ok]
    with _open_out(args.out) as out:
        out.write(f"# backend: {config.kind}\n")
        for (source, _), outcome in zip(pairs, outcomes):
            out.write(f"{source}\t{outcome.target if outcome.ok else ''}\n")
    for outcome in failures[:5]:
        print(f"item {outcome.index}: {outcome.error}", file=sys.stderr)
    if failures:
        print(f"{len(failures)}/{len(outcomes)} predictions failed", file=sys.stderr)
        return EXIT_BACKEND
    print(f"predicted {len(outcomes)} samples", file=sys.stderr)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    pred_pairs = taskgen.read_sample_pairs(args.pred)
    gold_pairs = taskgen.read_sample_pairs(args.gold)
    if len(pred_pairs) != len(gold_pairs):
        raise ValidationError(
            f"prediction file has {len(pred_pairs)} samples, gold has {len(gold_pairs)}"
        )
    for i, ((ps, _), (gs, _)) in enumerate(zip(pred_pairs, gold_pairs)):
        if ps != gs:
            raise ValidationError(f"sample {i}: sources differ between pred and gold")
    pred_targets = [t for _, t in pred_pairs]
    gold_targets = [t for _, t in gold_pairs]
    reports = []
    diff = None
    if args.dep:
        config = deplin.DepSampleConfig(joiner=_merged_option(args, "joiner"))
        repairs = 0
        pred_sentences = []
        gold_sentences = []
        for (source, pt), (_, gt) in zip(pred_pairs, gold_pairs):
            sentence, report = deplin.delinearize(source, pt, config)
            repairs += report.total
            pred_sentences.append(sentence)
            gold_sentences.append(deplin.delinearize(source, gt, config)[0])
        uas, las = metrics.uas_las(pred_sentences, gold_sentences, repairs=repairs)
        reports.extend([uas, las])
    else:
        reports.append(metrics.perfect_match(pred_targets, gold_targets))
        cer, wer = metrics.cer_wer(pred_targets, gold_targets)
        reports.extend([cer, wer])
        if args.diff_report:
            diff = metrics.diff_report(
                pred_targets,
                gold_targets,
                tasks=tuple(args.tasks),
                joiner=_merged_option(args, "joiner"),
            )
    if args.json:
        payload = {r.metric: r.to_dict() for r in reports}
        if diff is not None:
            payload["diff"] = {
                "differences": len(diff),
                "counts": dict(diff.counts),
            }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for report in reports:
            print(report)
        if diff is not None:
            print(diff.to_text())
    return EXIT_OK


# ----------------------------------------------------------------- parser


def build_parser() -> CliParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--jobs", type=int, default=None)

    parser = CliParser(prog="sanskritkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common],
                       help="read CoNLL-U, validate, report corpus stats")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", help="write canonical CoNLL-U here")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("translit", parents=[common], help="stream transliteration")
    p.add_argument("--from", dest="source", required=True,
                   choices=["devanagari", "iast", "slp1"])
    p.add_argument("--to", dest="target", required=True,
                   choices=["devanagari", "iast", "slp1"])
    p.add_argument("--in", dest="infile", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--table", default=None, help="master table override")
    p.set_defaults(func=cmd_translit)

    p = sub.add_parser("build-codebook", parents=[common])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--alphabet", default=None)
    p.add_argument("--no-scan", action="store_true",
                   help="skip the reserved-alphabet corpus scan")
    p.set_defaults(func=cmd_build_codebook)

    p = sub.add_parser("encode-tags", parents=[common])
    p.add_argument("--codebook", required=True)
    p.add_argument("--in", dest="infile", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_encode_tags)

    p = sub.add_parser("decode-tags", parents=[common])
    p.add_argument("--codebook", required=True)
    p.add_argument("--in", dest="infile", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decode_tags)

    sandhi_parser = sub.add_parser("sandhi", parents=[common])
    sandhi_sub = sandhi_parser.add_subparsers(dest="sandhi_command", required=True)
    for name, func in [("synth", cmd_sandhi_synth),
                       ("analyze", cmd_sandhi_analyze),
                       ("validate", cmd_sandhi_validate)]:
        sp = sandhi_sub.add_parser(name, parents=[common])
        sp.add_argument("--rules", default=None)
        sp.add_argument("--optional-rules", action="store_true",
                        help="enable #off rules (avagraha)")
        if name == "synth":
            sp.add_argument("words", nargs="+")
        elif name == "analyze":
            sp.add_argument("merged")
            sp.add_argument("position", type=int)
        else:
            sp.add_argument("merged")
            sp.add_argument("words", nargs="+")
        sp.set_defaults(func=func)

    p = sub.add_parser("make-samples", parents=[common])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--tasks", default="S")
    p.add_argument("--granularity", default="sentence",
                   choices=["sentence", "paragraph"])
    p.add_argument("--no-reconstructed", action="store_true",
                   help="drop units containing reconstructed forms")
    p.add_argument("--codebook", default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--joiner", default=None)
    p.add_argument("--mask-mantras", action="store_true")
    p.set_defaults(func=cmd_make_samples)

    p = sub.add_parser("make-ocr-samples", parents=[common],
                       help="pair aligned noisy/clean line files")
    p.add_argument("--noisy", required=True)
    p.add_argument("--clean", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--max-chars", type=int, default=512)
    p.set_defaults(func=cmd_make_ocr_samples)

    p = sub.add_parser("make-paragraphs", parents=[common])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_make_paragraphs)

    p = sub.add_parser("make-splits", parents=[common])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--dev", dest="dev_size", type=int, default=None)
    p.add_argument("--test", dest="test_size", type=int, default=None)
    p.add_argument("--exclude-category", action="append",
                   help="exclude this genre from dev/test (repeatable)")
    p.set_defaults(func=cmd_make_splits)

    dep_parser = sub.add_parser("dep", parents=[common])
    dep_sub = dep_parser.add_subparsers(dest="dep_command", required=True)
    p = dep_sub.add_parser("linearize", parents=[common])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--features", default="none", choices=["none", "all"])
    p.add_argument("--codebook", default=None)
    p.add_argument("--joiner", default=None)
    p.set_defaults(func=cmd_dep_linearize)
    p = dep_sub.add_parser("delinearize", parents=[common])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--features", default="none", choices=["none", "all"])
    p.add_argument("--joiner", default=None)
    p.set_defaults(func=cmd_dep_delinearize)

    p = sub.add_parser("predict", parents=[common])
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--backend", default="echo", choices=["echo", "oracle", "remote"])
    p.add_argument("--endpoint", default=None)
    p.add_argument("--oracle", default=None, help="oracle table (sample TSV)")
    p.add_argument("--timeout", type=float, default=30.0)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common])
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--dep", action="store_true", help="score UAS/LAS")
    p.add_argument("--tasks", default="S")
    p.add_argument("--joiner", default=None)
    p.add_argument("--diff-report", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _load_config_file(args)
        return args.func(args)
    except BackendError as err:
        print(f"backend error: {err}", file=sys.stderr)
        return EXIT_BACKEND
    except (
        ValidationError,
        tagcodec.UnknownTagError,
        tagcodec.UnknownCodeError,
        OSError,
        json.JSONDecodeError,
    ) as err:
        print(f"data error: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
