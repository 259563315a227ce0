#!/usr/bin/env python3
"""
iOCR CLI
Generate, corrupt and tally ballot corpora; benchmark baselines; run experiments
"""
import sys
import shutil
import logging
import argparse
from pathlib import Path
from typing import List, Optional

project_root = Path(__file__).parent.parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from config.config import IOCRConfig, RunConfig  # noqa: E402

from src.core.baselines.bench import format_table, run_benchmark  # noqa: E402
from src.core.corpus import (  # noqa: E402
    DICTIONARY_FILENAME,
    MANIFEST_FILENAME,
    load_accuracy_report,
    load_dictionary,
    load_manifest,
    read_ballot_dir,
    write_accuracy_report,
    write_confusion_log,
    write_corpus,
    write_tally_report,
    write_text,
)
from src.core.errors import IOCRError, StatisticsError  # noqa: E402
from src.core.experiment_runner import ExperimentRunner  # noqa: E402
from src.core.experiments import VARIANTS, ExperimentContext  # noqa: E402
from src.core.lexicon import (  # noqa: E402
    assign_candidate_ids,
    build_contest_index,
    serialize_dictionary,
    validate_lexicon,
)
from src.core.matcher import MatcherConfig  # noqa: E402
from src.core.pipeline import raw_lines, resolve_corpus, unreadable_ballots  # noqa: E402
from src.core.stats import one_way_anova, paired_t_test  # noqa: E402
from src.core.synth import (  # noqa: E402
    BallotSpec,
    NoiseModel,
    add_similar_pair,
    default_contests,
    generate_ballots,
    inject_noise,
    similar_pair_ballots,
)
from src.core.tally import ScoringConfig, report, score, score_raw  # noqa: E402

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MISMATCH = 3


class IOCRArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with EXIT_USAGE instead of argparse's 2"""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"Error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def setup_logging(debug: bool = False):
    """Configure logging; an already configured root logger is left alone"""
    if logging.getLogger().handlers:
        return
    log_level = logging.DEBUG if debug else getattr(logging, IOCRConfig.LOG_LEVEL.upper(), logging.INFO)

    logging.basicConfig(
        level=log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.StreamHandler(sys.stderr),
            logging.FileHandler(IOCRConfig.get_log_dir() / "iocr.log")
        ]
    )


def resolve_matcher(args) -> MatcherConfig:
    """Defaults, then preferences.json, then command-line flags"""
    settings = IOCRConfig.get_matcher_settings()
    if getattr(args, "no_position_keyed", False):
        settings["position_keyed"] = False
    if getattr(args, "case_fold", False):
        settings["case_fold"] = True
    if getattr(args, "collapse_whitespace", False):
        settings["collapse_whitespace"] = True
    return MatcherConfig.from_dict(settings)


def _arguments(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "command", "debug")}


def cmd_generate(args) -> int:
    """Handle 'generate' command"""
    contests = default_contests(args.seed)
    if args.similar_pair:
        contests = add_similar_pair(contests)
    spec = BallotSpec(
        contests=contests,
        unique_ballots=args.unique,
        duplicates=args.duplicates,
        writein_count=args.writeins,
        with_ids=args.ids,
        seed=args.seed,
        d_min=args.d_min,
    )
    ballots, lexicon, truth = generate_ballots(spec)
    if args.similar_pair:
        pair_ballots, pair_truth = similar_pair_ballots(lexicon, seed=args.seed)
        ballots = ballots + pair_ballots
        truth = truth.merged(pair_truth)

    write_corpus(args.out, ballots, truth, lexicon)
    RunConfig("generate", seed=args.seed, arguments=_arguments(args)).write(args.out)
    print(f"Generated {len(ballots)} ballots in {args.out}")
    return EXIT_OK


def cmd_corrupt(args) -> int:
    """Handle 'corrupt' command"""
    if args.rate is not None:
        model = NoiseModel(line_error_rate=args.rate, seed=args.seed)
    else:
        model = NoiseModel.for_quality(args.quality, seed=args.seed)

    texts = read_ballot_dir(args.input)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    changed = total = 0
    for ballot_id, text in texts.items():
        if text is None:
            logger.warning(f"Skipping undecodable ballot {ballot_id}")
            continue
        noisy = inject_noise(text, model, stream_key=ballot_id)
        write_text(out_dir / f"{ballot_id}.txt", noisy)
        pairs = list(zip(text.split("\n"), noisy.split("\n")))
        total += sum(1 for a, _ in pairs if a.strip())
        changed += sum(1 for a, b in pairs if a != b)

    for name in (MANIFEST_FILENAME, DICTIONARY_FILENAME):
        source = Path(args.input) / name
        if source.is_file():
            shutil.copyfile(source, out_dir / name)

    RunConfig("corrupt", seed=args.seed, arguments=_arguments(args)).write(out_dir)
    print(f"Corrupted {changed} of {total} lines (rate {model.line_error_rate}) into {out_dir}")
    return EXIT_OK


def cmd_tally(args) -> int:
    """Handle 'tally' command"""
    ballots_dir = Path(args.ballots_dir)
    dictionary = Path(args.dictionary) if args.dictionary else ballots_dir / DICTIONARY_FILENAME
    lexicon = load_dictionary(dictionary)
    texts = read_ballot_dir(ballots_dir)
    cfg = resolve_matcher(args)

    tally, decisions = resolve_corpus(texts, build_contest_index(lexicon), cfg,
                                      args.workers, lexicon.fingerprint)
    titles = lexicon.contest_titles()

    out_dir = Path(args.out) if args.out else None
    if out_dir:
        text = write_tally_report(out_dir, tally, titles)
        write_confusion_log(out_dir / "confusion.tsv",
                            (d for ballot_id in sorted(decisions) for d in decisions[ballot_id]))
        RunConfig("tally", arguments=_arguments(args), matcher=cfg.to_dict()).write(out_dir)
    else:
        text = report(tally, titles)
    print(text, end="")

    manifest = Path(args.manifest) if args.manifest else ballots_dir / MANIFEST_FILENAME
    if args.manifest or manifest.is_file():
        truth = load_manifest(manifest)
        iocr = score(decisions, truth, ScoringConfig(writein_tolerance=args.writein_tolerance))
        raw = score_raw(raw_lines(texts, cfg), truth)
        print(f"Line accuracy: iOCR {iocr.line_accuracy:.6f}, raw OCR {raw.line_accuracy:.6f}")
        if out_dir:
            write_accuracy_report(out_dir, iocr, "accuracy")
            write_accuracy_report(out_dir, raw, "raw_accuracy")

    unreadable = unreadable_ballots(decisions)
    if args.max_unreadable is not None and len(unreadable) > args.max_unreadable:
        print(f"Error: {len(unreadable)} unreadable ballots exceed the limit of {args.max_unreadable}",
              file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_bench(args) -> int:
    """Handle 'bench' command"""
    rows = run_benchmark(size=args.size, queries=args.queries, max_distance=args.max_distance,
                         seed=args.seed, norvig_queries=args.norvig_queries)
    table = format_table(rows)
    print(table, end="")
    if args.out:
        write_text(Path(args.out) / "bench.tsv", table)
        RunConfig("bench", seed=args.seed, arguments=_arguments(args)).write(args.out)
    return EXIT_OK


def cmd_stats(args) -> int:
    """Handle 'stats' command"""
    reports = [load_accuracy_report(path) for path in args.reports]

    if args.test == "anova":
        if len(reports) < 2:
            print("Error: ANOVA needs at least two accuracy reports", file=sys.stderr)
            return EXIT_USAGE
        result = one_way_anova([r.per_ballot_accuracy for r in reports])
        print(f"One-way ANOVA: F({result.df_between},{result.df_within}) = {result.f_statistic:.4f}, "
              f"p = {result.p_value:.3g}")
        return EXIT_OK

    if len(reports) != 2:
        print("Error: paired t-test needs exactly two accuracy reports", file=sys.stderr)
        return EXIT_USAGE
    a, b = reports
    if a.ballot_ids != b.ballot_ids:
        raise StatisticsError("reports do not cover the same ballots in the same order")
    result = paired_t_test(a.per_ballot_accuracy, b.per_ballot_accuracy)
    print(f"Paired t-test: t({result.df}) = {result.t_statistic:.4f}, p = {result.p_value:.3g}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    """Handle 'experiment' command"""
    variants = VARIANTS
    if args.no_ids:
        variants = ("noids",)
    elif args.ids_only:
        variants = ("ids",)
    qualities = (args.quality,) if args.quality is not None else (100, 50, 20)
    out_dir = Path(args.out) if args.out else Path(f"experiment-{args.n}")

    context = ExperimentContext(
        out_dir=out_dir,
        seed=args.seed,
        matcher=resolve_matcher(args),
        workers=args.workers,
        variants=variants,
        qualities=qualities,
        first_char_errors=args.first_char_errors,
        word_baselines=not args.no_word_baselines,
    )
    RunConfig("experiment", seed=args.seed, arguments=_arguments(args),
              matcher=context.matcher.to_dict()).write(out_dir)

    result = ExperimentRunner(context).run(args.n)
    if not result['success']:
        print(f"Error: {result['output']}", file=sys.stderr)
        return EXIT_DATA
    print(result['output'], end="")
    return EXIT_OK if result['accepted'] else EXIT_MISMATCH


def cmd_lexicon(args) -> int:
    """Handle 'lexicon' command"""
    lexicon = load_dictionary(args.dictionary)

    if args.lexicon_command == "validate":
        report = validate_lexicon(lexicon, args.d_min)
        print(report.to_tsv(), end="")
        return EXIT_OK

    with_ids = assign_candidate_ids(lexicon, d_min=args.d_min or IOCRConfig.DEFAULT_D_MIN, seed=args.seed)
    write_text(Path(args.output), serialize_dictionary(with_ids))
    print(f"Wrote {len(with_ids.entries)} entries with candidate IDs to {args.output}")
    return EXIT_OK


def _parse_setting(key: str, text: str):
    """Convert a command-line value to the type of the setting's default"""
    default = IOCRConfig.MATCHER_DEFAULTS[key]
    if isinstance(default, bool):
        lowered = text.lower()
        if lowered in ("true", "yes", "on", "1"):
            return True
        if lowered in ("false", "no", "off", "0"):
            return False
        raise ValueError(f"expected true or false, got '{text}'")
    return type(default)(text)


def cmd_config(args) -> int:
    """Handle 'config' command"""
    if args.key not in IOCRConfig.MATCHER_DEFAULTS:
        known = ", ".join(sorted(IOCRConfig.MATCHER_DEFAULTS))
        print(f"Error: unknown matcher setting '{args.key}' (known: {known})", file=sys.stderr)
        return EXIT_USAGE
    try:
        value = _parse_setting(args.key, args.value)
    except ValueError as e:
        print(f"Error: invalid value for {args.key}: {e}", file=sys.stderr)
        return EXIT_USAGE

    # Out-of-range values raise here, before anything is written
    MatcherConfig.from_dict({**IOCRConfig.get_matcher_settings(), args.key: value})
    IOCRConfig.set_matcher_setting(args.key, value)
    print(f"Saved {args.key} = {value}")
    return EXIT_OK


def cmd_status(args) -> int:
    """Handle 'status' command"""
    status = IOCRConfig.get_status()

    print("iOCR Status")
    print("=" * 40)
    print(f"Version:        {status['version']}")
    print(f"Config dir:     {status['config_dir']}")
    print(f"Cache dir:      {status['cache_dir']}")
    print(f"Log level:      {status['log_level']}")
    print(f"Default seed:   {status['default_seed']}")
    for key, value in sorted(status['matcher'].items()):
        print(f"  {key:<20} {value}")
    return EXIT_OK


def _add_matcher_flags(parser):
    parser.add_argument("--no-position-keyed", action="store_true",
                        help="Scan every contest instead of routing line i to contest i")
    parser.add_argument("--case-fold", action="store_true", help="Compare lines case-insensitively")
    parser.add_argument("--collapse-whitespace", action="store_true",
                        help="Collapse runs of whitespace before matching")


def build_parser() -> argparse.ArgumentParser:
    parser = IOCRArgumentParser(
        prog="iocr",
        description="iOCR - ballot OCR post-processing with a confusion fail-safe",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  iocr generate --out corpus --ids
  iocr corrupt corpus noisy --quality 20
  iocr tally noisy --out results
  iocr experiment 2 --out exp2
  iocr lexicon validate corpus/dictionary.txt
  iocr config case_fold true

For more help: iocr <command> --help
"""
    )
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")
    seed = IOCRConfig.DEFAULT_SEED
    d_min = IOCRConfig.DEFAULT_D_MIN

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # generate command
    gen_parser = subparsers.add_parser("generate", help="Generate a synthetic ballot corpus")
    gen_parser.add_argument("--out", required=True, help="Output corpus directory")
    gen_parser.add_argument("--seed", type=int, default=seed, help=f"Random seed (default {seed})")
    gen_parser.add_argument("--unique", type=int, default=25, help="Unique ballots (default 25)")
    gen_parser.add_argument("--duplicates", type=int, default=20, help="Copies of each ballot (default 20)")
    gen_parser.add_argument("--writeins", type=int, default=5, help="Unique ballots with a write-in (default 5)")
    ids_group = gen_parser.add_mutually_exclusive_group()
    ids_group.add_argument("--ids", dest="ids", action="store_true", help="Give candidates digit IDs")
    ids_group.add_argument("--no-ids", dest="ids", action="store_false", help="No candidate IDs (default)")
    gen_parser.set_defaults(ids=False)
    gen_parser.add_argument("--d-min", type=int, default=d_min, help=f"ID separation (default {d_min})")
    gen_parser.add_argument("--similar-pair", action="store_true",
                            help="Add the Mark Day / Mark May candidates and their ballots")
    gen_parser.set_defaults(func=cmd_generate)

    # corrupt command
    cor_parser = subparsers.add_parser("corrupt", help="Apply the OCR noise channel to a corpus")
    cor_parser.add_argument("input", help="Input corpus directory")
    cor_parser.add_argument("output", help="Output corpus directory")
    level = cor_parser.add_mutually_exclusive_group(required=True)
    level.add_argument("--quality", type=int, choices=[100, 50, 20], help="Calibrated image quality")
    level.add_argument("--rate", type=float, help="Explicit line error rate")
    cor_parser.add_argument("--seed", type=int, default=seed, help=f"Random seed (default {seed})")
    cor_parser.set_defaults(func=cmd_corrupt)

    # tally command
    tally_parser = subparsers.add_parser("tally", help="Resolve and tally a directory of OCR ballots")
    tally_parser.add_argument("ballots_dir", help="Directory of <ballot_id>.txt files")
    tally_parser.add_argument("--dictionary", help="Dictionary file (default BALLOTS_DIR/dictionary.txt)")
    tally_parser.add_argument("--manifest", help="Ground-truth manifest for scoring")
    tally_parser.add_argument("--out", help="Directory for tally, confusion log and accuracy reports")
    tally_parser.add_argument("--workers", type=int, default=1, help="Worker processes (default 1)")
    tally_parser.add_argument("--max-unreadable", type=int, help="Fail when more ballots are unreadable")
    tally_parser.add_argument("--writein-tolerance", type=int, default=0,
                              help="Edits a scored write-in may differ by (default 0)")
    _add_matcher_flags(tally_parser)
    tally_parser.set_defaults(func=cmd_tally)

    # bench command
    bench_parser = subparsers.add_parser("bench", help="Time SymSpell, brute force and Norvig lookups")
    bench_parser.add_argument("--size", type=int, default=10000, help="Dictionary size (default 10000)")
    bench_parser.add_argument("--queries", type=int, default=500, help="Queries (default 500)")
    bench_parser.add_argument("--max-distance", type=int, default=2, help="Edit distance (default 2)")
    bench_parser.add_argument("--seed", type=int, default=seed, help=f"Random seed (default {seed})")
    bench_parser.add_argument("--norvig-queries", type=int, default=50, help="Norvig queries (default 50)")
    bench_parser.add_argument("--out", help="Directory for bench.tsv")
    bench_parser.set_defaults(func=cmd_bench)

    # stats command
    stats_parser = subparsers.add_parser("stats", help="Statistical tests over accuracy reports")
    stats_parser.add_argument("test", choices=["anova", "paired"], help="Test to run")
    stats_parser.add_argument("reports", nargs="+", help="accuracy.json files")
    stats_parser.set_defaults(func=cmd_stats)

    # experiment command
    exp_parser = subparsers.add_parser("experiment", help="Reproduce one of the four experiments")
    exp_parser.add_argument("n", type=int, choices=[1, 2, 3, 4], help="Experiment number")
    exp_parser.add_argument("--seed", type=int, default=seed, help=f"Random seed (default {seed})")
    exp_parser.add_argument("--out", help="Output directory (default experiment-N)")
    exp_parser.add_argument("--quality", type=int, choices=[100, 50, 20],
                            help="Single quality level (experiment 2)")
    variant = exp_parser.add_mutually_exclusive_group()
    variant.add_argument("--no-ids", action="store_true", help="Only the variant without candidate IDs")
    variant.add_argument("--ids-only", action="store_true", help="Only the variant with candidate IDs")
    exp_parser.add_argument("--first-char-errors", action="store_true",
                            help="Misread the first character of every line (experiment 1)")
    exp_parser.add_argument("--workers", type=int, default=1, help="Worker processes (default 1)")
    exp_parser.add_argument("--no-word-baselines", action="store_true",
                            help="Skip the word-level spell-correction baselines (experiment 2)")
    _add_matcher_flags(exp_parser)
    exp_parser.set_defaults(func=cmd_experiment)

    # lexicon command
    lex_parser = subparsers.add_parser("lexicon", help="Validate a dictionary or give it candidate IDs")
    lex_sub = lex_parser.add_subparsers(dest="lexicon_command", required=True)
    validate_parser = lex_sub.add_parser("validate", help="Print per-contest separation as TSV")
    validate_parser.add_argument("dictionary", help="Dictionary file")
    validate_parser.add_argument("--d-min", type=int, help="Flag contests closer than d-min + 1")
    assign_parser = lex_sub.add_parser("assign-ids", help="Write a copy with candidate IDs")
    assign_parser.add_argument("dictionary", help="Dictionary file without IDs")
    assign_parser.add_argument("output", help="Output dictionary file")
    assign_parser.add_argument("--d-min", type=int, default=d_min, help=f"ID separation (default {d_min})")
    assign_parser.add_argument("--seed", type=int, default=seed, help=f"Random seed (default {seed})")
    lex_parser.set_defaults(func=cmd_lexicon)

    # config command
    config_parser = subparsers.add_parser("config", help="Save a matcher preference")
    config_parser.add_argument("key", help="Matcher setting, e.g. case_fold")
    config_parser.add_argument("value", help="New value, e.g. true or 0.7")
    config_parser.set_defaults(func=cmd_config)

    # status command
    status_parser = subparsers.add_parser("status", help="Show configuration")
    status_parser.set_defaults(func=cmd_status)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    if args.command is None:
        parser.print_help()
        return EXIT_OK

    setup_logging(args.debug)

    try:
        return args.func(args)
    except IOCRError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
