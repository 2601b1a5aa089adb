"""Command-line pipeline: ingest -> map-answers -> assign-folds ->
train-guesser -> make-streams -> train-buzzer -> evaluate / simulate / serve.

Every subcommand reads and writes the plain-file formats owned by the
library modules (JSONL corpora, TSV title tables, JSON rule files, binary
model containers), so any stage can be re-run or swapped in isolation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .. import corpus as corpus_mod
from ..answer_map import MappingRules, TitleSet, map_corpus
from ..buzzer import (
    MlpBuzzerConfig,
    ThresholdBuzzer,
    first_buzz_position,
    train_mlp_buzzer,
    tune_threshold,
)
from ..folds import FoldConfig, FoldError, assign_all, write_fold_stats
from ..guesser import (
    DanConfig,
    IrGuesser,
    LinearConfig,
    full_question_examples,
    guess_stream,
    read_streams,
    sentence_examples,
    train_dan,
    train_linear,
    write_streams,
)
from ..metrics import (
    PAPER_CUBIC,
    WinProbCurve,
    curve_from_gameplay,
    evaluate_buzzer,
    evaluate_streams,
    write_buzzer_report_csv,
    write_report_csv,
    write_report_json,
)
from ..model_io import load_model, save_model
from ..simulate import (
    ScoreRules,
    aggregate_score,
    breakdown_by_possibility,
    classify_possible,
    resolve_vs_record,
    write_match_report,
)

logger = logging.getLogger(__name__)

UNIFORM_CURVE = WinProbCurve(kind="cubic", coefficients=(1.0, -1.0, 0.0, 0.0))


def _add_common_curve_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--curve", choices=["empirical", "cubic"], default="empirical",
                        help="win-probability curve: empirical step curve from gameplay "
                             "(falls back to a linear 1-t opponent when no gameplay is "
                             "given) or the fixed clamped cubic")
    parser.add_argument("--curve-gameplay", type=Path, default=None,
                        help="gameplay JSONL used to fit the empirical curve")
    parser.add_argument("--questions", type=Path, default=None,
                        help="questions JSONL (for word counts and sentence marks)")


def _resolve_curve(args, questions) -> WinProbCurve:
    if args.curve == "cubic":
        return WinProbCurve(kind="cubic", coefficients=PAPER_CUBIC)
    if args.curve_gameplay:
        plays = corpus_mod.load_gameplay(args.curve_gameplay)
        word_counts = {
            q.proto_id: q.word_count for q in questions if q.proto_id
        } if questions else None
        return curve_from_gameplay(plays, word_counts)
    logger.warning("no gameplay supplied; using the uniform 1-t opponent curve")
    return UNIFORM_CURVE


def _load_questions_arg(path: Path | None):
    return corpus_mod.load_questions(path) if path else []


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_ingest(args) -> int:
    questions = corpus_mod.load_questions(args.questions)
    if args.tournament_aliases:
        aliases = json.loads(Path(args.tournament_aliases).read_text(encoding="utf-8"))
        questions = corpus_mod.apply_tournament_aliases(questions, aliases)
    questions = corpus_mod.dedup_questions(questions)
    corpus_mod.write_questions(questions, args.out_questions)
    print(f"questions: {len(questions)} after dedup -> {args.out_questions}")
    if args.gameplay:
        plays = corpus_mod.load_gameplay(args.gameplay)
        filtered = corpus_mod.filter_gameplay(plays)
        corpus_mod.write_gameplay(filtered, args.out_gameplay)
        print(f"gameplay: {len(plays)} loaded, {len(filtered)} after filtering "
              f"-> {args.out_gameplay}")
    return 0


def cmd_map_answers(args) -> int:
    questions = corpus_mod.load_questions(args.questions)
    wiki = TitleSet.load(args.titles, args.redirects)
    train_rules = MappingRules.load(args.train_rules, pool="train") if args.train_rules else MappingRules(pool="train")
    test_rules = MappingRules.load(args.test_rules, pool="test") if args.test_rules else MappingRules(pool="test")
    mapped, report = map_corpus(questions, wiki, train_rules, test_rules)
    corpus_mod.write_questions(mapped, args.out)
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n", encoding="utf-8")
    print(f"mapped {report.matched}/{report.total} answers "
          f"({json.dumps(report.method_counts, sort_keys=True)})")
    return 0


def cmd_assign_folds(args) -> int:
    questions = corpus_mod.load_questions(args.questions)
    cfg = FoldConfig.load(args.fold_config) if args.fold_config else FoldConfig(seed=args.seed)
    plays = corpus_mod.load_gameplay(args.gameplay) if args.gameplay else []
    store = corpus_mod.CorpusStore.build(questions, corpus_mod.filter_gameplay(plays))
    with_gameplay = {qid for qid in store.questions if store.has_gameplay(qid)}
    folded, stats = assign_all(questions, with_gameplay, cfg)
    corpus_mod.write_questions(folded, args.out)
    if args.stats:
        write_fold_stats(stats, args.stats)
    print("fold counts: " + json.dumps(stats, sort_keys=True))
    return 0


def cmd_train_guesser(args) -> int:
    questions = corpus_mod.load_questions(args.questions)
    train_questions = [q for q in questions if q.fold == args.fold and q.page]
    if not train_questions:
        print(f"error: no mapped questions in fold {args.fold!r}", file=sys.stderr)
        return 1
    if args.kind == "ir":
        model = IrGuesser.train(full_question_examples(train_questions))
        save_model(model, args.out)
    elif args.kind == "linear":
        config = LinearConfig(epochs=args.epochs, lr=args.lr, seed=args.seed,
                              n_buckets=args.buckets, batch_size=args.batch_size)
        model = train_linear(sentence_examples(train_questions), config)
        save_model(model, args.out, config=vars(config))
    else:
        config = DanConfig(epochs=args.epochs, lr=args.lr, seed=args.seed,
                           embedding_dim=args.embedding_dim, hidden_dim=args.hidden_dim,
                           n_layers=args.layers, batch_size=args.batch_size)
        model = train_dan(sentence_examples(train_questions), config)
        save_model(model, args.out, config=vars(config))
    print(f"trained {args.kind} guesser on {len(train_questions)} questions -> {args.out}")
    return 0


def cmd_make_streams(args) -> int:
    questions = corpus_mod.load_questions(args.questions)
    selected = [q for q in questions if (args.fold in ("all", q.fold)) and q.page]
    if not selected:
        print("error: no questions selected for streaming", file=sys.stderr)
        return 1
    model = load_model(args.model)
    streams = [guess_stream(model, q, k=args.k, step_size=args.step) for q in selected]
    write_streams(streams, args.out)
    print(f"wrote {len(streams)} guess streams -> {args.out}")
    return 0


def cmd_train_buzzer(args) -> int:
    streams = read_streams(args.streams)
    if args.kind == "mlp":
        config = MlpBuzzerConfig(hidden_dim=args.hidden, epochs=args.epochs,
                                 lr=args.lr, seed=args.seed)
        model = train_mlp_buzzer(streams, config)
        save_model(model, args.out, config=vars(config))
    else:
        questions = _load_questions_arg(args.questions)
        curve = _resolve_curve(args, questions)
        threshold = tune_threshold(streams, curve)
        model = ThresholdBuzzer(threshold=threshold)
        save_model(model, args.out)
        print(f"tuned threshold: {threshold:.2f}")
    print(f"trained {args.kind} buzzer on {len(streams)} streams -> {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    streams = read_streams(args.streams)
    questions = _load_questions_arg(args.questions)
    curve = _resolve_curve(args, questions)
    sentence_marks = {q.qanta_id: q.first_sentence_word_count() for q in questions}
    report = evaluate_streams(streams, sentence_marks, curve, model_name=args.model_name)
    write_report_json([report], args.out)
    if args.csv:
        write_report_csv([report], args.csv)
    if args.curve_csv:
        curve.to_csv(args.curve_csv)
    print(f"start={report.start_accuracy:.3f} end={report.end_accuracy:.3f} "
          f"ew_stable={report.ew_stable:.3f} ew_first_correct={report.ew_first_correct:.3f}")
    print(f"report -> {args.out}")
    return 0


def cmd_simulate(args) -> int:
    if not args.questions:
        print("error: simulate requires --questions to link gameplay records",
              file=sys.stderr)
        return 2
    streams = {s.qanta_id: s for s in read_streams(args.streams)}
    buzzer = load_model(args.buzzer)
    questions = corpus_mod.load_questions(args.questions)
    plays = corpus_mod.load_gameplay(args.gameplay)
    store = corpus_mod.CorpusStore.build(questions, plays)
    outcomes = []
    possible_flags = []
    for qanta_id, stream in streams.items():
        machine_buzz = first_buzz_position(buzzer, stream)
        for record in store.gameplay_by_question.get(qanta_id, ()):
            if record.position > stream.word_count:
                continue
            outcomes.append(resolve_vs_record(stream, machine_buzz, record, ScoreRules()))
            possible_flags.append(classify_possible(stream, record))
    if not outcomes:
        print("error: no (stream, gameplay) pairs to simulate", file=sys.stderr)
        return 1
    summary = aggregate_score(outcomes)
    write_match_report(
        outcomes, summary, args.out,
        breakdown=breakdown_by_possibility(outcomes, possible_flags),
    )
    if args.confusion:
        from ..buzzer import decisions as buzzer_decisions
        from ..buzzer import oracle_labels
        from ..metrics import buzzer_confusion

        stream_list = list(streams.values())
        confusion = buzzer_confusion(
            stream_list,
            {s.qanta_id: buzzer_decisions(buzzer, s) for s in stream_list},
            {s.qanta_id: oracle_labels(s) for s in stream_list},
            buckets=args.confusion_buckets,
        )
        Path(args.confusion).write_text(
            json.dumps(confusion.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
    if args.buzzer_csv:
        curve = _resolve_curve(args, questions)
        report = evaluate_buzzer(
            list(streams.values()), buzzer, curve,
            model_name=getattr(buzzer, "kind", "buzzer"), score=summary.mean_points,
        )
        write_buzzer_report_csv([report], args.buzzer_csv)
    print(f"simulated {summary.n_questions} question-record pairs: "
          f"mean points {summary.mean_points:.3f}, win rate {summary.win_rate:.3f}")
    print(f"report -> {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .app import ServiceState, create_app
    from .session import JudgeConfig, LiveAgent

    questions = [q for q in corpus_mod.load_questions(args.questions) if q.page]
    if args.fold != "all":
        questions = [q for q in questions if q.fold == args.fold]
    guesser = load_model(args.model)
    buzzer = load_model(args.buzzer)
    aliases = {}
    if args.aliases:
        raw = json.loads(Path(args.aliases).read_text(encoding="utf-8"))
        aliases = {page: tuple(names) for page, names in raw.items()}
    packets = {}
    if args.packets:
        packets = json.loads(Path(args.packets).read_text(encoding="utf-8"))
    state = ServiceState(
        questions=questions,
        agent_factory=lambda: LiveAgent(guesser, buzzer, k=5),
        judge=JudgeConfig(aliases=aliases),
        packets=packets,
        default_tick_ms=args.tick_ms,
    )
    app = create_app(state, frontend_dir=args.frontend)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tossup", description=__doc__)
    parser.add_argument("--seed", type=int, default=0, help="global random seed")
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON file of default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="clean, dedup, and filter raw corpora")
    p.add_argument("--questions", type=Path, required=True)
    p.add_argument("--gameplay", type=Path, default=None)
    p.add_argument("--out-questions", type=Path, required=True)
    p.add_argument("--out-gameplay", type=Path, default=Path("gameplay.filtered.jsonl"))
    p.add_argument("--tournament-aliases", type=Path, default=None)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("map-answers", help="map raw answers to canonical titles")
    p.add_argument("--questions", type=Path, required=True)
    p.add_argument("--titles", type=Path, required=True)
    p.add_argument("--redirects", type=Path, default=None)
    p.add_argument("--train-rules", type=Path, default=None)
    p.add_argument("--test-rules", type=Path, default=None)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--report", type=Path, default=None)
    p.set_defaults(func=cmd_map_answers)

    p = sub.add_parser("assign-folds", help="assign guess/buzz train/dev/test folds")
    p.add_argument("--questions", type=Path, required=True)
    p.add_argument("--gameplay", type=Path, default=None)
    p.add_argument("--fold-config", type=Path, default=None)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--stats", type=Path, default=None)
    p.set_defaults(func=cmd_assign_folds)

    p = sub.add_parser("train-guesser", help="train a guesser model")
    p.add_argument("--questions", type=Path, required=True)
    p.add_argument("--kind", choices=["ir", "linear", "dan"], required=True)
    p.add_argument("--fold", default="guesstrain")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--buckets", type=int, default=2**20)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--embedding-dim", type=int, default=300)
    p.add_argument("--hidden-dim", type=int, default=300)
    p.add_argument("--layers", type=int, default=2)
    p.set_defaults(func=cmd_train_guesser)

    p = sub.add_parser("make-streams", help="record per-position guesses")
    p.add_argument("--questions", type=Path, required=True)
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--fold", default="buzztrain")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_make_streams)

    p = sub.add_parser("train-buzzer", help="train or tune a buzzer")
    p.add_argument("--streams", type=Path, required=True)
    p.add_argument("--kind", choices=["mlp", "threshold"], required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--hidden", type=int, default=100)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--lr", type=float, default=1e-3)
    _add_common_curve_flags(p)
    p.set_defaults(func=cmd_train_buzzer)

    p = sub.add_parser("evaluate", help="score guess streams")
    p.add_argument("--streams", type=Path, required=True)
    p.add_argument("--out", type=Path, default=Path("eval_report.json"))
    p.add_argument("--csv", type=Path, default=None)
    p.add_argument("--curve-csv", type=Path, default=None,
                   help="export the opponent curve as (t, pi) rows")
    p.add_argument("--model-name", default="guesser")
    _add_common_curve_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("simulate", help="replay recorded human plays against a machine")
    p.add_argument("--streams", type=Path, required=True)
    p.add_argument("--buzzer", type=Path, required=True)
    p.add_argument("--gameplay", type=Path, required=True)
    p.add_argument("--out", type=Path, default=Path("match_report.json"))
    p.add_argument("--buzzer-csv", type=Path, default=None,
                   help="also write buzzer accuracy/EW/score as CSV")
    p.add_argument("--confusion", type=Path, default=None,
                   help="write buzzer-vs-oracle confusion counts as JSON")
    p.add_argument("--confusion-buckets", type=int, default=10)
    _add_common_curve_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="host live human-vs-machine matches")
    p.add_argument("--questions", type=Path, required=True)
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--buzzer", type=Path, required=True)
    p.add_argument("--fold", default="all")
    p.add_argument("--aliases", type=Path, default=None)
    p.add_argument("--packets", type=Path, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--tick-ms", type=int, default=400)
    p.add_argument("--frontend", type=Path, default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def _apply_config_defaults(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """--config JSON supplies values for flags the user did not pass."""
    if "--config" not in argv:
        return argv
    index = argv.index("--config")
    config_path = Path(argv[index + 1])
    defaults = json.loads(config_path.read_text(encoding="utf-8"))
    extra: list[str] = []
    for key, value in defaults.items():
        flag = "--" + key.replace("_", "-")
        if flag not in argv:
            extra.extend([flag, str(value)])
    return argv + extra


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_defaults(parser, argv)
    except (OSError, json.JSONDecodeError, IndexError) as exc:
        print(f"error: cannot read --config: {exc}", file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    # lr default differs per model kind
    if getattr(args, "lr", None) is None and hasattr(args, "kind"):
        args.lr = 0.5 if args.kind == "linear" else 1e-3
    try:
        return args.func(args)
    except (corpus_mod.CorpusError, FoldError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
