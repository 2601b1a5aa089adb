"""tossup: an incremental quizbowl engine.

Questions are revealed word by word; a guesser ranks candidate answers at
every position, a buzzer decides when the top guess is trustworthy enough
to interrupt, and the evaluation stack scores the pair against recorded
human gameplay, simulated matches, and live opponents.
"""

from .corpus import (
    CorpusError,
    CorpusStore,
    GameplayRecord,
    QuestionRecord,
    dedup_questions,
    filter_gameplay,
    load_gameplay,
    load_questions,
    sentence_spans,
)
from .answer_map import (
    MappingRules,
    MatchResult,
    TitleSet,
    expand_answer,
    map_corpus,
    match_answer,
)
from .folds import FoldConfig, FoldError, assign_all, assign_fold, fold_draw
from .guesser import (
    DanConfig,
    Guess,
    GuessStream,
    IrGuesser,
    LinearConfig,
    build_ir_index,
    guess_stream,
    ir_guess,
    tokenize,
    train_dan,
    train_linear,
)
from .buzzer import (
    MlpBuzzer,
    MlpBuzzerConfig,
    OracleLabels,
    ThresholdBuzzer,
    extract_features,
    first_buzz_position,
    oracle_labels,
    train_mlp_buzzer,
    tune_threshold,
)
from .metrics import (
    WinProbCurve,
    buzzer_confusion,
    cubic_win_curve,
    empirical_win_curve,
    expected_wins,
    position_accuracy,
)
from .model_io import load_model, save_model
from .simulate import (
    MatchOutcome,
    ScoreRules,
    aggregate_score,
    resolve_vs_record,
    simulate_machine_match,
    simulate_vs_record,
)

__version__ = "0.1.0"
