"""Replaying human gameplay records and machine-vs-machine packets.

Run:  python3 demos/06_simulated_matches.py
"""

from _toy_data import build_questions, split_folds

from tossup.buzzer import MlpBuzzerConfig, train_mlp_buzzer
from tossup.corpus import GameplayRecord
from tossup.guesser import IrGuesser, full_question_examples, guess_stream
from tossup.simulate import (
    ScoreRules,
    aggregate_score,
    breakdown_by_possibility,
    classify_possible,
    simulate_machine_match,
    simulate_vs_record,
)

questions = build_questions(per_answer=5)
train_questions, buzz_questions = split_folds(questions)
guesser = IrGuesser.train(full_question_examples(train_questions))
streams = {q.qanta_id: guess_stream(guesser, q, k=5, step_size=1) for q in buzz_questions}
buzzer = train_mlp_buzzer(list(streams.values()), MlpBuzzerConfig(epochs=20, seed=0))

# --- against a recorded human play -----------------------------------------
# The human buzzed at 60% of the question and was right; the machine wins
# only by being correct strictly earlier.
outcomes = []
possible_flags = []
for question in buzz_questions:
    stream = streams[question.qanta_id]
    human_word = max(1, int(stream.word_count * 0.6))
    record = GameplayRecord(
        date="2015-03-03T12:00:00+00:00", uid="human-07",
        qid=question.proto_id or "", position=human_word,
        guess=question.raw_answer, result=True, question_text=question.text,
    )
    outcome = simulate_vs_record(stream, buzzer, record, ScoreRules())
    outcomes.append(outcome)
    possible_flags.append(classify_possible(stream, record))
    print(f"q{question.qanta_id}: machine {outcome.machine_points:+d} "
          f"human {outcome.opponent_points:+d}  ({outcome.resolution})")

summary = aggregate_score(outcomes)
print(f"\nmean machine points {summary.mean_points:+.2f}, "
      f"win rate {summary.win_rate:.2f} over {summary.n_questions} questions")

# Winnable vs unwinnable: on "impossible" questions the guesser is never
# right in time, so the best any buzzer can do there is limit the damage.
breakdown = breakdown_by_possibility(outcomes, possible_flags)
for bucket, entry in breakdown.items():
    print(f"{bucket}: {entry}")

# --- machine vs machine ------------------------------------------------------
# The same agent plays itself: totals differ only through coin-flipped ties.
packet = [q.qanta_id for q in buzz_questions]
match = simulate_machine_match(streams, buzzer, streams, buzzer, packet,
                               ScoreRules(), seed=42)
print(f"\nself-play packet of {len(packet)}: "
      f"A {match.machine_total} - B {match.opponent_total}")
