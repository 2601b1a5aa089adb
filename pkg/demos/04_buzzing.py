"""From guess streams to buzz decisions: features, oracle, threshold, MLP.

Run:  python3 demos/04_buzzing.py
"""

from _toy_data import build_questions, split_folds

from tossup.buzzer import (
    FEATURE_NAMES,
    MlpBuzzerConfig,
    ThresholdBuzzer,
    extract_features,
    first_buzz_position,
    oracle_labels,
    train_mlp_buzzer,
    tune_threshold,
)
from tossup.guesser import IrGuesser, full_question_examples, guess_stream
from tossup.metrics import WinProbCurve

questions = build_questions(per_answer=5)
train_questions, buzz_questions = split_folds(questions)

# The buzzer must calibrate a guesser it never trained with, so its streams
# come from questions the guesser did not see.
guesser = IrGuesser.train(full_question_examples(train_questions))
streams = [guess_stream(guesser, q, k=5, step_size=1) for q in buzz_questions]

stream = streams[0]
labels = oracle_labels(stream)
print(f"question {stream.qanta_id}: stable oracle position = {labels.stable_position} "
      f"of {len(stream)} positions")

features = extract_features(stream, position=max(1, (labels.stable_position or 1)))
print("feature vector at the stable position:")
for name, value in zip(FEATURE_NAMES, features):
    print(f"  {name:>15s} = {value: .4f}")

# A perfectly-informed opponent curve is not available for toy data; a
# linear pi(t) = 1 - t stands in: buzzing later is steadily worth less.
curve = WinProbCurve(kind="cubic", coefficients=(1.0, -1.0, 0.0, 0.0))

threshold = tune_threshold(streams, curve)
print(f"\ntuned probability threshold: {threshold:.2f}")

mlp = train_mlp_buzzer(streams, MlpBuzzerConfig(epochs=20, seed=0))
print("\nper-question first buzz (word index):")
print(f"  {'question':>8s} {'oracle':>7s} {'thresh':>7s} {'mlp':>5s}")
for stream in streams:
    stable = oracle_labels(stream).stable_position
    t_buzz = first_buzz_position(ThresholdBuzzer(threshold), stream)
    m_buzz = first_buzz_position(mlp, stream)
    print(f"  {stream.qanta_id:>8d} {str(stable):>7s} {str(t_buzz):>7s} {str(m_buzz):>5s}")
