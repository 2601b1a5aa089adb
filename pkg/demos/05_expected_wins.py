"""Win-probability curves and the expected-wins metric.

Run:  python3 demos/05_expected_wins.py
"""

from tossup.guesser.base import Guess, GuessStream
from tossup.metrics import (
    PAPER_CUBIC,
    WinProbCurve,
    cubic_win_curve,
    empirical_win_curve,
    expected_wins,
)

# An empirical curve from (normalized buzz position, correct) human plays:
# pi(t) is the share of opponents who have NOT answered correctly by t.
plays = [(0.30, True), (0.45, True), (0.50, False), (0.62, True),
         (0.80, True), (1.00, False), (1.00, True)]
curve = empirical_win_curve(plays)
print("empirical opponent curve:")
for t in (0.0, 0.25, 0.5, 0.75, 1.0):
    print(f"  pi({t:.2f}) = {curve(t):.3f}")

# The fixed cubic is available behind configuration; it clamps to [0, 1]
# and goes to zero quickly, so it stays opt-in rather than the default.
print("\nclamped cubic curve:")
for t in (0.0, 0.05, 0.25, 0.75):
    print(f"  pi({t:.2f}) = {cubic_win_curve(t, PAPER_CUBIC):.4f}")


def stream(qanta_id, pattern):
    rows = tuple(
        (Guess(answer="GOLD" if correct else f"no_{i}", score=0.5, probability=0.5),)
        for i, correct in enumerate(pattern)
    )
    return GuessStream(qanta_id=qanta_id, answer="GOLD", step_size=1,
                       word_count=len(pattern), k=1,
                       positions=tuple(range(1, len(pattern) + 1)), guesses=rows)


# Question 1 stabilizes halfway; question 2 flickers correct once early but
# ends wrong; question 3 is never right.
streams = [
    stream(1, [False, True, True, True]),
    stream(2, [True, False, False, False]),
    stream(3, [False, False, False, False]),
]
linear = WinProbCurve(kind="cubic", coefficients=(1.0, -1.0, 0.0, 0.0))
for variant in ("stable", "first_correct"):
    ew = expected_wins(streams, "oracle", linear, variant=variant)
    print(f"\noracle expected wins ({variant}): {ew:.4f}")
print("\nThe first-correct variant credits question 2's lucky early guess;")
print("the stable variant does not, which discourages flickery models.")

# Any concrete buzzer is scored the same way by feeding its buzz positions.
buzzes = {1: 3, 2: 1, 3: None}
print(f"\na buzzer that buzzes at {buzzes}:"
      f" stable EW = {expected_wins(streams, buzzes, linear, variant='stable'):.4f}")
