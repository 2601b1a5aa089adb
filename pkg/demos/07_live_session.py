"""The live-match state machine, driven directly (no network needed).

The HTTP/WebSocket host (``tossup serve``) wraps exactly this object; every
tick reveals a word, runs the machine agent on the new prefix, and either
interrupts or waits.  Driving it by hand shows the full event protocol.

Run:  python3 demos/07_live_session.py
"""

from _toy_data import build_questions, split_folds

from tossup.buzzer import MlpBuzzerConfig, train_mlp_buzzer
from tossup.guesser import IrGuesser, full_question_examples, guess_stream
from tossup.service.session import JudgeConfig, LiveAgent, MatchSession, judge_answer

questions = build_questions(per_answer=5)
train_questions, buzz_questions = split_folds(questions)
guesser = IrGuesser.train(full_question_examples(train_questions))
streams = [guess_stream(guesser, q, k=5, step_size=1) for q in buzz_questions]
buzzer = train_mlp_buzzer(streams, MlpBuzzerConfig(epochs=20, seed=0))

session = MatchSession(
    session_id="demo",
    questions=buzz_questions[:2],
    agent=LiveAgent(guesser, buzzer, k=5),
    judge=JudgeConfig(aliases={"Johannes_Kepler": ("Kepler",)}),
    grace_ticks=2,
)

print("question 1: let the machine play alone")
while session.state == "revealing":
    for event in session.step({"type": "tick"}):
        if event["type"] == "word":
            print(event["token"], end=" ", flush=True)
        elif event["type"] == "machine_buzz":
            print(f"\n>> machine buzzes at word {event['position']}: {event['guess']}")
        elif event["type"] == "result":
            print(f">> result: machine {event['machine_points']:+d}, "
                  f"answer was {event['correct_answer']}")

print("\nquestion 2: a human interrupts at word 5")
session.step({"type": "next_question"})
for _ in range(5):
    for event in session.step({"type": "tick"}):
        if event["type"] == "word":
            print(event["token"], end=" ", flush=True)
session.step({"type": "human_buzz", "position": 5})
gold = session.current_question.page or ""
print(f"\n>> human answers {gold!r}"
      f" (judged {'correct' if judge_answer(gold, gold) else 'wrong'})")
for event in session.step({"type": "human_answer", "text": gold}):
    if event["type"] == "result":
        print(f">> result: human {event['human_points']:+d}")

print(f"\nfinal scoreboard: {session.scoreboard()}")
print(f"input events logged for replay: {len(session.event_log)}")
