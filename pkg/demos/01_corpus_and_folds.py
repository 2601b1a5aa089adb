"""Corpus hygiene and fold assignment, end to end on a tiny inline dataset.

Run:  python3 demos/01_corpus_and_folds.py
"""

from tossup.corpus import (
    CorpusStore,
    GameplayRecord,
    QuestionRecord,
    dedup_questions,
    filter_gameplay,
    sentence_spans,
)
from tossup.folds import FoldConfig, assign_all

# --- sentence segmentation -------------------------------------------------
text = ("This composer wrote a famous opera. Mr. Schikaneder sang in its "
        "premiere. For ten points, name this composer of The Magic Flute.")
print("sentence spans:")
for start, end in sentence_spans(text):
    print(f"  [{start:3d},{end:3d})  {text[start:end]!r}")

# --- dedup: the same question shows up from two sources --------------------
def question(qanta_id, body, year=2012, championship=False, proto_id=None):
    return QuestionRecord(
        qanta_id=qanta_id, text=body, raw_answer="Wolfgang Mozart",
        page="Wolfgang_Amadeus_Mozart", tournament="Spring Open", year=year,
        championship=championship, proto_id=proto_id,
        sentence_spans=tuple(sentence_spans(body)),
    )

copies = [
    question(11, "Name this composer of The Magic Flute."),
    question(45, "Name this composer  of the magic flute. "),  # same text, sloppier
    question(46, "Name this composer of Don Giovanni."),
]
print("\nafter dedup within (tournament, year):",
      [q.qanta_id for q in dedup_questions(copies)])

# --- gameplay filtering ----------------------------------------------------
# Keep only each player's first play per question, then drop casual players
# with fewer than twenty distinct questions.
plays = []
for n in range(25):
    plays.append(GameplayRecord(
        date=f"2015-04-{n % 28 + 1:02d}T10:00:00+00:00", uid="devoted",
        qid=f"proto-{n}", position=6, guess="mozart", result=n % 3 != 0,
        question_text="ten words of question text appear right here okay done",
    ))
plays.append(GameplayRecord(  # second play on an already-played question
    date="2015-05-01T10:00:00+00:00", uid="devoted", qid="proto-0",
    position=2, guess="mozart", result=True,
    question_text="ten words of question text appear right here okay done",
))
plays.append(GameplayRecord(  # casual player: filtered out entirely
    date="2015-04-02T10:00:00+00:00", uid="casual", qid="proto-0",
    position=9, guess="salieri", result=False,
    question_text="ten words of question text appear right here okay done",
))
kept = filter_gameplay(plays)
print(f"\ngameplay: {len(plays)} raw plays -> {len(kept)} after filtering "
      f"(players: {sorted(set(r.uid for r in kept))})")

# --- fold assignment ---------------------------------------------------------
# Championship questions from the configured years become dev/test material;
# the rest split 80/20 into guess- and buzz-training, buzz only with gameplay.
corpus = [
    question(i, f"Training question number {i} about some topic.", year=2010)
    for i in range(100, 160)
] + [
    question(i, f"Championship question {i}.", year=2016, championship=True)
    for i in range(200, 206)
]
store = CorpusStore.build(corpus, kept)
folded, stats = assign_all(corpus, {q.qanta_id for q in corpus[:30]}, FoldConfig(seed=7))
print("\nfold counts:", {fold: n for fold, n in stats.items() if n})
