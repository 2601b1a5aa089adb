"""Train the three guesser families and watch guesses sharpen word by word.

Run:  python3 demos/03_guessers.py
"""

from _toy_data import build_questions, split_folds

from tossup.guesser import (
    DanConfig,
    IrGuesser,
    LinearConfig,
    full_question_examples,
    guess_stream,
    sentence_examples,
    train_dan,
    train_linear,
)

questions = build_questions()
train_questions, held_out = split_folds(questions)

# The retrieval guesser concatenates every training question that shares an
# answer into one document and scores prefixes against those documents.
ir = IrGuesser.train(full_question_examples(train_questions))

# The trained models learn from sentence-level examples instead of whole
# questions, which keeps early-clue sentences from being drowned out.
sentences = sentence_examples(train_questions)
linear = train_linear(sentences, LinearConfig(n_buckets=2**14, epochs=25, seed=0))
dan = train_dan(sentences, DanConfig(
    embedding_dim=48, hidden_dim=48, n_layers=2, dropout=0.1,
    batch_size=16, epochs=80, lr=5e-3, seed=0,
))

question = held_out[0]
print(f"question {question.qanta_id} (gold: {question.page}):\n  {question.text}\n")
for name, model in (("bm25", ir), ("linear", linear), ("dan", dan)):
    stream = guess_stream(model, question, k=3, step_size=6)
    print(f"{name} guesses as the question is revealed:")
    for position, row in zip(stream.positions, stream.guesses):
        shown = ", ".join(f"{g.answer} ({g.probability:.2f})" for g in row[:3])
        print(f"  word {position:3d}: {shown or '(no evidence yet)'}")
    print()

for name, model in (("bm25", ir), ("linear", linear), ("dan", dan)):
    hits = 0
    for q in held_out:
        guesses = model.guess(q.text, 1)
        hits += bool(guesses) and guesses[0].answer == q.page
    print(f"{name}: end-of-question accuracy on held-out questions "
          f"{hits}/{len(held_out)}")
