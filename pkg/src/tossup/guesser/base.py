"""Shared guesser types: tokens, guesses, and per-position guess streams."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on anything that is not a letter or digit."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class Guess:
    """One ranked answer: model score plus a probability in [0, 1]."""

    answer: str
    score: float
    probability: float


class Guesser(Protocol):
    """Anything that can rank answers for a question prefix."""

    def guess(self, text: str, k: int) -> list[Guess]: ...


@dataclass(frozen=True)
class GuessStream:
    """Top-k guesses recorded at each reveal position of one question.

    ``positions[j]`` is the 1-based word index of the j-th reveal and
    ``guesses[j]`` the top-k list computed from exactly that prefix, so an
    entry never depends on words revealed later (prefix property).
    """

    qanta_id: int
    answer: str
    step_size: int
    word_count: int
    k: int
    positions: tuple[int, ...]
    guesses: tuple[tuple[Guess, ...], ...]

    def __post_init__(self):
        if len(self.positions) != len(self.guesses):
            raise ValueError("positions and guesses must align")
        if any(b <= a for a, b in zip(self.positions, self.positions[1:])):
            raise ValueError("positions must be strictly increasing")
        if self.positions and self.positions[-1] != self.word_count:
            raise ValueError("final position must cover the full question")

    def __len__(self) -> int:
        return len(self.positions)

    def top_answer(self, index: int) -> str | None:
        row = self.guesses[index]
        return row[0].answer if row else None

    def top_probability(self, index: int) -> float:
        row = self.guesses[index]
        return row[0].probability if row else 0.0

    def correctness(self) -> list[bool]:
        """Whether the top guess matches the gold answer at each position."""
        return [self.top_answer(i) == self.answer for i in range(len(self))]

    def index_at_word(self, word: int) -> int | None:
        """Latest recorded position at or before ``word``, if any."""
        best = None
        for i, pos in enumerate(self.positions):
            if pos <= word:
                best = i
            else:
                break
        return best


def reveal_positions(word_count: int, step_size: int) -> list[int]:
    positions = list(range(step_size, word_count + 1, step_size))
    if not positions or positions[-1] != word_count:
        positions.append(word_count)
    return positions


def guess_stream(
    model: Guesser,
    question,
    k: int,
    step_size: int = 1,
) -> GuessStream:
    """Run a guesser over progressively longer prefixes of one question.

    The prefix at position p is the first p whitespace words of the
    question text; the final position always covers the full text even when
    the word count is not a multiple of step_size.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if step_size < 1:
        raise ValueError("step_size must be >= 1")
    words = question.text.split()
    positions = reveal_positions(len(words), step_size)
    rows = []
    for pos in positions:
        prefix = " ".join(words[:pos])
        rows.append(tuple(model.guess(prefix, k)))
    return GuessStream(
        qanta_id=question.qanta_id,
        answer=question.page or "",
        step_size=step_size,
        word_count=len(words),
        k=k,
        positions=tuple(positions),
        guesses=tuple(rows),
    )


def sentence_examples(questions: Iterable) -> list[tuple[str, str]]:
    """One (sentence text, page) training example per question sentence."""
    examples: list[tuple[str, str]] = []
    for question in questions:
        if not question.page:
            continue
        spans = question.sentence_spans or ((0, len(question.text)),)
        for start, end in spans:
            sentence = question.text[start:end].strip()
            if sentence:
                examples.append((sentence, question.page))
    return examples


def full_question_examples(questions: Iterable) -> list[tuple[str, str]]:
    return [(q.text, q.page) for q in questions if q.page]


# ---------------------------------------------------------------------------
# stream serialization
# ---------------------------------------------------------------------------


def write_streams(streams: Iterable[GuessStream], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for stream in streams:
            obj = {
                "qanta_id": stream.qanta_id,
                "answer": stream.answer,
                "step_size": stream.step_size,
                "word_count": stream.word_count,
                "positions": [
                    [
                        {"answer": g.answer, "score": g.score, "prob": g.probability}
                        for g in row
                    ]
                    for row in stream.guesses
                ],
            }
            handle.write(json.dumps(obj, ensure_ascii=False) + "\n")


def read_streams(path: str | Path, k: int | None = None) -> list[GuessStream]:
    streams: list[GuessStream] = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            obj = json.loads(line)
            step = int(obj["step_size"])
            word_count = int(obj["word_count"])
            rows = tuple(
                tuple(
                    Guess(answer=g["answer"], score=float(g["score"]), probability=float(g["prob"]))
                    for g in row
                )
                for row in obj["positions"]
            )
            width = k or max((len(row) for row in rows), default=1)
            streams.append(
                GuessStream(
                    qanta_id=int(obj["qanta_id"]),
                    answer=obj["answer"],
                    step_size=step,
                    word_count=word_count,
                    k=width,
                    positions=tuple(reveal_positions(word_count, step)),
                    guesses=rows,
                )
            )
    return streams
