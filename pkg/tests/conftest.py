"""Shared builders for synthetic questions, streams, and scripted buzzers."""

from __future__ import annotations

from dataclasses import dataclass

import pytest

from tossup.corpus import GameplayRecord, QuestionRecord
from tossup.guesser.base import Guess, GuessStream


def make_question(qanta_id=1, text="First clue here. Second clue there.", answer="Thing",
                  page="Thing", fold="guesstrain", tournament="Regular Open", year=2010,
                  championship=False, proto_id=None, compute_spans=True):
    from tossup.corpus import sentence_spans

    return QuestionRecord(
        qanta_id=qanta_id,
        text=text,
        raw_answer=answer,
        page=page,
        fold=fold,
        tournament=tournament,
        year=year,
        championship=championship,
        proto_id=proto_id,
        sentence_spans=tuple(sentence_spans(text)) if compute_spans else (),
    )


def guess_row(top_answer: str, top_prob: float, k: int = 5, second_prob: float | None = None):
    """One top-k row: the named top guess plus filler answers with tiny probs."""
    remaining = max(0.0, 1.0 - top_prob)
    row = [Guess(answer=top_answer, score=float(top_prob), probability=float(top_prob))]
    prob = second_prob if second_prob is not None else remaining / (k + 1)
    for i in range(1, k):
        prob = min(prob, top_prob)  # keep the row sorted
        row.append(Guess(answer=f"filler_{i}", score=float(prob), probability=float(prob)))
        prob = prob / 2.0
    return tuple(row)


def stream_from_rows(rows, qanta_id=1, answer="GOLD", k=5, step_size=1):
    """Build a stream whose positions are 1..len(rows)."""
    return GuessStream(
        qanta_id=qanta_id,
        answer=answer,
        step_size=step_size,
        word_count=len(rows),
        k=k,
        positions=tuple(range(1, len(rows) + 1)),
        guesses=tuple(tuple(row) for row in rows),
    )


def stream_from_correctness(pattern, qanta_id=1, probs=None, k=1, word_count=None):
    """Stream whose top-guess correctness follows ``pattern`` exactly."""
    rows = []
    for index, correct in enumerate(pattern):
        top = "GOLD" if correct else f"wrong_{index}"
        prob = probs[index] if probs is not None else 0.5
        row = [Guess(answer=top, score=prob, probability=prob)]
        for j in range(1, k):
            row.append(Guess(answer=f"filler_{j}", score=0.0, probability=0.0))
        rows.append(tuple(row))
    n = len(rows)
    positions = tuple(range(1, n + 1))
    return GuessStream(
        qanta_id=qanta_id,
        answer="GOLD",
        step_size=1,
        word_count=word_count or n,
        k=k,
        positions=positions if (word_count or n) == n else tuple(
            list(range(1, n)) + [word_count]
        ),
        guesses=tuple(rows),
    )


@dataclass
class FixedBuzzer:
    """Scripted buzzer: buzzes at one fixed word index (or never)."""

    buzz_word: int | None
    kind: str = "fixed"

    def decide(self, stream: GuessStream, index: int) -> bool:
        return self.buzz_word is not None and stream.positions[index] >= self.buzz_word


@dataclass
class NeverBuzzer:
    kind: str = "never"

    def decide(self, stream, index) -> bool:
        return False


def make_play(qid="p1", uid="u1", position=5, result=True, guess="thing",
              date="Thu Oct 29 2015 08:55:37 GMT-0400 (EDT)",
              question_text="one two three four five six seven eight nine ten"):
    return GameplayRecord(
        date=date, uid=uid, qid=qid, position=position, guess=guess,
        result=result, question_text=question_text,
    )
