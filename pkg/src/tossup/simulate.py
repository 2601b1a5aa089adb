"""Game simulation: machine vs recorded human plays, and machine vs machine.

Replaying a human record recreates a live face-off in all but one case:
when the machine buzzes wrong first we never learn what the human would
have said, so their answer is assumed correct (skilled players almost
always get there by the end).  Ties at the same word go to the human: the
machine must answer strictly earlier to win the question.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .buzzer import BuzzerModel, first_buzz_position
from .corpus import GameplayRecord
from .guesser.base import GuessStream


@dataclass(frozen=True)
class ScoreRules:
    correct_points: int = 10
    wrong_penalty: int = -5
    bounce_points: int = 10  # opponent converts after the other side misses


@dataclass(frozen=True)
class QuestionOutcome:
    qanta_id: int
    machine_points: int
    opponent_points: int
    machine_buzz_position: int | None
    opponent_buzz_position: int | None
    resolution: str


@dataclass
class MatchOutcome:
    outcomes: list[QuestionOutcome] = field(default_factory=list)

    @property
    def machine_total(self) -> int:
        return sum(outcome.machine_points for outcome in self.outcomes)

    @property
    def opponent_total(self) -> int:
        return sum(outcome.opponent_points for outcome in self.outcomes)

    def to_dict(self) -> dict:
        return {
            "machine_total": self.machine_total,
            "opponent_total": self.opponent_total,
            "questions": [
                {
                    "qanta_id": o.qanta_id,
                    "machine_points": o.machine_points,
                    "opponent_points": o.opponent_points,
                    "machine_buzz_position": o.machine_buzz_position,
                    "opponent_buzz_position": o.opponent_buzz_position,
                    "resolution": o.resolution,
                }
                for o in self.outcomes
            ],
        }


def _correct_at(stream: GuessStream, word: int) -> bool:
    index = stream.index_at_word(word)
    return index is not None and stream.top_answer(index) == stream.answer


def _final_guess_correct(stream: GuessStream) -> bool:
    return _correct_at(stream, stream.word_count)


def resolve_vs_record(
    stream: GuessStream,
    machine_buzz: int | None,
    record: GameplayRecord,
    rules: ScoreRules = ScoreRules(),
) -> QuestionOutcome:
    """Resolve one question given the machine's chosen buzz word (or None).

    Resolution order: a machine buzz strictly before the human's acts
    first; otherwise the human record plays out, and on a wrong human
    answer the machine responds at its own later buzz or, failing that,
    with its end-of-question guess.
    """
    if record.position > stream.word_count:
        raise ValueError(
            f"record buzzes at word {record.position} but the question has "
            f"{stream.word_count} words"
        )
    qid = stream.qanta_id
    if machine_buzz is not None and machine_buzz < record.position:
        if _correct_at(stream, machine_buzz):
            return QuestionOutcome(qid, rules.correct_points, 0, machine_buzz, None,
                                   "machine_correct_first")
        # Wrong early buzz: we never see the human's answer, assume it lands.
        return QuestionOutcome(qid, rules.wrong_penalty, rules.bounce_points,
                               machine_buzz, record.position, "machine_wrong_assumed_human")
    if record.result:
        return QuestionOutcome(qid, 0, rules.correct_points, machine_buzz,
                               record.position, "human_correct_first")
    # Human missed; machine answers at its decided buzz or at the end.
    answer_word = machine_buzz if machine_buzz is not None else stream.word_count
    if _correct_at(stream, answer_word):
        return QuestionOutcome(qid, rules.correct_points, rules.wrong_penalty,
                               machine_buzz, record.position, "human_wrong_machine_converts")
    return QuestionOutcome(qid, 0, rules.wrong_penalty, machine_buzz,
                           record.position, "human_wrong_machine_misses")


def simulate_vs_record(
    stream: GuessStream,
    buzzer: BuzzerModel,
    record: GameplayRecord,
    rules: ScoreRules = ScoreRules(),
) -> QuestionOutcome:
    return resolve_vs_record(stream, first_buzz_position(buzzer, stream), record, rules)


def classify_possible(stream: GuessStream, record: GameplayRecord) -> bool:
    """Could ANY buzzer have won this question against this record?

    Winnable means the guesser's top answer is correct somewhere the
    machine is still allowed to act: strictly before the human's position
    when their answer lands, or anywhere at all when it misses.  On
    impossible questions the buzzer can only limit the damage.
    """
    cutoff = record.position if record.result else stream.word_count + 1
    correct = stream.correctness()
    return any(
        is_correct and stream.positions[index] < cutoff
        for index, is_correct in enumerate(correct)
    )


def breakdown_by_possibility(
    outcomes: Sequence[QuestionOutcome],
    possible_flags: Sequence[bool],
) -> dict:
    """Split simulation outcomes into winnable and unwinnable populations."""
    if len(outcomes) != len(possible_flags):
        raise ValueError("outcomes and possibility flags must align")
    buckets: dict[str, dict] = {}
    for wanted, name in ((True, "possible"), (False, "impossible")):
        subset = [o for o, flag in zip(outcomes, possible_flags) if flag == wanted]
        entry = {"n": len(subset)}
        if subset:
            entry["machine_won"] = sum(
                o.machine_points > o.opponent_points for o in subset
            )
            entry["mean_points"] = float(np.mean([o.machine_points for o in subset]))
            resolutions: dict[str, int] = {}
            for outcome in subset:
                resolutions[outcome.resolution] = resolutions.get(outcome.resolution, 0) + 1
            entry["resolutions"] = resolutions
        buckets[name] = entry
    return buckets


def simulate_machine_match(
    streams_a: Mapping[int, GuessStream],
    buzzer_a: BuzzerModel,
    streams_b: Mapping[int, GuessStream],
    buzzer_b: BuzzerModel,
    packet: Sequence[int],
    rules: ScoreRules = ScoreRules(),
    seed: int = 0,
) -> MatchOutcome:
    """Round-robin style head-to-head on an ordered packet of questions.

    The earlier buzz acts first; exact ties are broken by a seeded coin
    flip.  A wrong first buzz costs the penalty and hands the other side a
    free answer with its end-of-question guess.
    """
    rng = np.random.default_rng(seed)
    match = MatchOutcome()
    for qanta_id in packet:
        if qanta_id not in streams_a or qanta_id not in streams_b:
            raise ValueError(f"both sides need a stream for question {qanta_id}")
        stream_a = streams_a[qanta_id]
        stream_b = streams_b[qanta_id]
        buzz_a = first_buzz_position(buzzer_a, stream_a)
        buzz_b = first_buzz_position(buzzer_b, stream_b)
        if buzz_a is None and buzz_b is None:
            match.outcomes.append(
                QuestionOutcome(qanta_id, 0, 0, None, None, "dead")
            )
            continue
        if buzz_a is not None and (buzz_b is None or buzz_a < buzz_b):
            a_first = True
        elif buzz_b is not None and (buzz_a is None or buzz_b < buzz_a):
            a_first = False
        else:
            a_first = bool(rng.integers(0, 2) == 0)
        first_stream, first_buzz = (stream_a, buzz_a) if a_first else (stream_b, buzz_b)
        other_stream = stream_b if a_first else stream_a
        if _correct_at(first_stream, first_buzz):
            points = (rules.correct_points, 0) if a_first else (0, rules.correct_points)
            resolution = "a_correct" if a_first else "b_correct"
        else:
            bounce = rules.bounce_points if _final_guess_correct(other_stream) else 0
            if a_first:
                points = (rules.wrong_penalty, bounce)
                resolution = "a_wrong_b_bounce" if bounce else "a_wrong_b_miss"
            else:
                points = (bounce, rules.wrong_penalty)
                resolution = "b_wrong_a_bounce" if bounce else "b_wrong_a_miss"
        match.outcomes.append(
            QuestionOutcome(qanta_id, points[0], points[1], buzz_a, buzz_b, resolution)
        )
    return match


@dataclass
class ScoreSummary:
    mean_points: float
    win_rate: float
    n_questions: int

    def to_dict(self) -> dict:
        return {
            "mean_points": self.mean_points,
            "win_rate": self.win_rate,
            "n_questions": self.n_questions,
        }


def aggregate_score(outcomes: Sequence[QuestionOutcome]) -> ScoreSummary:
    """Mean machine points per simulated question, plus per-question win rate."""
    if not outcomes:
        raise ValueError("no outcomes to aggregate")
    points = [outcome.machine_points for outcome in outcomes]
    wins = [outcome.machine_points > outcome.opponent_points for outcome in outcomes]
    return ScoreSummary(
        mean_points=float(np.mean(points)),
        win_rate=float(np.mean(wins)),
        n_questions=len(outcomes),
    )


def write_match_report(
    outcomes: Sequence[QuestionOutcome],
    summary: ScoreSummary,
    path: str | Path,
    breakdown: dict | None = None,
) -> None:
    payload = {
        "summary": summary.to_dict(),
        "questions": MatchOutcome(outcomes=list(outcomes)).to_dict()["questions"],
    }
    if breakdown is not None:
        payload["possible_breakdown"] = breakdown
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
