"""Live match sessions: word-by-word reveal, buzzes, judging, scoring.

A session is a strictly serial state machine.  Every input event (tick,
human_buzz, human_answer, next_question) is appended to an event log and
produces zero or more output events, so feeding a captured log into a
fresh session with the same artifacts reproduces the match exactly.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..buzzer import BuzzerModel
from ..guesser.base import Guess, Guesser, GuessStream
from ..simulate import ScoreRules

STATES = ("revealing", "awaiting_answer", "resolved", "finished")

_ARTICLES = ("the ", "a ", "an ")


@dataclass(frozen=True)
class JudgeConfig:
    """Alias table consulted when a normalized answer misses the title."""

    aliases: Mapping[str, tuple[str, ...]] = field(default_factory=dict)


def normalize_answer(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    ascii_ish = "".join(c for c in decomposed if not unicodedata.combining(c))
    lowered = ascii_ish.lower().replace("_", " ")
    lowered = re.sub(r"\([^)]*\)\s*$", "", lowered).strip()
    lowered = re.sub(r"[^0-9a-z\s]", " ", lowered)
    lowered = re.sub(r"\s+", " ", lowered).strip()
    for article in _ARTICLES:
        if lowered.startswith(article):
            lowered = lowered[len(article):]
            break
    return lowered


def judge_answer(given: str, canonical: str, cfg: JudgeConfig = JudgeConfig()) -> bool:
    """Deterministic string judging: normalized equality or a listed alias."""
    target = normalize_answer(canonical)
    attempt = normalize_answer(given)
    if not attempt:
        return False
    if attempt == target:
        return True
    return any(attempt == normalize_answer(alias) for alias in cfg.aliases.get(canonical, ()))


class LiveAgent:
    """Incremental guesser+buzzer pair evaluated once per revealed word."""

    def __init__(self, guesser: Guesser, buzzer: BuzzerModel, k: int = 5):
        if k < 5:
            raise ValueError("live agent needs k >= 5 for buzzer features")
        self.guesser = guesser
        self.buzzer = buzzer
        self.k = k
        self._rows: list[tuple[Guess, ...]] = []
        self._qanta_id = 0

    def start_question(self, qanta_id: int) -> None:
        self._rows = []
        self._qanta_id = qanta_id

    def observe(self, prefix_text: str) -> tuple[list[Guess], bool]:
        """Feed one more revealed word; returns (top guesses, wants to buzz)."""
        self._rows.append(tuple(self.guesser.guess(prefix_text, self.k)))
        n = len(self._rows)
        stream = GuessStream(
            qanta_id=self._qanta_id,
            answer="",
            step_size=1,
            word_count=n,
            k=self.k,
            positions=tuple(range(1, n + 1)),
            guesses=tuple(self._rows),
        )
        wants_buzz = bool(self._rows[-1]) and self.buzzer.decide(stream, n - 1)
        return list(self._rows[-1]), wants_buzz

    def top5(self) -> list[Guess]:
        return list(self._rows[-1][:5]) if self._rows else []


class MatchSession:
    """One human-vs-machine match over an ordered packet of questions."""

    def __init__(
        self,
        session_id: str,
        questions: Sequence,
        agent: LiveAgent | None,
        judge: JudgeConfig = JudgeConfig(),
        rules: ScoreRules = ScoreRules(),
        tick_ms: int = 400,
        grace_ticks: int = 5,
    ):
        if not questions:
            raise ValueError("a match needs at least one question")
        self.session_id = session_id
        self.questions = list(questions)
        self.agent = agent
        self.judge = judge
        self.rules = rules
        self.tick_ms = tick_ms
        self.grace_ticks = grace_ticks
        self.state = "revealing"
        self.question_index = 0
        self.human_score = 0
        self.machine_score = 0
        self.event_log: list[dict] = []
        self._reset_question()

    # -- helpers -------------------------------------------------------------

    def _reset_question(self) -> None:
        self.cursor = 0
        self.machine_locked = False
        self.human_locked = False
        self.human_buzzed = False
        self.human_buzz_position: int | None = None
        self.machine_buzzed = False
        self.q_machine_points = 0
        self.q_human_points = 0
        self.grace_remaining = self.grace_ticks
        if self.agent is not None:
            self.agent.start_question(self.current_question.qanta_id)

    @property
    def current_question(self):
        return self.questions[self.question_index]

    @property
    def _words(self) -> list[str]:
        return self.current_question.text.split()

    def scoreboard(self) -> dict:
        return {
            "session_id": self.session_id,
            "state": self.state,
            "question_index": self.question_index,
            "question_count": len(self.questions),
            "human_score": self.human_score,
            "machine_score": self.machine_score,
        }

    def _top5_payload(self) -> list[dict]:
        if self.agent is None:
            return []
        return [
            {"answer": g.answer, "prob": g.probability} for g in self.agent.top5()
        ]

    def _error(self, message: str) -> list[dict]:
        return [{"type": "error", "message": message}]

    def _score_event(self, note: str | None = None) -> dict:
        event = {
            "type": "score",
            "human_total": self.human_score,
            "machine_total": self.machine_score,
            "question_index": self.question_index,
        }
        if note:
            event["note"] = note
        return event

    def _resolve(self, resolution: str) -> list[dict]:
        self.state = "resolved"
        result = {
            "type": "result",
            "correct_answer": self.current_question.page or self.current_question.raw_answer,
            "machine_points": self.q_machine_points,
            "human_points": self.q_human_points,
            "top5": self._top5_payload(),
            "resolution": resolution,
        }
        return [result, self._score_event()]

    # -- event dispatch --------------------------------------------------------

    def step(self, event: dict) -> list[dict]:
        """Apply one input event; returns the events to emit, in order."""
        self.event_log.append(dict(event))
        kind = event.get("type")
        if self.state == "finished":
            return self._error("session is finished")
        if kind == "tick":
            return self._on_tick()
        if kind == "human_buzz":
            return self._on_human_buzz(event)
        if kind == "human_answer":
            return self._on_human_answer(event)
        if kind == "next_question":
            return self._on_next()
        return self._error(f"unknown event type {kind!r}")

    def _on_tick(self) -> list[dict]:
        if self.state != "revealing":
            return []  # ticks while frozen are benign
        words = self._words
        if self.cursor < len(words):
            self.cursor += 1
            token = words[self.cursor - 1]
            emitted = [{"type": "word", "index": self.cursor, "token": token}]
            if self.agent is not None:
                prefix = " ".join(words[: self.cursor])
                _, wants_buzz = self.agent.observe(prefix)
                if wants_buzz and not self.machine_locked and not self.machine_buzzed:
                    emitted.extend(self._machine_buzz())
            return emitted
        if self.grace_remaining > 0:
            self.grace_remaining -= 1
            return []
        return self._finish_question()

    def _machine_buzz(self) -> list[dict]:
        self.machine_buzzed = True
        top = self.agent.top5()
        guess = top[0].answer if top else ""
        emitted = [{"type": "machine_buzz", "position": self.cursor, "guess": guess}]
        if guess and guess == (self.current_question.page or ""):
            self.q_machine_points = self.rules.correct_points
            self.machine_score += self.rules.correct_points
            emitted.extend(self._resolve("machine_correct"))
        else:
            self.q_machine_points += self.rules.wrong_penalty
            self.machine_score += self.rules.wrong_penalty
            self.machine_locked = True
            emitted.append(self._score_event(note="machine_incorrect"))
            if self.human_locked:
                emitted.extend(self._resolve("both_wrong"))
        return emitted

    def _finish_question(self) -> list[dict]:
        """All words revealed and the grace window has lapsed."""
        if self.human_locked and not self.machine_locked and self.agent is not None:
            top = self.agent.top5()
            guess = top[0].answer if top else ""
            if guess and guess == (self.current_question.page or ""):
                self.q_machine_points += self.rules.correct_points
                self.machine_score += self.rules.correct_points
                return self._resolve("machine_converts_bounce")
            return self._resolve("machine_misses_bounce")
        return self._resolve("dead")

    def _on_human_buzz(self, event: dict) -> list[dict]:
        if self.state != "revealing":
            return self._error("cannot buzz in state " + self.state)
        if self.human_buzzed or self.human_locked:
            return self._error("human has already buzzed on this question")
        self.human_buzzed = True
        self.human_buzz_position = int(event.get("position", self.cursor))
        self.state = "awaiting_answer"
        return []

    def _on_human_answer(self, event: dict) -> list[dict]:
        if self.state != "awaiting_answer":
            return self._error("no answer expected in state " + self.state)
        text = str(event.get("text", ""))
        canonical = self.current_question.page or self.current_question.raw_answer
        if judge_answer(text, canonical, self.judge):
            self.q_human_points = self.rules.correct_points
            self.human_score += self.rules.correct_points
            return self._resolve("human_correct")
        self.q_human_points += self.rules.wrong_penalty
        self.human_score += self.rules.wrong_penalty
        self.human_locked = True
        if self.machine_locked:
            return self._resolve("both_wrong")
        self.state = "revealing"
        return [self._score_event(note="human_incorrect")]

    def _on_next(self) -> list[dict]:
        if self.state != "resolved":
            return self._error("question is not resolved yet")
        if self.question_index + 1 >= len(self.questions):
            self.state = "finished"
            return [
                {
                    "type": "finished",
                    "human_score": self.human_score,
                    "machine_score": self.machine_score,
                    "question_count": len(self.questions),
                }
            ]
        self.question_index += 1
        self.state = "revealing"
        self._reset_question()
        return [self._score_event(note="next_question")]


def replay(session_factory, event_log: Sequence[dict]) -> list[dict]:
    """Feed a captured input log into a fresh session; returns all outputs."""
    session = session_factory()
    emitted: list[dict] = []
    for event in event_log:
        emitted.extend(session.step(event))
    return emitted
