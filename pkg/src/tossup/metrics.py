"""Accuracy, win-probability curves, expected wins, and buzzer diagnostics.

Positions are normalized to t = word index / question word count, so a
curve value pi(t) reads as "probability an average human opponent has not
answered correctly with a fraction t of the question revealed".
"""

from __future__ import annotations

import bisect
import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .buzzer import (
    BuzzerModel,
    OracleLabels,
    decisions,
    first_buzz_position,
    oracle_labels,
    stable_from_correctness,
)
from .guesser.base import GuessStream

PAPER_CUBIC = (0.0, 0.0775, -1.278, 0.588)


@dataclass(frozen=True)
class WinProbCurve:
    """pi(t): chance the opponent has not yet answered correctly by t.

    Empirical curves are right-continuous step functions built from
    gameplay and are non-increasing with pi(0) = 1.  Cubic curves evaluate
    a fixed polynomial and clamp to [0, 1]; they are NOT guaranteed
    monotone, so they stay opt-in.
    """

    kind: str
    breakpoints: tuple[tuple[float, float], ...] = ()
    coefficients: tuple[float, float, float, float] = PAPER_CUBIC

    def __call__(self, t: float) -> float:
        if self.kind == "cubic":
            return cubic_win_curve(t, self.coefficients)
        times = [bp[0] for bp in self.breakpoints]
        index = bisect.bisect_right(times, t) - 1
        if index < 0:
            return 1.0
        return self.breakpoints[index][1]

    def to_csv(self, path: str | Path, resolution: int = 200) -> None:
        with Path(path).open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["t", "pi"])
            for i in range(resolution + 1):
                t = i / resolution
                writer.writerow([f"{t:.6f}", f"{self(t):.10g}"])


def cubic_win_curve(t: float, coeffs: Sequence[float] = PAPER_CUBIC) -> float:
    c0, c1, c2, c3 = coeffs
    raw = c0 + c1 * t + c2 * t * t + c3 * t * t * t
    return min(1.0, max(0.0, raw))


def empirical_win_curve(records: Sequence[tuple[float, bool]]) -> WinProbCurve:
    """Step curve from (normalized position, correct) gameplay reductions.

    pi(t) = 1 - N_t / N where N_t counts plays answered correctly at or
    before t.  Never-correct plays contribute to N only, flattening the
    curve upward.
    """
    if not records:
        raise ValueError("cannot build a win curve from zero records")
    n = len(records)
    correct_times = sorted(t for t, correct in records if correct)
    breakpoints = []
    for count, t in enumerate(correct_times, start=1):
        pi = 1.0 - count / n
        if breakpoints and breakpoints[-1][0] == t:
            breakpoints[-1] = (t, pi)
        else:
            breakpoints.append((t, pi))
    return WinProbCurve(kind="empirical", breakpoints=tuple(breakpoints))


def curve_from_gameplay(
    plays: Sequence, word_counts: Mapping[str, int] | None = None
) -> WinProbCurve:
    """Pool raw gameplay records into one empirical curve.

    Normalization uses the linked question's full word count when
    available; the record's own (possibly elided) text is the fallback.
    """
    reduced: list[tuple[float, bool]] = []
    for play in plays:
        total = None
        if word_counts is not None:
            total = word_counts.get(play.qid)
        if not total:
            total = len(play.question_text.split())
        if not total:
            continue
        t = min(1.0, play.position / total)
        reduced.append((t, play.result))
    return empirical_win_curve(reduced)


# ---------------------------------------------------------------------------
# accuracy
# ---------------------------------------------------------------------------


@dataclass
class PositionAccuracy:
    start: float
    end: float
    per_position: tuple[tuple[float, float], ...] = ()  # (normalized t, accuracy)


def _correct_at_word(stream: GuessStream, word: int) -> bool:
    index = stream.index_at_word(word)
    if index is None:
        return False
    return stream.top_answer(index) == stream.answer


def position_accuracy(
    streams: Sequence[GuessStream],
    first_sentence_words: Mapping[int, int],
    buckets: int = 10,
    include_curve: bool = False,
) -> PositionAccuracy:
    """Top-1 accuracy after the first sentence and after the full question.

    ``first_sentence_words`` maps qanta_id to the word count of the
    question's first sentence.  Streams with no recorded guess by the
    requested word count count as wrong.
    """
    if not streams:
        raise ValueError("no streams to score")
    start_hits = 0
    end_hits = 0
    for stream in streams:
        start_word = first_sentence_words.get(stream.qanta_id, stream.word_count)
        start_hits += _correct_at_word(stream, start_word)
        end_hits += _correct_at_word(stream, stream.word_count)
    per_position: list[tuple[float, float]] = []
    if include_curve:
        for bucket in range(1, buckets + 1):
            t = bucket / buckets
            hits = sum(
                _correct_at_word(s, max(1, int(round(t * s.word_count)))) for s in streams
            )
            per_position.append((t, hits / len(streams)))
    return PositionAccuracy(
        start=start_hits / len(streams),
        end=end_hits / len(streams),
        per_position=tuple(per_position),
    )


# ---------------------------------------------------------------------------
# expected wins
# ---------------------------------------------------------------------------

VARIANTS = ("stable", "first_correct")


def _oracle_buzz_word(stream: GuessStream, variant: str) -> int | None:
    correct = stream.correctness()
    if variant == "stable":
        stable = stable_from_correctness(correct)
        return stream.positions[stable - 1] if stable is not None else None
    for index, is_correct in enumerate(correct):
        if is_correct:
            return stream.positions[index]
    return None


def expected_wins(
    streams: Sequence[GuessStream],
    buzz_positions: Mapping[int, int | None] | str,
    curve: WinProbCurve,
    variant: str = "stable",
) -> float:
    """Mean credited pi(t) over questions.

    A buzz earns pi(t_buzz) only if the top guess at the buzz position is
    correct; the stable variant additionally requires correctness at every
    later position.  Pass ``buzz_positions="oracle"`` to credit the oracle
    stopping point of the chosen variant.  Questions without a (credited)
    buzz contribute zero.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if not streams:
        raise ValueError("no streams to score")
    total = 0.0
    for stream in streams:
        if isinstance(buzz_positions, str):
            if buzz_positions != "oracle":
                raise ValueError(f"unknown buzz position mode {buzz_positions!r}")
            word = _oracle_buzz_word(stream, variant)
        else:
            word = buzz_positions.get(stream.qanta_id)
        if word is None:
            continue
        index = stream.index_at_word(word)
        if index is None:
            continue
        correct = stream.correctness()
        if not correct[index]:
            continue
        if variant == "stable" and not all(correct[index:]):
            continue
        total += curve(word / stream.word_count)
    return total / len(streams)


# ---------------------------------------------------------------------------
# buzzer-vs-oracle confusion
# ---------------------------------------------------------------------------


@dataclass
class BuzzConfusion:
    """Per-position-bucket counts of buzzer action vs oracle action.

    Keys: buzz_opt_buzz, buzz_opt_wait, wait_opt_wait, wait_opt_buzz.
    A stream leaves the live population after its first buzz, matching how
    a real game ends the moment the machine interrupts.
    """

    buckets: int
    counts: dict[str, list[int]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.counts:
            self.counts = {
                key: [0] * self.buckets
                for key in ("buzz_opt_buzz", "buzz_opt_wait", "wait_opt_wait", "wait_opt_buzz")
            }

    def bucket_total(self, bucket: int) -> int:
        return sum(series[bucket] for series in self.counts.values())

    def to_dict(self) -> dict:
        return {"buckets": self.buckets, "counts": {k: list(v) for k, v in self.counts.items()}}


def buzzer_confusion(
    streams: Sequence[GuessStream],
    stream_decisions: Mapping[int, Sequence[bool]],
    stream_labels: Mapping[int, OracleLabels],
    buckets: int = 10,
) -> BuzzConfusion:
    confusion = BuzzConfusion(buckets=buckets)
    for stream in streams:
        decided = stream_decisions[stream.qanta_id]
        labels = stream_labels[stream.qanta_id].labels
        if len(decided) != len(stream) or len(labels) != len(stream):
            raise ValueError(f"decisions/labels misaligned for question {stream.qanta_id}")
        for index, (buzz, opt) in enumerate(zip(decided, labels)):
            t = stream.positions[index] / stream.word_count
            # right-closed bins (0, 1/B], (1/B, 2/B], ...
            bucket = min(buckets - 1, max(0, math.ceil(t * buckets) - 1))
            key = ("buzz" if buzz else "wait") + "_opt_" + ("buzz" if opt else "wait")
            confusion.counts[key][bucket] += 1
            if buzz:
                break  # machine has interrupted; the stream is no longer live
    return confusion


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class EvalReport:
    model: str
    start_accuracy: float
    end_accuracy: float
    ew_stable: float
    ew_first_correct: float
    per_position: tuple[tuple[float, float], ...] = ()

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "start_accuracy": self.start_accuracy,
            "end_accuracy": self.end_accuracy,
            "ew_stable": self.ew_stable,
            "ew_first_correct": self.ew_first_correct,
            "per_position": [list(point) for point in self.per_position],
        }


def write_report_json(reports: Sequence[EvalReport], path: str | Path) -> None:
    payload = [report.to_dict() for report in reports]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def write_report_csv(reports: Sequence[EvalReport], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["model", "start_accuracy", "end_accuracy", "ew_stable", "ew_first_correct"])
        for report in reports:
            writer.writerow(
                [
                    report.model,
                    f"{report.start_accuracy:.4f}",
                    f"{report.end_accuracy:.4f}",
                    f"{report.ew_stable:.4f}",
                    f"{report.ew_first_correct:.4f}",
                ]
            )


@dataclass
class BuzzerReport:
    """Buzzer-side metrics: per-position agreement with the stable oracle,
    expected wins of the induced buzzes, and (when simulated) mean points."""

    model: str
    accuracy: float
    ew: float
    score: float | None = None

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "accuracy": self.accuracy,
            "ew": self.ew,
            "score": self.score,
        }


def evaluate_buzzer(
    streams: Sequence[GuessStream],
    buzzer: BuzzerModel,
    curve: WinProbCurve,
    model_name: str = "buzzer",
    score: float | None = None,
) -> BuzzerReport:
    if not streams:
        raise ValueError("no streams to score")
    hits = 0
    total = 0
    for stream in streams:
        want = oracle_labels(stream).labels
        got = decisions(buzzer, stream)
        hits += sum(int(w == int(g)) for w, g in zip(want, got))
        total += len(want)
    buzz_at = {s.qanta_id: first_buzz_position(buzzer, s) for s in streams}
    return BuzzerReport(
        model=model_name,
        accuracy=hits / total,
        ew=expected_wins(streams, buzz_at, curve, variant="stable"),
        score=score,
    )


def write_buzzer_report_csv(reports: Sequence[BuzzerReport], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["model", "accuracy", "ew", "score"])
        for report in reports:
            writer.writerow(
                [
                    report.model,
                    f"{report.accuracy:.4f}",
                    f"{report.ew:.4f}",
                    "" if report.score is None else f"{report.score:.4f}",
                ]
            )


def evaluate_streams(
    streams: Sequence[GuessStream],
    first_sentence_words: Mapping[int, int],
    curve: WinProbCurve,
    model_name: str = "guesser",
    include_curve: bool = True,
) -> EvalReport:
    accuracy = position_accuracy(streams, first_sentence_words, include_curve=include_curve)
    return EvalReport(
        model=model_name,
        start_accuracy=accuracy.start,
        end_accuracy=accuracy.end,
        ew_stable=expected_wins(streams, "oracle", curve, variant="stable"),
        ew_first_correct=expected_wins(streams, "oracle", curve, variant="first_correct"),
        per_position=accuracy.per_position,
    )
