"""Question and gameplay datasets: loading, cleanup, dedup, and indexing.

Questions arrive as JSON lines (one object per line); gameplay records are
logs of humans playing questions word-by-word on a practice site.  This
module keeps the two datasets linked (gameplay ``qid`` matches a question's
``proto_id``) and applies the standard filtering rules before anything
downstream sees the data.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)

FOLDS = (
    "guesstrain",
    "buzztrain",
    "guessdev",
    "buzzdev",
    "guesstest",
    "buzztest",
    "unassigned",
)

MIN_PLAYS_PER_PLAYER = 20
MIN_YEAR = 1997


class CorpusError(ValueError):
    """Raised for malformed corpus files; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class QuestionRecord:
    """One quizbowl question plus its source metadata and sentence layout."""

    qanta_id: int
    text: str
    raw_answer: str
    page: str | None = None
    fold: str = "unassigned"
    tournament: str = ""
    year: int = MIN_YEAR
    championship: bool = False
    category: str | None = None
    subcategory: str | None = None
    proto_id: str | None = None
    sentence_spans: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.fold not in FOLDS:
            raise ValueError(f"unknown fold {self.fold!r}")
        if self.year < MIN_YEAR:
            raise ValueError(f"year {self.year} predates the question archive")
        prev_end = 0
        for start, end in self.sentence_spans:
            if not (0 <= start < end <= len(self.text)):
                raise ValueError(f"span ({start},{end}) outside text bounds")
            if start < prev_end:
                raise ValueError("sentence spans overlap or are out of order")
            prev_end = end

    @property
    def words(self) -> list[str]:
        return self.text.split()

    @property
    def word_count(self) -> int:
        return len(self.text.split())

    def first_sentence_word_count(self) -> int:
        """Words revealed once the first sentence has been read in full."""
        if not self.sentence_spans:
            return self.word_count
        _, end = self.sentence_spans[0]
        return len(self.text[:end].split())


@dataclass(frozen=True)
class GameplayRecord:
    """One human play: who buzzed, where, what they said, and the verdict.

    ``position`` is the 1-based word index at which the player interrupted.
    ``question_text`` is whatever the play log stored and may be elided, so
    the full-text bound on ``position`` is only checked downstream where the
    linked question is available.
    """

    date: str
    uid: str
    qid: str
    position: int
    guess: str
    result: bool
    question_text: str


# ---------------------------------------------------------------------------
# text cleanup and sentence splitting
# ---------------------------------------------------------------------------

# Moderator/organizer artifacts that leak into question text.  The note
# pattern eats through the end of its sentence.
_ARTIFACT_PATTERNS = (
    re.compile(r"MODERATOR NOTE:[^.?!]*[.?!]?"),
    re.compile(r"\(\s*[Dd]escription [Rr]equired[^)]*\)"),
    re.compile(r"[Dd]escription [Rr]equired\.?"),
    re.compile(r"\b\d+\s*pts?:\s*", re.IGNORECASE),
)

_ABBREVIATIONS = frozenset({"Mr.", "Dr.", "St.", "vs."})


def strip_artifacts(text: str) -> str:
    """Remove moderator artifacts; collapse whitespace only if anything matched."""
    cleaned = text
    for pattern in _ARTIFACT_PATTERNS:
        cleaned = pattern.sub(" ", cleaned)
    if cleaned == text:
        return text
    return re.sub(r"\s+", " ", cleaned).strip()


def _protected_token(text: str, dot: int) -> bool:
    """True when the token ending at ``dot`` must not terminate a sentence."""
    if text[dot] != ".":
        return False
    start = dot
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    token = text[start : dot + 1]
    if token in _ABBREVIATIONS:
        return True
    # Single capital + period: an initial, as in "W. E. B. Du Bois".
    return len(token) == 2 and token[0].isalpha() and token[0].isupper()


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """Deterministic rule-based sentence segmentation.

    A sentence ends at '.', '?', or '!' followed by whitespace and then an
    uppercase letter, unless the terminating token is a known abbreviation
    or a bare initial.  Spans are half-open character offsets that cover
    every non-whitespace character of the input.
    """
    n = len(text)
    i = 0
    while i < n and text[i].isspace():
        i += 1
    if i == n:
        return []
    spans: list[tuple[int, int]] = []
    start = i
    pos = start
    while pos < n:
        if text[pos] in ".?!" and pos + 1 < n and text[pos + 1].isspace():
            nxt = pos + 1
            while nxt < n and text[nxt].isspace():
                nxt += 1
            if nxt < n and text[nxt].isupper() and not _protected_token(text, pos):
                spans.append((start, pos + 1))
                start = nxt
                pos = nxt
                continue
        pos += 1
    end = n
    while end > start and text[end - 1].isspace():
        end -= 1
    spans.append((start, end))
    return spans


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

_REQUIRED_QUESTION_KEYS = ("qanta_id", "text", "answer")


def _iter_jsonl(path: Path) -> Iterable[tuple[int, dict]]:
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"invalid JSON ({exc.msg})", lineno) from exc
            if not isinstance(obj, dict):
                raise CorpusError("expected a JSON object", lineno)
            yield lineno, obj


def load_questions(path: str | Path) -> list[QuestionRecord]:
    """Parse a questions JSONL file into cleaned, span-annotated records.

    Moderator artifacts are stripped before storage.  Sentence spans come
    from the file's ``tokenizations`` when the text was stored clean;
    whenever cleanup rewrote the text (or the file has no spans) they are
    recomputed with :func:`sentence_spans`.
    """
    path = Path(path)
    records: list[QuestionRecord] = []
    seen_ids: set[int] = set()
    for lineno, obj in _iter_jsonl(path):
        missing = [key for key in _REQUIRED_QUESTION_KEYS if key not in obj]
        if missing:
            raise CorpusError(f"missing required field(s) {missing}", lineno)
        raw_text = obj["text"]
        if not isinstance(raw_text, str):
            raise CorpusError("text must be a string", lineno)
        text = strip_artifacts(raw_text)
        spans_raw = obj.get("tokenizations")
        if text == raw_text and spans_raw:
            spans = tuple((int(s), int(e)) for s, e in spans_raw)
        else:
            spans = tuple(sentence_spans(text))
        try:
            record = QuestionRecord(
                qanta_id=int(obj["qanta_id"]),
                text=text,
                raw_answer=str(obj["answer"]),
                page=obj.get("page"),
                fold=obj.get("fold") or "unassigned",
                tournament=str(obj.get("tournament", "")),
                year=int(obj.get("year", MIN_YEAR)),
                championship=bool(obj.get("championship", False)),
                category=obj.get("category"),
                subcategory=obj.get("subcategory"),
                proto_id=obj.get("proto_id"),
                sentence_spans=spans,
            )
        except (TypeError, ValueError) as exc:
            raise CorpusError(str(exc), lineno) from exc
        if record.qanta_id in seen_ids:
            raise CorpusError(f"duplicate qanta_id {record.qanta_id}", lineno)
        seen_ids.add(record.qanta_id)
        records.append(record)
    return records


_REQUIRED_PLAY_KEYS = ("date", "uid", "qid", "position", "guess", "result", "question_text")


def load_gameplay(path: str | Path) -> list[GameplayRecord]:
    """Parse a gameplay JSONL file verbatim, no filtering.

    Malformed JSON is a hard error; records that violate the schema
    (missing keys, position < 1, non-boolean result) are dropped with a
    warning count rather than aborting the load.
    """
    path = Path(path)
    records: list[GameplayRecord] = []
    rejected = 0
    for lineno, obj in _iter_jsonl(path):
        if any(key not in obj for key in _REQUIRED_PLAY_KEYS):
            rejected += 1
            continue
        if not isinstance(obj["result"], bool):
            rejected += 1
            continue
        try:
            position = int(obj["position"])
        except (TypeError, ValueError):
            rejected += 1
            continue
        if position < 1:
            rejected += 1
            continue
        records.append(
            GameplayRecord(
                date=str(obj["date"]),
                uid=str(obj["uid"]),
                qid=str(obj["qid"]),
                position=position,
                guess=str(obj["guess"]),
                result=obj["result"],
                question_text=str(obj["question_text"]),
            )
        )
    if rejected:
        logger.warning("rejected %d malformed gameplay record(s) from %s", rejected, path)
    return records


# ---------------------------------------------------------------------------
# gameplay filtering
# ---------------------------------------------------------------------------

_PLAY_DATE_FORMATS = ("%a %b %d %Y %H:%M:%S %z", "%a %b %d %Y %H:%M:%S")


def parse_play_date(date_text: str) -> float | None:
    """Parse the play-log date format or ISO-8601 into epoch seconds.

    Returns None when the string is unparseable; callers fall back to file
    order.  Example log format: ``Thu Oct 29 2015 08:55:37 GMT-0400 (EDT)``.
    """
    stripped = re.sub(r"\s*\([^)]*\)\s*$", "", date_text.strip())
    stripped = stripped.replace("GMT", "").strip()
    stripped = re.sub(r"\s+", " ", stripped)
    for fmt in _PLAY_DATE_FORMATS:
        try:
            parsed = datetime.strptime(stripped, fmt)
            break
        except ValueError:
            parsed = None
    if parsed is None:
        try:
            parsed = datetime.fromisoformat(date_text.strip().replace("Z", "+00:00"))
        except ValueError:
            return None
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.timestamp()


def filter_gameplay(records: Sequence[GameplayRecord]) -> list[GameplayRecord]:
    """Keep only each player's first play per question, then prolific players.

    For every (uid, qid) pair the chronologically earliest record survives
    (ties broken by file order); players left with fewer than
    ``MIN_PLAYS_PER_PLAYER`` distinct questions are removed entirely.
    Output is ordered by (uid, date, original position), so the filter is
    idempotent.
    """
    first_play: dict[tuple[str, str], tuple[float, int, GameplayRecord]] = {}
    for index, record in enumerate(records):
        stamp = parse_play_date(record.date)
        key = (record.uid, record.qid)
        candidate = (stamp if stamp is not None else float("inf"), index, record)
        incumbent = first_play.get(key)
        if incumbent is None or candidate[:2] < incumbent[:2]:
            first_play[key] = candidate
    per_player: dict[str, list[tuple[float, int, GameplayRecord]]] = {}
    for (uid, _), entry in first_play.items():
        per_player.setdefault(uid, []).append(entry)
    kept: list[tuple[str, float, int, GameplayRecord]] = []
    for uid, entries in per_player.items():
        if len(entries) < MIN_PLAYS_PER_PLAYER:
            continue
        kept.extend((uid, stamp, index, record) for stamp, index, record in entries)
    kept.sort(key=lambda item: (item[0], item[1], item[2]))
    return [record for _, _, _, record in kept]


# ---------------------------------------------------------------------------
# question dedup
# ---------------------------------------------------------------------------


def _normalized_text_key(text: str) -> str:
    lowered = text.lower()
    stripped = re.sub(r"[^0-9a-z\s]", "", lowered)
    return re.sub(r"\s+", " ", stripped).strip()


def dedup_questions(records: Sequence[QuestionRecord]) -> list[QuestionRecord]:
    """Collapse duplicate questions within each (tournament, year).

    Texts are compared after lowercasing, punctuation stripping, and
    whitespace collapsing; the surviving record is the one with the
    smallest qanta_id.  Tournament names must already be canonical.
    """
    best: dict[tuple[str, int, str], QuestionRecord] = {}
    for record in records:
        key = (record.tournament, record.year, _normalized_text_key(record.text))
        incumbent = best.get(key)
        if incumbent is None or record.qanta_id < incumbent.qanta_id:
            best[key] = record
    survivors = sorted(best.values(), key=lambda r: r.qanta_id)
    return survivors


def apply_tournament_aliases(
    records: Sequence[QuestionRecord], aliases: Mapping[str, str]
) -> list[QuestionRecord]:
    """Rewrite tournament names through a canonical alias table."""
    return [
        replace(record, tournament=aliases.get(record.tournament, record.tournament))
        for record in records
    ]


# ---------------------------------------------------------------------------
# combined store
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusStore:
    """Immutable, linked view over questions and (filtered) gameplay.

    Gameplay groups are attached to questions through the question's
    ``proto_id``; records whose qid matches no question, or matches more
    than one, are kept aside in ``orphans`` and excluded from training and
    evaluation.
    """

    questions: Mapping[int, QuestionRecord]
    gameplay_by_question: Mapping[int, tuple[GameplayRecord, ...]]
    gameplay_by_player: Mapping[str, tuple[GameplayRecord, ...]]
    orphans: tuple[GameplayRecord, ...]
    word_counts: Mapping[int, int] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        questions: Sequence[QuestionRecord],
        gameplay: Sequence[GameplayRecord] = (),
    ) -> "CorpusStore":
        by_id = {record.qanta_id: record for record in questions}
        if len(by_id) != len(questions):
            raise ValueError("duplicate qanta_id in question list")
        proto_index: dict[str, list[int]] = {}
        for record in questions:
            if record.proto_id:
                proto_index.setdefault(record.proto_id, []).append(record.qanta_id)
        per_question: dict[int, list[GameplayRecord]] = {}
        per_player: dict[str, list[GameplayRecord]] = {}
        orphans: list[GameplayRecord] = []
        for play in gameplay:
            owners = proto_index.get(play.qid, [])
            if len(owners) != 1:
                orphans.append(play)
                continue
            per_question.setdefault(owners[0], []).append(play)
            per_player.setdefault(play.uid, []).append(play)
        return cls(
            questions=by_id,
            gameplay_by_question={k: tuple(v) for k, v in per_question.items()},
            gameplay_by_player={k: tuple(v) for k, v in per_player.items()},
            orphans=tuple(orphans),
            word_counts={k: q.word_count for k, q in by_id.items()},
        )

    def has_gameplay(self, qanta_id: int) -> bool:
        return bool(self.gameplay_by_question.get(qanta_id))

    def questions_in_fold(self, fold: str) -> list[QuestionRecord]:
        return [q for q in self.questions.values() if q.fold == fold]


def write_questions(records: Sequence[QuestionRecord], path: str | Path) -> None:
    """Serialize questions back to the JSONL interchange format."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            obj = {
                "qanta_id": record.qanta_id,
                "text": record.text,
                "answer": record.raw_answer,
                "page": record.page,
                "fold": record.fold,
                "tournament": record.tournament,
                "year": record.year,
                "championship": record.championship,
                "category": record.category,
                "subcategory": record.subcategory,
                "proto_id": record.proto_id,
                "tokenizations": [list(span) for span in record.sentence_spans],
            }
            handle.write(json.dumps(obj, ensure_ascii=False) + "\n")


def write_gameplay(records: Sequence[GameplayRecord], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            obj = {
                "date": record.date,
                "uid": record.uid,
                "qid": record.qid,
                "position": record.position,
                "guess": record.guess,
                "result": record.result,
                "question_text": record.question_text,
            }
            handle.write(json.dumps(obj, ensure_ascii=False) + "\n")
