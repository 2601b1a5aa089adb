"""Fold assignment: split questions across guess/buzz x train/dev/test.

Evaluation folds are carved out of championship tournaments by year;
everything else lands in a training fold via a per-question counter-based
draw, so the assignment is independent of input order and reproducible
from (seed, qanta_id) alone.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .corpus import QuestionRecord


class FoldError(ValueError):
    pass


@dataclass(frozen=True)
class FoldConfig:
    seed: int = 0
    train_split: float = 0.8
    championship_tournaments: frozenset[str] = frozenset()
    buzztest_years: frozenset[int] = frozenset({2016})
    guesstest_years: frozenset[int] = frozenset({2017, 2018})
    dev_years: frozenset[int] = frozenset({2015})

    def __post_init__(self):
        if not 0.0 < self.train_split < 1.0:
            raise FoldError("train_split must lie in (0, 1)")
        overlaps = (
            (self.buzztest_years & self.guesstest_years)
            | (self.buzztest_years & self.dev_years)
            | (self.guesstest_years & self.dev_years)
        )
        if overlaps:
            raise FoldError(f"year sets must be disjoint; shared years: {sorted(overlaps)}")

    @property
    def evaluation_cutoff(self) -> int | None:
        """Earliest year claimed by any evaluation fold."""
        pool = self.dev_years or (self.buzztest_years | self.guesstest_years)
        return min(pool) if pool else None

    @classmethod
    def load(cls, path: str | Path) -> "FoldConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            seed=int(raw.get("seed", 0)),
            train_split=float(raw.get("train_split", 0.8)),
            championship_tournaments=frozenset(raw.get("championship_tournaments", [])),
            buzztest_years=frozenset(raw.get("buzztest_years", [2016])),
            guesstest_years=frozenset(raw.get("guesstest_years", [2017, 2018])),
            dev_years=frozenset(raw.get("dev_years", [2015])),
        )


def fold_draw(seed: int, qanta_id: int) -> float:
    """Deterministic uniform in [0, 1) keyed by (seed, qanta_id).

    Counter-based (a keyed hash of the question id) rather than a stream,
    so the draw never depends on how many questions were processed first.
    """
    key = (seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
    data = (qanta_id & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
    digest = hashlib.blake2b(data, digest_size=8, key=key).digest()
    return int.from_bytes(digest, "little") / 2**64


def assign_fold(
    question: QuestionRecord,
    has_gameplay: bool,
    u: float,
    cfg: FoldConfig,
) -> str:
    """Route one question to its fold.

    Championship questions from the configured years form the evaluation
    folds (dev years split evenly between guess and buzz dev); everything
    else splits train_split/rest between guesstrain and buzztrain, with the
    buzz side reserved for questions that actually have gameplay.
    """
    championship = question.championship or question.tournament in cfg.championship_tournaments
    if championship:
        if question.year in cfg.buzztest_years:
            return "buzztest"
        if question.year in cfg.guesstest_years:
            return "guesstest"
        if question.year in cfg.dev_years:
            return "guessdev" if u < 0.5 else "buzzdev"
        cutoff = cfg.evaluation_cutoff
        if cutoff is not None and question.year >= cutoff:
            raise FoldError(
                f"championship question {question.qanta_id} from {question.year} is not "
                f"covered by any evaluation year set; assigning it to train would leak"
            )
    if u < cfg.train_split:
        return "guesstrain"
    return "buzztrain" if has_gameplay else "guesstrain"


def assign_all(
    questions: Sequence[QuestionRecord],
    has_gameplay: Callable[[int], bool] | Mapping[int, bool] | set,
    cfg: FoldConfig,
) -> tuple[list[QuestionRecord], dict[str, int]]:
    """Assign folds to every mapped question; unmapped ones stay unassigned.

    Returns the re-folded records plus per-fold counts.  Assignment is a
    pure function of (cfg.seed, qanta_id, metadata), so shuffling the input
    cannot change any question's fold.
    """
    if isinstance(has_gameplay, (set, frozenset)):
        gameplay = lambda qid: qid in has_gameplay  # noqa: E731
    elif isinstance(has_gameplay, Mapping):
        gameplay = lambda qid: bool(has_gameplay.get(qid, False))  # noqa: E731
    else:
        gameplay = has_gameplay
    out: list[QuestionRecord] = []
    stats = {fold: 0 for fold in ("guesstrain", "buzztrain", "guessdev", "buzzdev", "guesstest", "buzztest", "unassigned")}
    for question in questions:
        if question.page is None:
            fold = "unassigned"
        else:
            u = fold_draw(cfg.seed, question.qanta_id)
            fold = assign_fold(question, gameplay(question.qanta_id), u, cfg)
        stats[fold] += 1
        out.append(replace(question, fold=fold))
    return out, stats


def write_fold_stats(stats: Mapping[str, int], path: str | Path) -> None:
    Path(path).write_text(json.dumps(dict(stats), indent=2) + "\n", encoding="utf-8")
