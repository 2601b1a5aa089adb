"""Mapping raw quizbowl answer lines to canonical knowledge-base titles.

Moderator answer lines are instructions, not clean labels: braces mark the
required part, brackets list acceptable alternates, and parentheticals hold
directions ("accept equivalents...").  Mapping runs in two stages: an
expansion stage generates candidate readings of the line, and a match stage
resolves them against curated rules, titles, and redirects with a fixed
precedence.  Training and evaluation questions consult separate rule pools
so that hand annotation of one side never leaks into the other.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

MATCH_METHODS = ("direct", "unambiguous", "ambiguous", "exact", "redirect", "none")


def normalize_title(text: str) -> str:
    """Canonical comparison form: lowercase, underscores to spaces, collapsed."""
    lowered = text.lower().replace("_", " ")
    return re.sub(r"\s+", " ", lowered).strip()


def levenshtein(a: str, b: str) -> int:
    """Plain edit distance; used to rank how much a variant rewrote the answer."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


@dataclass(frozen=True)
class TitleSet:
    """Canonical titles plus redirect aliases, with normalized lookups."""

    titles: frozenset[str]
    redirects: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        bad = [alias for alias, target in self.redirects.items() if target not in self.titles]
        if bad:
            raise ValueError(f"redirects point outside the title set: {sorted(bad)[:5]}")

    @cached_property
    def _exact(self) -> dict[str, list[str]]:
        table: dict[str, list[str]] = {}
        for title in self.titles:
            table.setdefault(normalize_title(title), []).append(title)
        for candidates in table.values():
            candidates.sort()
        return table

    @cached_property
    def _redirect(self) -> dict[str, list[str]]:
        table: dict[str, list[str]] = {}
        for alias, target in self.redirects.items():
            table.setdefault(normalize_title(alias), []).append(target)
        for candidates in table.values():
            candidates.sort()
        return table

    def lookup_exact(self, text: str) -> list[str]:
        return self._exact.get(normalize_title(text), [])

    def lookup_redirect(self, text: str) -> list[str]:
        return self._redirect.get(normalize_title(text), [])

    @classmethod
    def load(cls, titles_path: str | Path, redirects_path: str | Path | None = None) -> "TitleSet":
        titles = frozenset(
            line.strip()
            for line in Path(titles_path).read_text(encoding="utf-8").splitlines()
            if line.strip()
        )
        redirects: dict[str, str] = {}
        if redirects_path is not None:
            for line in Path(redirects_path).read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                alias, _, target = line.partition("\t")
                redirects[alias.strip()] = target.strip()
        return cls(titles=titles, redirects=redirects)


@dataclass(frozen=True)
class MappingRules:
    """One pool of human-curated mapping rules (train or test).

    unambiguous: answer string -> title, applied wherever the string occurs.
    ambiguous:   answer string -> candidate titles, each gated on trigger
                 words that must appear in the question text.
    direct:      qanta_id -> title, for one specific question.
    """

    unambiguous: Mapping[str, str] = field(default_factory=dict)
    ambiguous: Mapping[str, tuple[tuple[str, tuple[str, ...]], ...]] = field(default_factory=dict)
    direct: Mapping[int, str] = field(default_factory=dict)
    pool: str = "train"

    def __post_init__(self):
        overlap = set(self._unambiguous_norm) & set(self._ambiguous_norm)
        if overlap:
            raise ValueError(f"strings in both unambiguous and ambiguous tiers: {sorted(overlap)[:5]}")

    @cached_property
    def _unambiguous_norm(self) -> dict[str, str]:
        return {normalize_title(k): v for k, v in self.unambiguous.items()}

    @cached_property
    def _ambiguous_norm(self) -> dict[str, tuple[tuple[str, tuple[str, ...]], ...]]:
        return {normalize_title(k): v for k, v in self.ambiguous.items()}

    @classmethod
    def load(cls, path: str | Path, pool: str = "train") -> "MappingRules":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        ambiguous = {
            answer: tuple(
                (entry["page"], tuple(entry["words"])) for entry in entries
            )
            for answer, entries in raw.get("ambiguous", {}).items()
        }
        direct = {int(qid): page for qid, page in raw.get("direct", {}).items()}
        return cls(
            unambiguous=dict(raw.get("unambiguous", {})),
            ambiguous=ambiguous,
            direct=direct,
            pool=pool,
        )


@dataclass(frozen=True)
class MatchResult:
    page: str | None
    method: str
    edit_cost: int = 0
    conflict: bool = False

    def __post_init__(self):
        if self.method not in MATCH_METHODS:
            raise ValueError(f"unknown match method {self.method!r}")
        if (self.page is None) != (self.method == "none"):
            raise ValueError("page must be present exactly when a method matched")


# ---------------------------------------------------------------------------
# expansion stage
# ---------------------------------------------------------------------------

_ARTICLES = ("The ", "A ")
_SKIP_ALTERNATE = re.compile(r"^(do not|prompt)\b", re.IGNORECASE)
_ALTERNATE_LEAD = re.compile(r"^(or|accept)\s+", re.IGNORECASE)
_MAX_VARIANTS = 200


def _squash(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip()


def _split_top_level_or(text: str) -> list[str]:
    """Split on " or " outside any braces, brackets, or parentheses."""
    depth = 0
    parts: list[str] = []
    last = 0
    i = 0
    lowered = text.lower()
    while i < len(text):
        c = text[i]
        if c in "{[(":
            depth += 1
        elif c in "}])":
            depth = max(0, depth - 1)
        elif depth == 0 and lowered.startswith(" or ", i):
            parts.append(text[last:i])
            last = i + 4
            i += 4
            continue
        i += 1
    if not parts:
        return []
    parts.append(text[last:])
    return parts


def _single_step_variants(text: str) -> list[str]:
    out: list[str] = []
    if "{" in text or "}" in text:
        out.append(text.replace("{", "").replace("}", ""))
        out.extend(re.findall(r"\{([^{}]*)\}", text))
    if "[" in text:
        out.append(re.sub(r"\[[^\]]*\]", " ", text))
        for content in re.findall(r"\[([^\]]*)\]", text):
            content = content.strip()
            if _SKIP_ALTERNATE.match(content):
                continue
            out.append(_ALTERNATE_LEAD.sub("", content))
    if "(" in text:
        out.append(re.sub(r"\([^)]*\)", " ", text))
    out.extend(_split_top_level_or(text))
    for article in _ARTICLES:
        if text.startswith(article):
            out.append(text[len(article):])
    return [_squash(v) for v in out if _squash(v)]


def expand_answer(raw: str) -> list[str]:
    """All candidate readings of an answer line, cheapest rewrite first.

    The closure of the expansion rules is explored breadth-first, then the
    distinct variants are stable-sorted by edit distance from the raw line,
    so the raw input itself always sits at index 0.
    """
    raw_clean = _squash(raw) or raw
    ordered: list[str] = [raw_clean]
    seen = {raw_clean}
    frontier = [raw_clean]
    while frontier and len(ordered) < _MAX_VARIANTS:
        next_frontier: list[str] = []
        for candidate in frontier:
            for variant in _single_step_variants(candidate):
                if variant not in seen:
                    seen.add(variant)
                    ordered.append(variant)
                    next_frontier.append(variant)
        frontier = next_frontier
    costs = {variant: levenshtein(raw_clean, variant) for variant in ordered}
    return sorted(ordered, key=lambda v: costs[v])


# ---------------------------------------------------------------------------
# match stage
# ---------------------------------------------------------------------------


def _question_words(question_text: str) -> frozenset[str]:
    return frozenset(re.findall(r"[^\W_]+", question_text.lower(), re.UNICODE))


def _pick(hits: list[tuple[int, str]]) -> tuple[str, int]:
    """Lowest edit cost wins; ties break lexicographically by title."""
    cost, page = min(hits, key=lambda item: (item[0], item[1]))
    return page, cost


def match_answer(
    variants: Sequence[str],
    wiki: TitleSet,
    rules: MappingRules,
    question_text: str = "",
    qanta_id: int | None = None,
) -> MatchResult:
    """Resolve expanded variants to one title under the fixed precedence.

    direct > unambiguous > ambiguous > exact title > redirect.  An ambiguous
    rule that leaves two or more word-triggered candidates alive aborts the
    match with a conflict flag rather than guessing.
    """
    if not variants:
        raise ValueError("variants must be non-empty")
    raw = variants[0]

    if qanta_id is not None and qanta_id in rules.direct:
        return MatchResult(page=rules.direct[qanta_id], method="direct", edit_cost=0)

    cost_of = {variant: levenshtein(raw, variant) for variant in variants}

    hits = [
        (cost_of[v], rules._unambiguous_norm[normalize_title(v)])
        for v in variants
        if normalize_title(v) in rules._unambiguous_norm
    ]
    if hits:
        page, cost = _pick(hits)
        return MatchResult(page=page, method="unambiguous", edit_cost=cost)

    words = _question_words(question_text)
    ambiguous_hits: list[tuple[int, str]] = []
    for variant in variants:
        entries = rules._ambiguous_norm.get(normalize_title(variant))
        if not entries:
            continue
        survivors = [
            page
            for page, triggers in entries
            if any(trigger.lower() in words for trigger in triggers)
        ]
        if len(survivors) > 1:
            return MatchResult(page=None, method="none", conflict=True)
        if survivors:
            ambiguous_hits.append((cost_of[variant], survivors[0]))
    if ambiguous_hits:
        page, cost = _pick(ambiguous_hits)
        return MatchResult(page=page, method="ambiguous", edit_cost=cost)

    exact_hits = [
        (cost_of[v], title) for v in variants for title in wiki.lookup_exact(v)
    ]
    if exact_hits:
        page, cost = _pick(exact_hits)
        return MatchResult(page=page, method="exact", edit_cost=cost)

    redirect_hits = [
        (cost_of[v], target) for v in variants for target in wiki.lookup_redirect(v)
    ]
    if redirect_hits:
        page, cost = _pick(redirect_hits)
        return MatchResult(page=page, method="redirect", edit_cost=cost)

    return MatchResult(page=None, method="none")


# ---------------------------------------------------------------------------
# corpus-level mapping
# ---------------------------------------------------------------------------

_TEST_FOLDS = frozenset({"guessdev", "buzzdev", "guesstest", "buzztest"})


@dataclass
class MappingReport:
    method_counts: dict[str, int] = field(default_factory=dict)
    unmatched: list[tuple[int, str]] = field(default_factory=list)
    total: int = 0

    @property
    def matched(self) -> int:
        return self.total - self.method_counts.get("none", 0)

    def to_json(self) -> str:
        return json.dumps(
            {
                "total": self.total,
                "matched": self.matched,
                "method_counts": self.method_counts,
                "unmatched": [
                    {"qanta_id": qid, "answer": answer} for qid, answer in self.unmatched
                ],
            },
            ensure_ascii=False,
            indent=2,
        )


def designation_for(question) -> str:
    """Which rule pool a question consults: its fold if assigned, else its vintage.

    Championship questions from the evaluation years are annotated against
    the test pool even before folds are drawn, mirroring how the rule pools
    were curated.
    """
    if question.fold in _TEST_FOLDS:
        return "test"
    if question.fold == "unassigned" and question.championship and question.year >= 2015:
        return "test"
    return "train"


def map_corpus(
    questions: Sequence,
    wiki: TitleSet,
    train_rules: MappingRules,
    test_rules: MappingRules,
    designations: Mapping[int, str] | None = None,
):
    """Map every question's raw answer to a page, keeping rule pools apart.

    Returns (mapped questions, report).  Questions that fail to map keep
    page=None and are forced to the unassigned fold.
    """
    from dataclasses import replace

    report = MappingReport()
    mapped = []
    for question in questions:
        pool = (designations or {}).get(question.qanta_id) or designation_for(question)
        rules = test_rules if pool == "test" else train_rules
        variants = expand_answer(question.raw_answer)
        result = match_answer(
            variants, wiki, rules, question_text=question.text, qanta_id=question.qanta_id
        )
        report.total += 1
        report.method_counts[result.method] = report.method_counts.get(result.method, 0) + 1
        if result.page is None:
            report.unmatched.append((question.qanta_id, question.raw_answer))
            mapped.append(replace(question, page=None, fold="unassigned"))
        else:
            mapped.append(replace(question, page=result.page))
    return mapped, report
