"""Retrieval guesser: one document per answer, scored with Okapi BM25.

All training questions sharing an answer are concatenated into that
answer's document.  A question prefix is the query; the top-scoring
documents' answers become the guesses.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .base import Guess, tokenize
from .nn import softmax

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


@dataclass
class TfidfIndex:
    """Inverted index over per-answer documents with BM25 statistics."""

    answers: list[str]
    postings: dict[str, dict[int, int]]
    doc_lengths: np.ndarray
    avgdl: float
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B

    @property
    def n_docs(self) -> int:
        return len(self.answers)

    def idf(self, token: str) -> float:
        n_t = len(self.postings.get(token, ()))
        return float(np.log(1.0 + (self.n_docs - n_t + 0.5) / (n_t + 0.5)))


def build_ir_index(
    train: Sequence[tuple[str, str]],
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> TfidfIndex:
    """Group training texts by answer and index the concatenated documents."""
    if not train:
        raise ValueError("cannot build a retrieval index from an empty training set")
    grouped: dict[str, list[str]] = {}
    for text, answer in train:
        grouped.setdefault(answer, []).append(text)
    answers = sorted(grouped)
    postings: dict[str, dict[int, int]] = {}
    doc_lengths = np.zeros(len(answers), dtype=np.float64)
    for doc_id, answer in enumerate(answers):
        tokens = tokenize(" ".join(grouped[answer]))
        doc_lengths[doc_id] = len(tokens)
        for token, count in Counter(tokens).items():
            postings.setdefault(token, {})[doc_id] = count
    avgdl = float(doc_lengths.mean())
    return TfidfIndex(answers=answers, postings=postings, doc_lengths=doc_lengths,
                      avgdl=avgdl, k1=k1, b=b)


def bm25_scores(index: TfidfIndex, query_tokens: Sequence[str]) -> dict[int, float]:
    """BM25 score for every document sharing at least one query token."""
    scores: dict[int, float] = {}
    k1, b, avgdl = index.k1, index.b, index.avgdl
    for token in query_tokens:
        docs = index.postings.get(token)
        if not docs:
            continue
        idf = index.idf(token)
        for doc_id, tf in docs.items():
            norm = tf + k1 * (1.0 - b + b * index.doc_lengths[doc_id] / avgdl)
            scores[doc_id] = scores.get(doc_id, 0.0) + idf * tf * (k1 + 1.0) / norm
    return scores


def ir_guess(index: TfidfIndex, prefix_text: str, k: int) -> list[Guess]:
    """Top-k answers by BM25; probabilities are the softmax of those k scores.

    Returns an empty list when no query token appears in the index, which
    downstream code reads as "no evidence yet".
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = bm25_scores(index, tokenize(prefix_text))
    if not scores:
        return []
    ranked = sorted(scores.items(), key=lambda item: (-item[1], index.answers[item[0]]))[:k]
    values = np.array([score for _, score in ranked], dtype=np.float64)
    probs = softmax(values)
    return [
        Guess(answer=index.answers[doc_id], score=float(score), probability=float(prob))
        for (doc_id, score), prob in zip(ranked, probs)
    ]


@dataclass
class IrGuesser:
    """Guesser-protocol wrapper around a built index."""

    index: TfidfIndex

    @classmethod
    def train(cls, train: Sequence[tuple[str, str]], k1: float = DEFAULT_K1,
              b: float = DEFAULT_B) -> "IrGuesser":
        return cls(index=build_ir_index(train, k1=k1, b=b))

    def guess(self, text: str, k: int) -> list[Guess]:
        return ir_guess(self.index, text, k)
