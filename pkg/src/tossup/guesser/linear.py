"""Multinomial logistic guesser over hashed unigram+bigram counts.

Token n-grams are hashed into a fixed bucket space, so the weight matrix is
(buckets x answers) regardless of vocabulary.  Training is plain seeded
mini-batch gradient descent on the negative log-likelihood from a zero
init, which keeps zero-epoch behavior exactly uniform.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .base import Guess, tokenize
from .nn import log_softmax, softmax

DEFAULT_BUCKETS = 2**20


def _bucket(gram: str, n_buckets: int) -> int:
    digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") % n_buckets


def hashed_counts(text: str, n_buckets: int, cache: dict[str, int] | None = None) -> dict[int, float]:
    """Sparse bucket -> count features for unigrams and adjacent bigrams."""
    tokens = tokenize(text)
    grams = tokens + [f"{a}\x1f{b}" for a, b in zip(tokens, tokens[1:])]
    features: dict[int, float] = {}
    for gram in grams:
        if cache is not None:
            bucket = cache.get(gram)
            if bucket is None:
                bucket = _bucket(gram, n_buckets)
                cache[gram] = bucket
        else:
            bucket = _bucket(gram, n_buckets)
        features[bucket] = features.get(bucket, 0.0) + 1.0
    return features


@dataclass
class LinearConfig:
    n_buckets: int = DEFAULT_BUCKETS
    epochs: int = 30
    batch_size: int = 32
    lr: float = 0.5
    seed: int = 0


@dataclass
class LinearModel:
    answers: list[str]
    weights: np.ndarray  # (n_buckets, n_answers)
    bias: np.ndarray  # (n_answers,)
    n_buckets: int
    seed: int = 0
    _cache: dict[str, int] = field(default_factory=dict, repr=False)

    def logits(self, features: dict[int, float]) -> np.ndarray:
        out = self.bias.copy()
        for bucket, count in features.items():
            out += count * self.weights[bucket]
        return out

    def guess(self, text: str, k: int) -> list[Guess]:
        features = hashed_counts(text, self.n_buckets, self._cache)
        logits = self.logits(features)
        probs = softmax(logits)
        order = np.argsort(-logits, kind="stable")[:k]
        return [
            Guess(answer=self.answers[i], score=float(logits[i]), probability=float(probs[i]))
            for i in order
        ]

    def loss_and_gradients(
        self, batch: Sequence[tuple[dict[int, float], int]]
    ) -> tuple[float, dict[str, np.ndarray]]:
        """Mean NLL over a featurized batch and its analytic gradients.

        The weight gradient is returned dense for checkability; training
        only ever touches the rows of buckets active in the batch.
        """
        n = len(batch)
        grad_w = np.zeros_like(self.weights)
        grad_b = np.zeros_like(self.bias)
        total = 0.0
        for features, gold in batch:
            logits = self.logits(features)
            logp = log_softmax(logits)
            total -= logp[gold]
            delta = np.exp(logp)
            delta[gold] -= 1.0
            grad_b += delta / n
            for bucket, count in features.items():
                grad_w[bucket] += (count / n) * delta
        return total / n, {"weights": grad_w, "bias": grad_b}


def train_linear(
    train: Sequence[tuple[str, str]],
    config: LinearConfig | None = None,
) -> LinearModel:
    """Fit the classifier on (text, answer) pairs; callers supply sentence-level examples."""
    config = config or LinearConfig()
    answers = sorted({answer for _, answer in train})
    if len(answers) < 2:
        raise ValueError("training requires at least two distinct answers")
    answer_index = {answer: i for i, answer in enumerate(answers)}
    model = LinearModel(
        answers=answers,
        weights=np.zeros((config.n_buckets, len(answers)), dtype=np.float64),
        bias=np.zeros(len(answers), dtype=np.float64),
        n_buckets=config.n_buckets,
        seed=config.seed,
    )
    examples = [
        (hashed_counts(text, config.n_buckets, model._cache), answer_index[answer])
        for text, answer in train
    ]
    rng = np.random.default_rng(config.seed)
    for _ in range(config.epochs):
        order = rng.permutation(len(examples))
        for start in range(0, len(order), config.batch_size):
            batch = [examples[i] for i in order[start : start + config.batch_size]]
            _, grads = _sparse_batch_gradients(model, batch)
            for bucket, row_grad in grads["rows"].items():
                model.weights[bucket] -= config.lr * row_grad
            model.bias -= config.lr * grads["bias"]
    return model


def _sparse_batch_gradients(model: LinearModel, batch) -> tuple[float, dict]:
    n = len(batch)
    rows: dict[int, np.ndarray] = {}
    grad_b = np.zeros_like(model.bias)
    total = 0.0
    for features, gold in batch:
        logits = model.logits(features)
        logp = log_softmax(logits)
        total -= logp[gold]
        delta = np.exp(logp)
        delta[gold] -= 1.0
        grad_b += delta / n
        for bucket, count in features.items():
            if bucket not in rows:
                rows[bucket] = np.zeros_like(model.bias)
            rows[bucket] += (count / n) * delta
    return total / n, {"rows": rows, "bias": grad_b}
