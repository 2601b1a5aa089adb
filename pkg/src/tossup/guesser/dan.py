"""Deep averaging network guesser.

Word embeddings are averaged into a single vector, pushed through a stack
of GELU feed-forward layers, and scored against trainable answer
embeddings.  Written directly in numpy with hand-derived gradients so the
whole chain is finite-difference checkable.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .base import Guess, tokenize
from .nn import Adam, gelu, gelu_grad, log_softmax, softmax

logger = logging.getLogger(__name__)

UNK = "<unk>"


@dataclass
class DanConfig:
    embedding_dim: int = 300
    hidden_dim: int = 300
    n_layers: int = 2
    dropout: float = 0.15
    batch_size: int = 128
    epochs: int = 40
    lr: float = 1e-3
    seed: int = 0
    dev_fraction: float = 0.1
    patience: int = 6
    anneal_patience: int = 2
    anneal_factor: float = 0.5
    min_lr: float = 1e-5


@dataclass
class DanModel:
    vocab: list[str]
    answers: list[str]
    params: dict[str, np.ndarray]
    n_layers: int
    seed: int = 0
    skipped_examples: int = 0
    _token_index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._token_index:
            self._token_index = {token: i for i, token in enumerate(self.vocab)}

    # -- encoding -----------------------------------------------------------

    def encode(self, text: str) -> np.ndarray:
        index = self._token_index
        return np.array([index.get(token, 0) for token in tokenize(text)], dtype=np.int64)

    # -- forward / backward -------------------------------------------------

    def _forward(self, ids_batch: Sequence[np.ndarray], masks: list[np.ndarray] | None = None):
        """Batched forward pass; returns logits plus everything backward needs."""
        p = self.params
        batch = len(ids_batch)
        lengths = np.array([max(len(ids), 1) for ids in ids_batch], dtype=np.float64)
        dim = p["embeddings"].shape[1]
        h0 = np.zeros((batch, dim), dtype=np.float64)
        for row, ids in enumerate(ids_batch):
            if len(ids):
                h0[row] = p["embeddings"][ids].sum(axis=0) / lengths[row]
        h = h0 * masks[0] if masks else h0
        pre_acts = []
        hiddens = [h]
        for layer in range(self.n_layers):
            a = h @ p[f"W{layer}"].T + p[f"b{layer}"]
            h = gelu(a)
            if masks:
                h = h * masks[layer + 1]
            pre_acts.append(a)
            hiddens.append(h)
        logits = h @ p["answer_embeddings"].T
        return logits, (ids_batch, lengths, h0, pre_acts, hiddens)

    def loss_and_gradients(
        self,
        ids_batch: Sequence[np.ndarray],
        golds: np.ndarray,
        masks: list[np.ndarray] | None = None,
    ) -> tuple[float, dict[str, np.ndarray]]:
        p = self.params
        logits, (ids_list, lengths, h0, pre_acts, hiddens) = self._forward(ids_batch, masks)
        batch = len(ids_batch)
        logp = log_softmax(logits, axis=-1)
        loss = float(-np.mean(logp[np.arange(batch), golds]))

        dlogits = np.exp(logp)
        dlogits[np.arange(batch), golds] -= 1.0
        dlogits /= batch

        grads = {name: np.zeros_like(value) for name, value in p.items()}
        grads["answer_embeddings"] = dlogits.T @ hiddens[-1]
        dh = dlogits @ p["answer_embeddings"]
        for layer in reversed(range(self.n_layers)):
            if masks:
                dh = dh * masks[layer + 1]
            da = dh * gelu_grad(pre_acts[layer])
            grads[f"W{layer}"] = da.T @ hiddens[layer]
            grads[f"b{layer}"] = da.sum(axis=0)
            dh = da @ p[f"W{layer}"]
        if masks:
            dh = dh * masks[0]
        demb = grads["embeddings"]
        for row, ids in enumerate(ids_list):
            if len(ids):
                np.add.at(demb, ids, dh[row] / lengths[row])
        return loss, grads

    def mean_loss(self, ids_batch: Sequence[np.ndarray], golds: np.ndarray) -> float:
        logits, _ = self._forward(ids_batch)
        logp = log_softmax(logits, axis=-1)
        return float(-np.mean(logp[np.arange(len(ids_batch)), golds]))

    # -- inference ----------------------------------------------------------

    def guess(self, text: str, k: int) -> list[Guess]:
        ids = self.encode(text)
        logits, _ = self._forward([ids])
        logits = logits[0]
        probs = softmax(logits)
        order = np.argsort(-logits, kind="stable")[:k]
        return [
            Guess(answer=self.answers[i], score=float(logits[i]), probability=float(probs[i]))
            for i in order
        ]


def init_dan(vocab: list[str], answers: list[str], config: DanConfig) -> DanModel:
    """Random-normal embeddings (mean 0, sd 1); layer weights scaled for depth."""
    rng = np.random.default_rng(config.seed)
    params: dict[str, np.ndarray] = {
        "embeddings": rng.normal(0.0, 1.0, size=(len(vocab), config.embedding_dim)),
        "answer_embeddings": rng.normal(
            0.0, 1.0 / np.sqrt(config.hidden_dim), size=(len(answers), config.hidden_dim)
        ),
    }
    prev = config.embedding_dim
    for layer in range(config.n_layers):
        params[f"W{layer}"] = rng.normal(0.0, 1.0 / np.sqrt(prev), size=(config.hidden_dim, prev))
        params[f"b{layer}"] = np.zeros(config.hidden_dim, dtype=np.float64)
        prev = config.hidden_dim
    return DanModel(
        vocab=vocab, answers=answers, params=params, n_layers=config.n_layers, seed=config.seed
    )


def train_dan(
    train: Sequence[tuple[str, str]],
    config: DanConfig | None = None,
    dev: Sequence[tuple[str, str]] | None = None,
) -> DanModel:
    """Train on sentence-level (text, answer) pairs.

    Examples that tokenize to nothing are skipped (counted on the model).
    Early stopping watches dev loss; the learning rate halves on plateau.
    """
    config = config or DanConfig()
    answers = sorted({answer for _, answer in train})
    if len(answers) < 2:
        raise ValueError("training requires at least two distinct answers")
    answer_index = {answer: i for i, answer in enumerate(answers)}

    vocab = [UNK] + sorted({token for text, _ in train for token in tokenize(text)})
    model = init_dan(vocab, answers, config)

    encoded: list[tuple[np.ndarray, int]] = []
    skipped = 0
    for text, answer in train:
        ids = model.encode(text)
        if len(ids) == 0:
            skipped += 1
            continue
        encoded.append((ids, answer_index[answer]))
    model.skipped_examples = skipped
    if skipped:
        logger.warning("skipped %d empty training example(s)", skipped)
    if not encoded:
        raise ValueError("no usable training examples after tokenization")

    rng = np.random.default_rng(config.seed)
    if dev is not None:
        dev_encoded = [
            (model.encode(text), answer_index[answer])
            for text, answer in dev
            if answer in answer_index and len(model.encode(text))
        ]
    else:
        order = rng.permutation(len(encoded))
        n_dev = max(1, int(len(encoded) * config.dev_fraction))
        dev_encoded = [encoded[i] for i in order[:n_dev]]
        encoded = [encoded[i] for i in order[n_dev:]]
        if not encoded:
            encoded, dev_encoded = dev_encoded, []

    def dev_loss() -> float:
        if not dev_encoded:
            return float("nan")
        ids = [item[0] for item in dev_encoded]
        golds = np.array([item[1] for item in dev_encoded])
        return model.mean_loss(ids, golds)

    optimizer = Adam(model.params, lr=config.lr)
    keep_rate = 1.0 - config.dropout
    best = {name: value.copy() for name, value in model.params.items()}
    best_loss = dev_loss()
    stale = 0
    anneal_stale = 0
    for epoch in range(config.epochs):
        order = rng.permutation(len(encoded))
        for start in range(0, len(order), config.batch_size):
            chunk = [encoded[i] for i in order[start : start + config.batch_size]]
            ids = [item[0] for item in chunk]
            golds = np.array([item[1] for item in chunk])
            masks = None
            if config.dropout > 0.0:
                width = model.params["embeddings"].shape[1]
                hidden = model.params["answer_embeddings"].shape[1]
                sizes = [width] + [hidden] * model.n_layers
                masks = [
                    (rng.random((len(chunk), size)) < keep_rate) / keep_rate
                    for size in sizes
                ]
            _, grads = model.loss_and_gradients(ids, golds, masks)
            optimizer.step(grads)
        current = dev_loss()
        if np.isnan(current):
            continue
        if current < best_loss - 1e-6:
            best_loss = current
            best = {name: value.copy() for name, value in model.params.items()}
            stale = 0
            anneal_stale = 0
        else:
            stale += 1
            anneal_stale += 1
            if anneal_stale >= config.anneal_patience and optimizer.lr > config.min_lr:
                optimizer.lr = max(config.min_lr, optimizer.lr * config.anneal_factor)
                anneal_stale = 0
            if stale >= config.patience:
                logger.info("early stop at epoch %d (dev loss %.4f)", epoch, best_loss)
                break
    if not np.isnan(best_loss):
        for name in model.params:
            model.params[name][...] = best[name]
    return model
