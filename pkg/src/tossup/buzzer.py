"""Buzz/wait decisions over guesser output.

The buzzer is a calibrator: raw guesser confidence is unreliable, so a
small classifier reads the shape of the top guesses (levels, deltas, gaps,
rank churn) and imitates the stable oracle, which buzzes at the earliest
position from which the top guess never goes wrong again.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .guesser.base import GuessStream
from .guesser.nn import Adam, sigmoid

N_FEATURES = 17

FEATURE_NAMES = (
    "prob_1",
    "prob_2",
    "prob_3",
    "delta_1",
    "delta_2",
    "delta_3",
    "gap_1_2",
    "gap_2_3",
    "rank_up_1",
    "rank_up_2",
    "rank_up_3",
    "rank_up_4",
    "rank_up_5",
    "mean_top3",
    "var_top3",
    "prev_mean_top3",
    "prev_var_top3",
)


def _padded_probs(row, width: int) -> list[float]:
    probs = [g.probability for g in row[:width]]
    probs.extend(0.0 for _ in range(width - len(probs)))
    return probs


def extract_features(stream: GuessStream, position: int) -> np.ndarray:
    """Feature vector for one 1-based stream position.

    Temporal fields compare against position-1 and are all zero at the
    first position; short guess lists pad with probability 0 and count as
    rank-unimproved.  Variances are population variances over the top 3.
    """
    if stream.k < 5:
        raise ValueError("buzzer features need streams built with k >= 5")
    if not 1 <= position <= len(stream):
        raise ValueError(f"position {position} outside stream of length {len(stream)}")
    row = stream.guesses[position - 1]
    prev_row = stream.guesses[position - 2] if position > 1 else None

    top3 = _padded_probs(row, 3)
    features = np.zeros(N_FEATURES, dtype=np.float64)
    features[0:3] = top3
    features[6] = top3[0] - top3[1]
    features[7] = top3[1] - top3[2]
    features[13] = float(np.mean(top3))
    features[14] = float(np.var(top3))

    if prev_row is not None:
        prev3 = _padded_probs(prev_row, 3)
        features[3:6] = np.array(top3) - np.array(prev3)
        prev_rank = {g.answer: rank for rank, g in enumerate(prev_row)}
        for rank, guess in enumerate(row[:5]):
            before = prev_rank.get(guess.answer)
            if before is not None and before > rank:
                features[8 + rank] = 1.0
        features[15] = float(np.mean(prev3))
        features[16] = float(np.var(prev3))
    return features


def featurize_stream(stream: GuessStream) -> np.ndarray:
    return np.stack([extract_features(stream, pos) for pos in range(1, len(stream) + 1)])


def write_feature_csv(streams: Iterable[GuessStream], path: str | Path) -> None:
    """Debug dump: one row per (stream, position), fixed 17-column header."""
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(FEATURE_NAMES)
        for stream in streams:
            for row in featurize_stream(stream):
                writer.writerow([f"{value:.10g}" for value in row])


# ---------------------------------------------------------------------------
# oracle labels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleLabels:
    """Per-position stable-oracle actions: a block of 0s then a block of 1s."""

    labels: tuple[int, ...]
    stable_position: int | None

    def __post_init__(self):
        flips = sum(1 for a, b in zip(self.labels, self.labels[1:]) if a != b)
        if flips > 1 or (flips == 1 and self.labels[0] == 1):
            raise ValueError("labels must be zeros followed by ones")


def stable_from_correctness(correct: Sequence[bool]) -> int | None:
    """Earliest 1-based index from which every later entry is also correct."""
    if not correct or not correct[-1]:
        return None
    stable = len(correct)
    for index in range(len(correct) - 1, -1, -1):
        if correct[index]:
            stable = index + 1
        else:
            break
    return stable


def oracle_labels(stream: GuessStream) -> OracleLabels:
    correct = stream.correctness()
    stable = stable_from_correctness(correct)
    if stable is None:
        return OracleLabels(labels=(0,) * len(correct), stable_position=None)
    labels = tuple(0 if index < stable - 1 else 1 for index in range(len(correct)))
    return OracleLabels(labels=labels, stable_position=stable)


# ---------------------------------------------------------------------------
# buzzer models
# ---------------------------------------------------------------------------


class BuzzerModel(Protocol):
    kind: str

    def decide(self, stream: GuessStream, index: int) -> bool: ...


@dataclass
class ThresholdBuzzer:
    """Buzz as soon as the top-1 probability strictly exceeds the threshold."""

    threshold: float
    kind: str = "threshold"

    def decide(self, stream: GuessStream, index: int) -> bool:
        return stream.top_probability(index) > self.threshold


@dataclass
class MlpBuzzer:
    """One hidden layer of rectified units over standardized features."""

    params: dict[str, np.ndarray]
    mu: np.ndarray
    sigma: np.ndarray
    seed: int = 0
    kind: str = "mlp"

    def standardize(self, features: np.ndarray) -> np.ndarray:
        safe = np.where(self.sigma > 0, self.sigma, 1.0)
        return (features - self.mu) / safe

    def logits(self, features: np.ndarray) -> np.ndarray:
        z = self.standardize(np.atleast_2d(features))
        hidden = np.maximum(z @ self.params["W1"].T + self.params["b1"], 0.0)
        return hidden @ self.params["W2"].T + self.params["b2"]

    def score(self, features: np.ndarray) -> float:
        return float(sigmoid(self.logits(features))[0, 0])

    def decide(self, stream: GuessStream, index: int) -> bool:
        return self.score(extract_features(stream, index + 1)) > 0.5

    def loss_and_gradients(
        self, features: np.ndarray, labels: np.ndarray
    ) -> tuple[float, dict[str, np.ndarray]]:
        """Mean logistic loss and analytic gradients over a standardized batch.

        ``features`` here are already standardized rows (training caches
        them); labels are 0/1 floats.
        """
        p = self.params
        pre = features @ p["W1"].T + p["b1"]
        hidden = np.maximum(pre, 0.0)
        logit = (hidden @ p["W2"].T + p["b2"]).ravel()
        # overflow-safe logistic loss: max(s,0) - s*y + log(1 + exp(-|s|))
        loss = float(
            np.mean(np.maximum(logit, 0.0) - logit * labels + np.log1p(np.exp(-np.abs(logit))))
        )
        dlogit = (sigmoid(logit) - labels)[:, None] / len(labels)
        grads = {
            "W2": dlogit.T @ hidden,
            "b2": dlogit.sum(axis=0),
        }
        dhidden = dlogit @ p["W2"]
        dpre = dhidden * (pre > 0.0)
        grads["W1"] = dpre.T @ features
        grads["b1"] = dpre.sum(axis=0)
        return loss, grads


@dataclass
class MlpBuzzerConfig:
    hidden_dim: int = 100
    epochs: int = 20
    batch_size: int = 64
    lr: float = 1e-3
    seed: int = 0


def init_mlp_buzzer(config: MlpBuzzerConfig, n_features: int = N_FEATURES) -> MlpBuzzer:
    """Random hidden layer, zero output layer: an untrained net scores 0.5."""
    rng = np.random.default_rng(config.seed)
    params = {
        "W1": rng.normal(0.0, 1.0 / np.sqrt(n_features), size=(config.hidden_dim, n_features)),
        "b1": np.zeros(config.hidden_dim, dtype=np.float64),
        "W2": np.zeros((1, config.hidden_dim), dtype=np.float64),
        "b2": np.zeros(1, dtype=np.float64),
    }
    return MlpBuzzer(
        params=params,
        mu=np.zeros(n_features, dtype=np.float64),
        sigma=np.ones(n_features, dtype=np.float64),
        seed=config.seed,
    )


def training_matrix(streams: Sequence[GuessStream]) -> tuple[np.ndarray, np.ndarray]:
    """Stack features and stable-oracle labels over every stream position."""
    features = []
    labels = []
    for stream in streams:
        features.append(featurize_stream(stream))
        labels.extend(oracle_labels(stream).labels)
    return np.concatenate(features, axis=0), np.array(labels, dtype=np.float64)


def train_mlp_buzzer(
    streams: Sequence[GuessStream],
    config: MlpBuzzerConfig | None = None,
) -> MlpBuzzer:
    """Imitate the stable oracle with a logistic-loss MLP.

    Streams must come from a guesser that never saw these questions in
    training (the fold split exists to guarantee that).
    """
    config = config or MlpBuzzerConfig()
    features, labels = training_matrix(streams)
    if labels.min() == labels.max():
        raise ValueError("degenerate training set: labels are all identical")
    mu = features.mean(axis=0)
    sigma = features.std(axis=0)
    model = init_mlp_buzzer(config, n_features=features.shape[1])
    model.mu = mu
    model.sigma = sigma
    standardized = model.standardize(features)
    optimizer = Adam(model.params, lr=config.lr)
    rng = np.random.default_rng(config.seed)
    for _ in range(config.epochs):
        order = rng.permutation(len(labels))
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            _, grads = model.loss_and_gradients(standardized[batch], labels[batch])
            optimizer.step(grads)
    return model


# ---------------------------------------------------------------------------
# running a buzzer over streams
# ---------------------------------------------------------------------------


def decisions(buzzer: BuzzerModel, stream: GuessStream) -> list[bool]:
    return [buzzer.decide(stream, index) for index in range(len(stream))]


def first_buzz_position(buzzer: BuzzerModel, stream: GuessStream) -> int | None:
    """Word index of the earliest buzz decision, or None if it never fires."""
    for index in range(len(stream)):
        if buzzer.decide(stream, index):
            return stream.positions[index]
    return None


def tune_threshold(streams: Sequence[GuessStream], curve, variant: str = "stable") -> float:
    """Grid-search the probability threshold that maximizes expected wins.

    Scans 0.00, 0.01, ..., 1.00; ties go to the larger (more conservative)
    threshold.
    """
    from .metrics import expected_wins

    if not streams:
        raise ValueError("cannot tune a threshold on an empty dev set")
    best_threshold = 0.0
    best_ew = -1.0
    for step in range(101):
        threshold = step / 100.0
        buzzer = ThresholdBuzzer(threshold=threshold)
        buzz_at = {s.qanta_id: first_buzz_position(buzzer, s) for s in streams}
        ew = expected_wins(streams, buzz_at, curve, variant=variant)
        if ew >= best_ew:
            best_ew = ew
            best_threshold = threshold
    return best_threshold
