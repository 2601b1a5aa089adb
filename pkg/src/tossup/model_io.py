"""Versioned binary container for trained models.

Layout: an 8-byte magic+version, a little-endian uint32 header length, a
UTF-8 JSON header (model kind, dims, seed, training-config hash, array
manifest, and any small metadata such as vocabularies), then the raw
float64 little-endian parameter blocks in manifest order.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path
from typing import Any

import numpy as np

from .buzzer import MlpBuzzer, ThresholdBuzzer
from .guesser.bm25 import IrGuesser, TfidfIndex
from .guesser.dan import DanModel
from .guesser.linear import LinearModel

MAGIC = b"TSUPMDL\x01"
FORMAT_VERSION = 1
BUZZER_FEATURE_LAYOUT = "v1-17dim"


def config_hash(config: Any) -> str:
    payload = json.dumps(config, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:16]


def _write(path: Path, header: dict, arrays: list[tuple[str, np.ndarray]]) -> None:
    header = dict(header)
    header["format_version"] = FORMAT_VERSION
    header["arrays"] = [{"name": name, "shape": list(array.shape)} for name, array in arrays]
    blob = json.dumps(header, ensure_ascii=False).encode("utf-8")
    with path.open("wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack("<I", len(blob)))
        handle.write(blob)
        for _, array in arrays:
            handle.write(np.ascontiguousarray(array, dtype="<f8").tobytes())


def _read(path: Path) -> tuple[dict, dict[str, np.ndarray]]:
    with path.open("rb") as handle:
        magic = handle.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"{path} is not a model container (bad magic)")
        (header_len,) = struct.unpack("<I", handle.read(4))
        header = json.loads(handle.read(header_len).decode("utf-8"))
        arrays: dict[str, np.ndarray] = {}
        for spec in header["arrays"]:
            shape = tuple(spec["shape"])
            count = int(np.prod(shape)) if shape else 1
            buffer = handle.read(count * 8)
            arrays[spec["name"]] = np.frombuffer(buffer, dtype="<f8").reshape(shape).copy()
    return header, arrays


def save_model(model, path: str | Path, config: Any = None) -> None:
    path = Path(path)
    if isinstance(model, IrGuesser):
        model = model.index
    if isinstance(model, TfidfIndex):
        vocab = sorted(model.postings)
        token_index = {token: i for i, token in enumerate(vocab)}
        terms, docs, counts = [], [], []
        for token, posting in model.postings.items():
            for doc_id, count in posting.items():
                terms.append(token_index[token])
                docs.append(doc_id)
                counts.append(count)
        header = {
            "kind": "bm25",
            "seed": 0,
            "config_hash": config_hash(config or {"k1": model.k1, "b": model.b}),
            "dims": {"n_docs": model.n_docs, "n_terms": len(vocab)},
            "meta": {"answers": model.answers, "vocab": vocab, "k1": model.k1, "b": model.b},
        }
        arrays = [
            ("doc_lengths", model.doc_lengths),
            ("postings_term", np.array(terms, dtype=np.float64)),
            ("postings_doc", np.array(docs, dtype=np.float64)),
            ("postings_count", np.array(counts, dtype=np.float64)),
        ]
    elif isinstance(model, LinearModel):
        header = {
            "kind": "linear",
            "seed": model.seed,
            "config_hash": config_hash(config or {}),
            "dims": {"n_buckets": model.n_buckets, "n_answers": len(model.answers)},
            "meta": {"answers": model.answers},
        }
        arrays = [("weights", model.weights), ("bias", model.bias)]
    elif isinstance(model, DanModel):
        header = {
            "kind": "dan",
            "seed": model.seed,
            "config_hash": config_hash(config or {}),
            "dims": {
                "vocab": len(model.vocab),
                "answers": len(model.answers),
                "n_layers": model.n_layers,
                "embedding_dim": model.params["embeddings"].shape[1],
                "hidden_dim": model.params["answer_embeddings"].shape[1],
            },
            "meta": {"vocab": model.vocab, "answers": model.answers},
        }
        arrays = [("embeddings", model.params["embeddings"])]
        for layer in range(model.n_layers):
            arrays.append((f"W{layer}", model.params[f"W{layer}"]))
            arrays.append((f"b{layer}", model.params[f"b{layer}"]))
        arrays.append(("answer_embeddings", model.params["answer_embeddings"]))
    elif isinstance(model, MlpBuzzer):
        header = {
            "kind": "buzzer_mlp",
            "seed": model.seed,
            "config_hash": config_hash(config or {}),
            "dims": {"n_features": int(model.mu.shape[0]),
                     "hidden_dim": int(model.params["W1"].shape[0])},
            "meta": {"feature_layout": BUZZER_FEATURE_LAYOUT},
        }
        arrays = [
            ("mu", model.mu),
            ("sigma", model.sigma),
            ("W1", model.params["W1"]),
            ("b1", model.params["b1"]),
            ("W2", model.params["W2"]),
            ("b2", model.params["b2"]),
        ]
    elif isinstance(model, ThresholdBuzzer):
        header = {
            "kind": "buzzer_threshold",
            "seed": 0,
            "config_hash": config_hash(config or {}),
            "dims": {},
            "meta": {},
        }
        arrays = [("threshold", np.array([model.threshold], dtype=np.float64))]
    else:
        raise TypeError(f"don't know how to serialize {type(model).__name__}")
    _write(path, header, arrays)


def load_model(path: str | Path):
    header, arrays = _read(Path(path))
    kind = header["kind"]
    meta = header.get("meta", {})
    if kind == "bm25":
        vocab = meta["vocab"]
        postings: dict[str, dict[int, int]] = {}
        for term, doc, count in zip(
            arrays["postings_term"], arrays["postings_doc"], arrays["postings_count"]
        ):
            postings.setdefault(vocab[int(term)], {})[int(doc)] = int(count)
        index = TfidfIndex(
            answers=list(meta["answers"]),
            postings=postings,
            doc_lengths=arrays["doc_lengths"],
            avgdl=float(arrays["doc_lengths"].mean()),
            k1=float(meta["k1"]),
            b=float(meta["b"]),
        )
        return IrGuesser(index=index)
    if kind == "linear":
        return LinearModel(
            answers=list(meta["answers"]),
            weights=arrays["weights"],
            bias=arrays["bias"],
            n_buckets=int(header["dims"]["n_buckets"]),
            seed=int(header.get("seed", 0)),
        )
    if kind == "dan":
        params = {"embeddings": arrays["embeddings"], "answer_embeddings": arrays["answer_embeddings"]}
        n_layers = int(header["dims"]["n_layers"])
        for layer in range(n_layers):
            params[f"W{layer}"] = arrays[f"W{layer}"]
            params[f"b{layer}"] = arrays[f"b{layer}"]
        return DanModel(
            vocab=list(meta["vocab"]),
            answers=list(meta["answers"]),
            params=params,
            n_layers=n_layers,
            seed=int(header.get("seed", 0)),
        )
    if kind == "buzzer_mlp":
        return MlpBuzzer(
            params={name: arrays[name] for name in ("W1", "b1", "W2", "b2")},
            mu=arrays["mu"],
            sigma=arrays["sigma"],
            seed=int(header.get("seed", 0)),
        )
    if kind == "buzzer_threshold":
        return ThresholdBuzzer(threshold=float(arrays["threshold"][0]))
    raise ValueError(f"unknown model kind {kind!r}")
