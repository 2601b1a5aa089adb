"""Guesser models: retrieval (BM25), multinomial logistic, and the DAN."""

from .base import (
    Guess,
    Guesser,
    GuessStream,
    full_question_examples,
    guess_stream,
    read_streams,
    reveal_positions,
    sentence_examples,
    tokenize,
    write_streams,
)
from .bm25 import IrGuesser, TfidfIndex, bm25_scores, build_ir_index, ir_guess
from .dan import DanConfig, DanModel, init_dan, train_dan
from .linear import LinearConfig, LinearModel, hashed_counts, train_linear

__all__ = [
    "Guess",
    "Guesser",
    "GuessStream",
    "IrGuesser",
    "TfidfIndex",
    "DanConfig",
    "DanModel",
    "LinearConfig",
    "LinearModel",
    "bm25_scores",
    "build_ir_index",
    "full_question_examples",
    "guess_stream",
    "hashed_counts",
    "init_dan",
    "ir_guess",
    "read_streams",
    "reveal_positions",
    "sentence_examples",
    "tokenize",
    "train_dan",
    "train_linear",
    "write_streams",
]
