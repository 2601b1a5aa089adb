"""CLI entry points and the live human-vs-machine match service."""

from .session import JudgeConfig, LiveAgent, MatchSession, judge_answer, normalize_answer, replay

__all__ = [
    "JudgeConfig",
    "LiveAgent",
    "MatchSession",
    "judge_answer",
    "normalize_answer",
    "replay",
]
