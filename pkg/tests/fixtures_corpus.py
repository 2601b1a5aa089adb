"""Deterministic synthetic corpus for pipeline and service tests.

Each answer owns a few signature keywords; question texts start with
generic filler and finish with the keywords, so retrieval gets stronger as
more of the question is revealed (the same shape real questions have).
"""

from __future__ import annotations

import json
import random
from pathlib import Path

SYLLABLES = ["bel", "cor", "dan", "fen", "gil", "hap", "jor", "kel", "lun",
             "mor", "nim", "pol", "quin", "rav", "sol", "tam", "ur", "vex",
             "wil", "yor", "zan", "bri", "cal", "dre"]


def keyword(index: int, slot: int) -> str:
    a = SYLLABLES[(index * 3 + slot) % len(SYLLABLES)]
    b = SYLLABLES[(index * 7 + slot * 5 + 11) % len(SYLLABLES)]
    return a + b + str(index)


def answer_title(index: int) -> str:
    return f"Subject_{index:03d}"


def question_text(index: int, variant: int) -> str:
    k1, k2, k3 = (keyword(index, slot) for slot in range(3))
    fillers = [
        "Early clues in this question stay deliberately vague.",
        "The opening line of this question hides every keyword.",
        "This question begins with an oblique description.",
        "A difficult lead-in starts this question quietly.",
        "Nothing in this first sentence gives the subject away.",
    ]
    middle = f"Careful listeners notice {k1} mentioned in variant {variant}."
    giveaway = f"For ten points, name this subject of {k2} and {k3}."
    return f"{fillers[variant % len(fillers)]} {middle} {giveaway}"


def build_corpus(root: Path, n_answers: int = 15, variants: int = 4,
                 n_players: int = 3, seed: int = 0) -> dict[str, Path]:
    """Write questions/gameplay/titles/rules/fold-config under ``root``."""
    rng = random.Random(seed)
    root.mkdir(parents=True, exist_ok=True)
    questions = []
    qanta_id = 0
    for index in range(n_answers):
        for variant in range(variants):
            qanta_id += 1
            championship = variant == 3
            year = {0: 2010, 1: 2012, 2: 2014, 3: rng.choice([2015, 2016, 2017])}[variant]
            questions.append({
                "qanta_id": qanta_id,
                "text": question_text(index, variant),
                "answer": f"the {{{answer_title(index).replace('_', ' ')}}}",
                "page": None,
                "fold": "unassigned",
                "tournament": "Spring Invitational" if not championship else "National Championship",
                "year": year,
                "championship": championship,
                "category": "Synthetic",
                "subcategory": None,
                "proto_id": f"proto-{qanta_id}",
            })
    questions_path = root / "questions.jsonl"
    questions_path.write_text(
        "\n".join(json.dumps(q) for q in questions) + "\n", encoding="utf-8"
    )

    plays = []
    for player in range(n_players):
        uid = f"player-{player:02d}"
        for q in questions:
            words = q["text"].split()
            position = rng.randint(max(1, len(words) // 2), len(words))
            plays.append({
                "date": f"2015-03-{rng.randint(1, 28):02d}T0{player}:00:00+00:00",
                "uid": uid,
                "qid": q["proto_id"],
                "position": position,
                "guess": answer_title(0).lower(),
                "result": rng.random() < 0.55,
                "question_text": q["text"],
            })
    gameplay_path = root / "gameplay.jsonl"
    gameplay_path.write_text(
        "\n".join(json.dumps(p) for p in plays) + "\n", encoding="utf-8"
    )

    titles_path = root / "titles.tsv"
    titles_path.write_text(
        "\n".join(answer_title(i) for i in range(n_answers)) + "\n", encoding="utf-8"
    )
    redirects_path = root / "redirects.tsv"
    redirects_path.write_text("", encoding="utf-8")
    rules_path = root / "rules.json"
    rules_path.write_text(json.dumps({"unambiguous": {}, "ambiguous": {}, "direct": {}}),
                          encoding="utf-8")
    fold_config_path = root / "fold-config.json"
    fold_config_path.write_text(json.dumps({
        "seed": 13,
        "train_split": 0.8,
        "buzztest_years": [2016],
        "guesstest_years": [2017, 2018],
        "dev_years": [2015],
    }), encoding="utf-8")
    return {
        "questions": questions_path,
        "gameplay": gameplay_path,
        "titles": titles_path,
        "redirects": redirects_path,
        "rules": rules_path,
        "fold_config": fold_config_path,
    }
