"""How messy moderator answer lines become canonical page titles.

Run:  python3 demos/02_answer_mapping.py
"""

from tossup.answer_map import MappingRules, TitleSet, expand_answer, match_answer

wiki = TitleSet(
    titles=frozenset({
        "Second_Vatican_Council", "Robert_Campin", "Caldera",
        "Amazon_River", "Amazon_(company)", "Plasma_(physics)",
    }),
    redirects={
        "Vatican II": "Second_Vatican_Council",
        "Master of Flémalle": "Robert_Campin",
    },
)
rules = MappingRules(
    unambiguous={"plasma": "Plasma_(physics)"},
    ambiguous={
        "amazon": (
            ("Amazon_River", ("river", "brazil")),
            ("Amazon_(company)", ("bezos", "seattle")),
        ),
    },
)

lines = [
    "{Second Vatican Council} [or {Vatican II}]",
    "The {Master of Flémalle} or Robert {Campin}",
    "{caldera}s",
    "{plasma}s",
    "amazon",
    "Depictions of Speech [accept equivalents]",
]

for raw in lines:
    variants = expand_answer(raw)
    result = match_answer(
        variants, wiki, rules,
        question_text="This river in Brazil drains a massive basin.",
    )
    print(f"{raw!r}")
    print(f"  variants: {variants[:4]}{' ...' if len(variants) > 4 else ''}")
    print(f"  -> page={result.page!r} method={result.method} edit_cost={result.edit_cost}\n")
