"""Shared toy dataset for the guessing/buzzing/evaluation demos.

Eight answers, each with signature keywords that only appear late in the
question, so guessers improve as more words are revealed -- the same
pyramidal shape real questions have.
"""

from tossup.corpus import QuestionRecord, sentence_spans

SUBJECTS = {
    "Johannes_Kepler": ("planetary motion ellipse", "astronomer of orbits"),
    "Marie_Curie": ("radium polonium radioactivity", "chemist of elements"),
    "The_Great_Gatsby": ("daisy west egg jazz", "novel of parties"),
    "Mount_Vesuvius": ("pompeii eruption ash", "volcano of italy"),
    "Alan_Turing": ("enigma halting machine", "computing pioneer"),
    "Amazon_River": ("brazil basin tributary", "south american river"),
    "Beethoven": ("ninth symphony deaf", "composer of sonatas"),
    "Photosynthesis": ("chlorophyll sunlight glucose", "plant process"),
}

LEAD_INS = [
    "The opening clue of this question is deliberately oblique.",
    "Early hints here would stump almost every player.",
    "This question begins with an obscure biographical detail.",
    "A tricky lead-in delays the obvious giveaways.",
]


def build_questions(per_answer: int = 4, start_id: int = 1):
    questions = []
    qanta_id = start_id
    for index, (page, (keywords, giveaway)) in enumerate(SUBJECTS.items()):
        for variant in range(per_answer):
            lead = LEAD_INS[(index + variant) % len(LEAD_INS)]
            text = (f"{lead} Further study reveals {keywords} in the record. "
                    f"For ten points, name this {giveaway}.")
            questions.append(QuestionRecord(
                qanta_id=qanta_id,
                text=text,
                raw_answer=page.replace("_", " ").lower(),
                page=page,
                fold="guesstrain" if variant < per_answer - 1 else "buzztrain",
                tournament="Toy Invitational",
                year=2012,
                proto_id=f"toy-{qanta_id}",
                sentence_spans=tuple(sentence_spans(text)),
            ))
            qanta_id += 1
    return questions


def split_folds(questions):
    train = [q for q in questions if q.fold == "guesstrain"]
    buzz = [q for q in questions if q.fold == "buzztrain"]
    return train, buzz
