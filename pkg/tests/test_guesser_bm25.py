import math

import numpy as np
import pytest

from tossup.guesser import IrGuesser, build_ir_index, ir_guess, tokenize


class TestTokenize:
    def test_possessive_and_punctuation(self):
        assert tokenize("Mozart's Opera!") == ["mozart", "s", "opera"]

    def test_empty(self):
        assert tokenize("") == []

    def test_diacritics_kept(self):
        assert tokenize("Flémalle") == ["flémalle"]

    def test_underscore_is_a_separator(self):
        assert tokenize("The_Magic_Flute") == ["the", "magic", "flute"]


@pytest.fixture
def two_doc_index():
    return build_ir_index(
        [("mozart opera flute", "A"), ("verdi opera", "B")], k1=1.2, b=0.75
    )


class TestBuildIndex:
    def test_groups_by_answer(self):
        index = build_ir_index(
            [("one two", "X"), ("three", "Y"), ("four five", "X")]
        )
        assert index.n_docs == 2

    def test_avgdl(self, two_doc_index):
        assert two_doc_index.avgdl == pytest.approx(2.5)

    def test_deterministic_rebuild(self, two_doc_index):
        again = build_ir_index(
            [("mozart opera flute", "A"), ("verdi opera", "B")], k1=1.2, b=0.75
        )
        assert again.answers == two_doc_index.answers
        assert again.postings == two_doc_index.postings
        assert np.array_equal(again.doc_lengths, two_doc_index.doc_lengths)

    def test_empty_training_set_rejected(self):
        with pytest.raises(ValueError):
            build_ir_index([])


class TestIrGuess:
    def test_hand_computed_score(self, two_doc_index):
        # idf("mozart") = ln(1 + 1.5/1.5) = ln 2; tf term = 2.2 / 2.38
        (top,) = ir_guess(two_doc_index, "mozart", 1)
        assert top.answer == "A"
        assert top.score == pytest.approx(0.6407, abs=5e-4)

    def test_out_of_vocabulary_query(self, two_doc_index):
        assert ir_guess(two_doc_index, "zzz qqq", 3) == []

    def test_shared_term_scores_both(self, two_doc_index):
        guesses = ir_guess(two_doc_index, "opera", 5)
        assert {g.answer for g in guesses} == {"A", "B"}
        expected_idf = math.log(1 + 0.5 / 2.5)
        assert two_doc_index.idf("opera") == pytest.approx(expected_idf)
        assert expected_idf > 0

    def test_scores_nonnegative_and_probs_normalized(self, two_doc_index):
        guesses = ir_guess(two_doc_index, "mozart opera verdi flute", 5)
        assert all(g.score >= 0 for g in guesses)
        assert sum(g.probability for g in guesses) == pytest.approx(1.0, abs=1e-9)
        assert [g.score for g in guesses] == sorted(
            (g.score for g in guesses), reverse=True
        )

    def test_query_term_frequency_counts(self, two_doc_index):
        once = ir_guess(two_doc_index, "mozart", 1)[0].score
        twice = ir_guess(two_doc_index, "mozart mozart", 1)[0].score
        assert twice == pytest.approx(2 * once)

    def test_deterministic(self, two_doc_index):
        first = ir_guess(two_doc_index, "opera flute", 5)
        second = ir_guess(two_doc_index, "opera flute", 5)
        assert first == second

    def test_k_validation(self, two_doc_index):
        with pytest.raises(ValueError):
            ir_guess(two_doc_index, "opera", 0)


class TestIrGuesser:
    def test_wrapper_matches_function(self, two_doc_index):
        guesser = IrGuesser(index=two_doc_index)
        assert guesser.guess("mozart", 2) == ir_guess(two_doc_index, "mozart", 2)
