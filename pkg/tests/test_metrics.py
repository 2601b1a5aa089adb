import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tossup.metrics import (
    PAPER_CUBIC,
    BuzzConfusion,
    WinProbCurve,
    buzzer_confusion,
    cubic_win_curve,
    curve_from_gameplay,
    empirical_win_curve,
    expected_wins,
    position_accuracy,
)
from tossup.buzzer import oracle_labels

from conftest import make_play, make_question, stream_from_correctness

LINEAR = WinProbCurve(kind="cubic", coefficients=(1.0, -1.0, 0.0, 0.0))


def brute_force_oracle_ew(patterns, word_counts, curve, variant):
    """Independent oracle: scan positions directly, no label machinery."""
    total = 0.0
    for pattern, word_count in zip(patterns, word_counts):
        credit = 0.0
        for s in range(1, len(pattern) + 1):
            if variant == "first_correct":
                hit = pattern[s - 1]
            else:
                hit = all(pattern[s - 1:])
            if hit:
                credit = curve(s / word_count)
                break
        total += credit
    return total / len(patterns)


def brute_force_buzz_ew(patterns, word_counts, buzzes, curve, variant):
    total = 0.0
    for pattern, word_count, buzz in zip(patterns, word_counts, buzzes):
        if buzz is None:
            continue
        ok = pattern[buzz - 1] if variant == "first_correct" else all(pattern[buzz - 1:])
        if ok:
            total += curve(buzz / word_count)
    return total / len(patterns)


class TestEmpiricalCurve:
    def test_hand_counts(self):
        curve = empirical_win_curve([(0.4, True), (0.6, True), (1.0, False)])
        assert curve(0.5) == pytest.approx(1 - 1 / 3)
        assert curve(0.39) == pytest.approx(1.0)
        assert curve(0.77) == pytest.approx(1 - 2 / 3)

    def test_pi_zero_is_one(self):
        curve = empirical_win_curve([(0.5, True), (0.2, True)])
        assert curve(0.0) == 1.0

    def test_all_never_correct(self):
        curve = empirical_win_curve([(1.0, False)] * 4)
        for t in (0.0, 0.3, 0.9, 1.0):
            assert curve(t) == 1.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            empirical_win_curve([])

    @given(st.lists(st.tuples(st.floats(0, 1), st.booleans()), min_size=1, max_size=40))
    @settings(max_examples=100)
    def test_non_increasing_and_bounded(self, records):
        curve = empirical_win_curve(records)
        grid = [i / 50 for i in range(51)]
        values = [curve(t) for t in grid]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))
        # adding a never-correct record cannot lower the curve anywhere
        fatter = empirical_win_curve(list(records) + [(1.0, False)])
        assert all(fatter(t) >= curve(t) - 1e-12 for t in grid)

    def test_curve_from_gameplay_uses_linked_word_counts(self):
        plays = [make_play(qid="p1", position=5), make_play(qid="p1", position=10, result=False)]
        curve = curve_from_gameplay(plays, word_counts={"p1": 20})
        assert curve(0.25) == pytest.approx(0.5)
        assert curve(0.24) == pytest.approx(1.0)


class TestCubicCurve:
    def test_printed_coefficients_at_zero(self):
        assert cubic_win_curve(0.0, PAPER_CUBIC) == 0.0

    def test_printed_coefficients_clamp_negative(self):
        raw = 0.0775 * 0.25 - 1.278 * 0.25**2 + 0.588 * 0.25**3
        assert raw == pytest.approx(-0.0513125)
        assert cubic_win_curve(0.25, PAPER_CUBIC) == 0.0

    def test_constant_curve(self):
        for t in (0.0, 0.5, 1.0):
            assert cubic_win_curve(t, (1, 0, 0, 0)) == 1.0


class TestPositionAccuracy:
    def test_start_vs_end(self):
        sometimes = stream_from_correctness([True, False, False, True], qanta_id=1)
        never = stream_from_correctness([False] * 4, qanta_id=2)
        marks = {1: 1, 2: 1}
        acc = position_accuracy([sometimes, never], marks)
        assert acc.start == 0.5
        assert acc.end == 0.5

    def test_correct_only_at_final_word(self):
        stream = stream_from_correctness([False, False, True], qanta_id=1)
        acc = position_accuracy([stream], {1: 1})
        assert acc.start == 0.0 and acc.end == 1.0

    def test_all_correct_everywhere(self):
        streams = [stream_from_correctness([True] * 5, qanta_id=i) for i in range(3)]
        acc = position_accuracy(streams, {i: 2 for i in range(3)}, include_curve=True)
        assert acc.start == 1.0 and acc.end == 1.0
        assert all(value == 1.0 for _, value in acc.per_position)


class TestExpectedWins:
    def test_hand_example(self):
        q1 = stream_from_correctness([False, True, True, True], qanta_id=1)
        q2 = stream_from_correctness([False] * 4, qanta_id=2)
        ew = expected_wins([q1, q2], "oracle", LINEAR, variant="stable")
        assert ew == pytest.approx((0.5 + 0.0) / 2)

    def test_never_buzzing_scores_zero(self):
        streams = [stream_from_correctness([True] * 3, qanta_id=i) for i in range(2)]
        assert expected_wins(streams, {0: None, 1: None}, LINEAR) == 0.0

    def test_wrong_buzzes_score_zero_both_variants(self):
        stream = stream_from_correctness([False, False, False], qanta_id=1)
        for variant in ("stable", "first_correct"):
            assert expected_wins([stream], {1: 1}, LINEAR, variant=variant) == 0.0

    def test_unstable_position_credits_first_correct_only(self):
        stream = stream_from_correctness([True, False, True], qanta_id=1)
        assert expected_wins([stream], {1: 1}, LINEAR, variant="first_correct") > 0
        assert expected_wins([stream], {1: 1}, LINEAR, variant="stable") == 0.0

    def test_micro_enumeration_matches_bruteforce(self):
        step = WinProbCurve(
            kind="empirical", breakpoints=((0.2, 0.9), (0.5, 0.4), (0.9, 0.1))
        )
        for curve in (LINEAR, step):
            for n_positions in (1, 2, 3):
                for combo in itertools.product(
                    itertools.product([False, True], repeat=n_positions), repeat=2
                ):
                    streams = [
                        stream_from_correctness(list(pattern), qanta_id=i)
                        for i, pattern in enumerate(combo)
                    ]
                    for variant in ("stable", "first_correct"):
                        got = expected_wins(streams, "oracle", curve, variant=variant)
                        want = brute_force_oracle_ew(
                            combo, [n_positions] * 2, curve, variant
                        )
                        assert got == pytest.approx(want, abs=1e-12)

    def test_explicit_buzzes_match_bruteforce(self):
        curve = LINEAR
        for pattern in itertools.product([False, True], repeat=3):
            for buzz in (None, 1, 2, 3):
                stream = stream_from_correctness(list(pattern), qanta_id=7)
                for variant in ("stable", "first_correct"):
                    got = expected_wins([stream], {7: buzz}, curve, variant=variant)
                    want = brute_force_buzz_ew(
                        [pattern], [3], [buzz], curve, variant
                    )
                    assert got == pytest.approx(want, abs=1e-12)

    @given(
        st.lists(st.lists(st.booleans(), min_size=1, max_size=8), min_size=1, max_size=5),
        st.integers(0, 2**32 - 1),
    )
    @settings(max_examples=120)
    def test_ew_bounds_and_variant_ordering(self, patterns, seed):
        streams = [
            stream_from_correctness(pattern, qanta_id=i) for i, pattern in enumerate(patterns)
        ]
        first = expected_wins(streams, "oracle", LINEAR, variant="first_correct")
        stable = expected_wins(streams, "oracle", LINEAR, variant="stable")
        assert 0.0 <= stable <= first <= 1.0
        rng = np.random.default_rng(seed)
        buzz_at = {
            s.qanta_id: (int(rng.integers(1, len(s) + 1)) if rng.random() < 0.8 else None)
            for s in streams
        }
        for variant in ("stable", "first_correct"):
            buzzed = expected_wins(streams, buzz_at, LINEAR, variant=variant)
            assert 0.0 <= buzzed <= first + 1e-12


class TestBuzzerReport:
    def test_oracle_imitator_scores_perfectly(self, tmp_path):
        from tossup.metrics import evaluate_buzzer, write_buzzer_report_csv

        class OracleBuzzer:
            kind = "oracle"

            def decide(self, stream, index):
                return bool(oracle_labels(stream).labels[index])

        streams = [
            stream_from_correctness([False, True, True], qanta_id=1),
            stream_from_correctness([False, False, True], qanta_id=2),
        ]
        report = evaluate_buzzer(streams, OracleBuzzer(), LINEAR, score=1.25)
        assert report.accuracy == 1.0
        # stable positions: word 2 of 3 and word 3 of 3
        assert report.ew == pytest.approx(((1 - 2 / 3) + (1 - 3 / 3)) / 2)
        path = tmp_path / "buzzer.csv"
        write_buzzer_report_csv([report], path)
        header, row = path.read_text().strip().splitlines()
        assert header == "model,accuracy,ew,score"
        assert row.startswith("buzzer,1.0000,")


class TestBuzzerConfusion:
    def test_agreement_has_no_off_diagonal(self):
        streams = [stream_from_correctness([False, True, True], qanta_id=i) for i in range(3)]
        labels = {s.qanta_id: oracle_labels(s) for s in streams}
        decided = {s.qanta_id: [bool(b) for b in labels[s.qanta_id].labels] for s in streams}
        confusion = buzzer_confusion(streams, decided, labels, buckets=4)
        assert sum(confusion.counts["buzz_opt_wait"]) == 0
        assert sum(confusion.counts["wait_opt_buzz"]) == 0

    def test_always_buzz_vs_never_oracle(self):
        streams = [stream_from_correctness([False] * 4, qanta_id=i) for i in range(2)]
        labels = {s.qanta_id: oracle_labels(s) for s in streams}
        decided = {s.qanta_id: [True, True, True, True] for s in streams}
        confusion = buzzer_confusion(streams, decided, labels, buckets=4)
        assert confusion.counts["buzz_opt_wait"][0] == 2
        assert confusion.bucket_total(0) == 2
        # population leaves after the first buzz
        for bucket in range(1, 4):
            assert confusion.bucket_total(bucket) == 0

    def test_hand_built_tally(self):
        a = stream_from_correctness([False, True], qanta_id=1)  # oracle: 0,1
        b = stream_from_correctness([True, True], qanta_id=2)   # oracle: 1,1
        labels = {s.qanta_id: oracle_labels(s) for s in (a, b)}
        decided = {1: [False, True], 2: [False, True]}
        confusion = buzzer_confusion([a, b], decided, labels, buckets=2)
        assert confusion.counts["wait_opt_wait"][0] == 1   # a @ pos 1
        assert confusion.counts["wait_opt_buzz"][0] == 1   # b @ pos 1
        assert confusion.counts["buzz_opt_buzz"][1] == 2   # both @ pos 2
