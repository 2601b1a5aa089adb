import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tossup.corpus import (
    CorpusError,
    CorpusStore,
    GameplayRecord,
    dedup_questions,
    filter_gameplay,
    load_gameplay,
    load_questions,
    parse_play_date,
    sentence_spans,
    strip_artifacts,
)

from conftest import make_play, make_question


class TestSentenceSpans:
    def test_two_sentences(self):
        assert sentence_spans("He ran. She won?") == [(0, 7), (8, 16)]

    def test_empty(self):
        assert sentence_spans("") == []
        assert sentence_spans("   ") == []

    def test_abbreviation_never_splits(self):
        assert len(sentence_spans("Mr. Smith left.")) == 1
        assert len(sentence_spans("He cited Dr. Grant. Then he left.")) == 2

    def test_single_initial_never_splits(self):
        # "A." is an initial, so the curated rule keeps it attached.
        assert len(sentence_spans("A. B.")) == 1
        assert len(sentence_spans("W. E. B. Du Bois wrote it. He was right.")) == 2

    def test_question_and_exclamation(self):
        spans = sentence_spans("Who did this? Nobody knows! Ask later.")
        assert len(spans) == 3

    def test_lowercase_continuation_not_split(self):
        assert len(sentence_spans("It cost 3.5 dollars. pretty cheap")) == 1

    @given(st.text(max_size=120))
    @settings(max_examples=200)
    def test_full_coverage_of_non_whitespace(self, text):
        spans = sentence_spans(text)
        joined = "".join(text[s:e] for s, e in spans)
        assert [c for c in joined if not c.isspace()] == [c for c in text if not c.isspace()]
        prev_end = -1
        for start, end in spans:
            assert 0 <= start < end <= len(text)
            assert start > prev_end
            prev_end = end


class TestStripArtifacts:
    def test_moderator_note_removed(self):
        text = "MODERATOR NOTE: read slowly. This painter made art."
        assert strip_artifacts(text) == "This painter made art."

    def test_points_marker_removed(self):
        assert strip_artifacts("15 pts: Name this king.") == "Name this king."

    def test_clean_text_untouched(self):
        text = "A perfectly normal question about opera."
        assert strip_artifacts(text) is text


class TestLoadQuestions:
    def _write(self, tmp_path, lines):
        path = tmp_path / "questions.jsonl"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        assert load_questions(path) == []

    def test_spans_populated(self, tmp_path):
        obj = {"qanta_id": 1, "text": "He ran fast. She won the race.", "answer": "X"}
        path = self._write(tmp_path, [json.dumps(obj)])
        (record,) = load_questions(path)
        assert len(record.sentence_spans) == 2

    def test_moderator_note_stripped(self, tmp_path):
        obj = {
            "qanta_id": 2,
            "text": "MODERATOR NOTE: read slowly. Name this opera composer.",
            "answer": "Mozart",
        }
        (record,) = load_questions(self._write(tmp_path, [json.dumps(obj)]))
        assert "MODERATOR NOTE" not in record.text
        assert record.text.startswith("Name this opera")

    def test_malformed_line_names_line_number(self, tmp_path):
        path = self._write(tmp_path, ['{"qanta_id": 1, "text": "T.", "answer": "A"}', "{broken"])
        with pytest.raises(CorpusError, match="line 2"):
            load_questions(path)

    def test_missing_required_field(self, tmp_path):
        path = self._write(tmp_path, ['{"qanta_id": 3, "text": "T."}'])
        with pytest.raises(CorpusError, match="answer"):
            load_questions(path)

    def test_duplicate_id_rejected(self, tmp_path):
        line = '{"qanta_id": 7, "text": "T.", "answer": "A"}'
        with pytest.raises(CorpusError, match="duplicate"):
            load_questions(self._write(tmp_path, [line, line]))

    def test_file_spans_used_when_text_clean(self, tmp_path):
        obj = {
            "qanta_id": 4,
            "text": "Alpha beta. Gamma delta.",
            "answer": "A",
            "tokenizations": [[0, 11], [12, 24]],
        }
        (record,) = load_questions(self._write(tmp_path, [json.dumps(obj)]))
        assert record.sentence_spans == ((0, 11), (12, 24))


class TestLoadGameplay:
    def _write(self, tmp_path, objs):
        path = tmp_path / "gameplay.jsonl"
        path.write_text("\n".join(json.dumps(o) for o in objs) + "\n", encoding="utf-8")
        return path

    def _entry(self, **overrides):
        obj = {
            "date": "Thu Oct 29 2015 08:55:37 GMT-0400 (EDT)",
            "uid": "9e7f7dde8fdac32b18ed3a09d058fe85d1798fe7",
            "qid": "5476992dea23cca90550b622",
            "position": 47,
            "guess": "atlanta",
            "result": True,
            "question_text": "This Arcadian wounded a creature sent to punish Oeneus",
        }
        obj.update(overrides)
        return obj

    def test_log_entry_parses(self, tmp_path):
        (record,) = load_gameplay(self._write(tmp_path, [self._entry()]))
        assert record.uid.startswith("9e7f")
        assert record.position == 47
        assert record.guess == "atlanta"
        assert record.result is True

    def test_missing_result_rejected(self, tmp_path):
        entry = self._entry()
        del entry["result"]
        assert load_gameplay(self._write(tmp_path, [entry])) == []

    def test_count_preserved(self, tmp_path):
        objs = [self._entry(uid=f"u{i}") for i in range(3)]
        assert len(load_gameplay(self._write(tmp_path, objs))) == 3

    def test_nonpositive_position_rejected(self, tmp_path):
        objs = [self._entry(position=0), self._entry(position=-3), self._entry(uid="ok")]
        records = load_gameplay(self._write(tmp_path, objs))
        assert [r.uid for r in records] == ["ok"]


class TestParsePlayDate:
    def test_log_format(self):
        stamp = parse_play_date("Thu Oct 29 2015 08:55:37 GMT-0400 (EDT)")
        assert stamp is not None

    def test_iso(self):
        early = parse_play_date("2015-10-29T08:00:00+00:00")
        late = parse_play_date("2015-10-29T09:00:00+00:00")
        assert early < late

    def test_unparseable(self):
        assert parse_play_date("sometime last year") is None


def _plays_for(uid, n, result=True, start_day=1):
    return [
        make_play(uid=uid, qid=f"q{i}", position=3, result=result,
                  date=f"2015-01-{start_day + i:02d}T00:00:00+00:00")
        for i in range(n)
    ]


class TestFilterGameplay:
    def test_player_below_twenty_questions_removed(self):
        records = _plays_for("small", 19)
        assert filter_gameplay(records) == []

    def test_first_play_kept(self):
        older = make_play(uid="u", qid="q0", date="2015-01-01T00:00:00+00:00", result=False)
        newer = make_play(uid="u", qid="q0", date="2015-06-01T00:00:00+00:00", result=True)
        padding = _plays_for("u", 20, start_day=2)
        kept = filter_gameplay([newer, older] + padding)
        q0 = [r for r in kept if r.qid == "q0"]
        assert len(q0) == 1 and q0[0].result is False

    def test_exactly_twenty_distinct_questions_survive(self):
        records = []
        for p in range(25):
            records.extend(_plays_for(f"player{p:02d}", 20))
        assert filter_gameplay(records) == filter_gameplay(records)
        assert len(filter_gameplay(records)) == 25 * 20

    def test_idempotent(self):
        records = _plays_for("a", 30) + _plays_for("b", 5) + [
            make_play(uid="a", qid="q3", date="2020-01-01T00:00:00+00:00")
        ]
        once = filter_gameplay(records)
        assert filter_gameplay(once) == once

    @given(
        st.lists(
            st.tuples(st.integers(0, 3), st.integers(0, 40), st.integers(0, 50)),
            max_size=120,
        )
    )
    @settings(max_examples=50)
    def test_postconditions(self, raw):
        records = [
            make_play(uid=f"u{u}", qid=f"q{q}", date=f"2015-02-01T00:00:{s % 60:02d}+00:00")
            for u, q, s in raw
        ]
        kept = filter_gameplay(records)
        by_player = {}
        for record in kept:
            by_player.setdefault(record.uid, []).append(record.qid)
        for qids in by_player.values():
            assert len(qids) >= 20
            assert len(set(qids)) == len(qids)
        assert filter_gameplay(kept) == kept


class TestDedupQuestions:
    def test_same_event_collapses_to_smallest_id(self):
        a = make_question(qanta_id=5, text="Same text here.", tournament="ACF Fall", year=2014)
        b = make_question(qanta_id=3, text="Same text here.", tournament="ACF Fall", year=2014)
        survivors = dedup_questions([a, b])
        assert [q.qanta_id for q in survivors] == [3]

    def test_different_years_kept(self):
        a = make_question(qanta_id=1, text="Same text here.", year=2014)
        b = make_question(qanta_id=2, text="Same text here.", year=2015)
        assert len(dedup_questions([a, b])) == 2

    def test_whitespace_and_punctuation_normalized(self):
        a = make_question(qanta_id=1, text="Same   text here. ")
        b = make_question(qanta_id=2, text="Same text here.")
        assert len(dedup_questions([a, b])) == 1

    def test_pipeline_deterministic(self):
        questions = [
            make_question(qanta_id=i, text=f"Question number {i % 4} body.", year=2010)
            for i in range(10)
        ]
        assert dedup_questions(questions) == dedup_questions(list(reversed(questions)))

    def test_load_dedup_write_is_byte_identical(self, tmp_path):
        from tossup.corpus import write_questions

        source = tmp_path / "source.jsonl"
        rows = [
            {"qanta_id": 3, "text": "Alpha beta. Gamma delta.", "answer": "X",
             "tournament": "Open", "year": 2011},
            {"qanta_id": 1, "text": "Alpha  beta. Gamma delta.", "answer": "X",
             "tournament": "Open", "year": 2011},
            {"qanta_id": 2, "text": "Something else entirely.", "answer": "Y",
             "tournament": "Open", "year": 2011},
        ]
        source.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
        outputs = []
        for run in range(2):
            out = tmp_path / f"out{run}.jsonl"
            write_questions(dedup_questions(load_questions(source)), out)
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]


class TestCorpusStore:
    def test_gameplay_linked_by_proto_id(self):
        q = make_question(qanta_id=1, proto_id="p1")
        plays = [make_play(qid="p1"), make_play(qid="missing")]
        store = CorpusStore.build([q], plays)
        assert len(store.gameplay_by_question[1]) == 1
        assert len(store.orphans) == 1
        assert store.has_gameplay(1)

    def test_ambiguous_proto_id_goes_to_orphans(self):
        a = make_question(qanta_id=1, proto_id="dup")
        b = make_question(qanta_id=2, proto_id="dup", text="Other text.")
        store = CorpusStore.build([a, b], [make_play(qid="dup")])
        assert store.orphans and not store.gameplay_by_question
