import json
from datetime import datetime, timezone

import pytest
from hypothesis import given, strategies as st

from ticketrec.corpus import (
    Corpus,
    RedactionRule,
    Ticket,
    load_redaction_rules,
    load_tickets,
    parse_timestamp,
    query_text,
    redact,
    redact_ticket,
    save_tickets,
    split_train_eval,
    ticket_to_record,
)
from ticketrec.errors import ConfigError, DataError

from conftest import make_corpus, make_ticket, write_jsonl


class TestLoadTickets:
    def test_loads_labeled_set_size(self, tmp_path):
        records = [
            {"external_id": f"T{i}", "title": f"issue {i}", "description": "text"}
            for i in range(300)
        ]
        path = write_jsonl(tmp_path / "tickets.jsonl", records)
        corpus = load_tickets(path)
        assert len(corpus) == 300

    def test_empty_file_gives_empty_corpus(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        assert len(load_tickets(path)) == 0

    def test_duplicate_id_names_the_id(self, tmp_path):
        records = [
            {"external_id": "ABC123456", "title": "a", "description": "b"},
            {"external_id": "ABC123456", "title": "c", "description": "d"},
        ]
        path = write_jsonl(tmp_path / "dup.jsonl", records)
        with pytest.raises(DataError, match="ABC123456"):
            load_tickets(path)

    def test_malformed_line_names_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"external_id": "A", "title": "t", "description": "d"}\n{oops\n')
        with pytest.raises(DataError, match="line 2"):
            load_tickets(path)

    def test_missing_required_field(self, tmp_path):
        path = write_jsonl(tmp_path / "m.jsonl", [{"external_id": "A", "title": "t"}])
        with pytest.raises(DataError, match="description"):
            load_tickets(path)

    def test_unknown_field_rejected(self, tmp_path):
        path = write_jsonl(
            tmp_path / "u.jsonl",
            [{"external_id": "A", "title": "t", "description": "d", "severity": 1}],
        )
        with pytest.raises(DataError, match="severity"):
            load_tickets(path)

    def test_full_record_round_trips(self, tmp_path):
        record = {
            "external_id": "ABC123456",
            "title": "File Access",
            "description": "Good morning. I need access to a colleague's files. Thank you",
            "category": "Fileservice",
            "date_open": "2022-01-01 10:23:19.000",
            "date_close": "2022-01-02 09:15:56.000",
            "location": "BRLM",
            "solution": "The client gained access and copied the files",
            "analysts": "first-level team",
        }
        path = write_jsonl(tmp_path / "one.jsonl", [record])
        corpus = load_tickets(path)
        ticket = corpus.get("ABC123456")
        assert ticket.category == "Fileservice"
        assert ticket.date_open == datetime(2022, 1, 1, 10, 23, 19)

        out = tmp_path / "resaved.jsonl"
        save_tickets(corpus, out)
        assert load_tickets(out) == corpus

    def test_round_trip_preserves_unicode_and_absent_fields(self, tmp_path):
        corpus = Corpus(
            [
                make_ticket("U1", "Zurück", "drücken Sie die Taste"),
                make_ticket("U2", "ação", "não funciona", category="Telecom"),
            ]
        )
        path = tmp_path / "u.jsonl"
        save_tickets(corpus, path)
        reloaded = load_tickets(path)
        assert reloaded == corpus
        assert reloaded.get("U1").category is None

    def test_unsupported_format(self, tmp_path):
        with pytest.raises(ConfigError):
            load_tickets(tmp_path / "x.csv", format="csv")


class TestTimestamps:
    def test_space_separator_and_millis(self):
        assert parse_timestamp("2022-01-01 10:23:19.000") == datetime(2022, 1, 1, 10, 23, 19)

    def test_zulu_suffix(self):
        parsed = parse_timestamp("2022-01-01T10:00:00Z")
        assert parsed.tzinfo == timezone.utc

    def test_garbage_rejected(self):
        with pytest.raises(DataError):
            parse_timestamp("last tuesday")

    def test_newest_first_uses_ingestion_as_tiebreak(self):
        same = datetime(2022, 5, 1)
        corpus = Corpus(
            [
                make_ticket("A", date_open=same),
                make_ticket("B", date_open=same),
                make_ticket("C", date_open=datetime(2022, 6, 1)),
            ]
        )
        assert [t.external_id for t in corpus.newest_first()] == ["C", "B", "A"]


class TestQueryText:
    def test_concatenates_title_and_description(self):
        ticket = make_ticket("ABC123456", "File Access", "Good morning. I need access.")
        assert query_text(ticket) == "File Access Good morning. I need access."

    def test_empty_title(self):
        assert query_text(make_ticket("A", "", "x")) == " x"

    def test_empty_description(self):
        assert query_text(make_ticket("A", "a", "")) == "a "


NAME_RULE = RedactionRule(pattern=r"Leonardo(\s+Benitez)?", tag="[NAME]")
EMAIL_RULE = RedactionRule(
    pattern=r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}", tag="[EMAIL]"
)


class TestRedaction:
    def test_name_rule(self):
        text = "this text was written by Leonardo"
        assert redact(text, [NAME_RULE]) == "this text was written by [NAME]"

    def test_no_match_is_identity(self):
        assert redact("nothing secret here", [NAME_RULE]) == "nothing secret here"

    def test_email_rule_replaces_every_match(self):
        assert redact("mail a@b.com and c@d.org", [EMAIL_RULE]) == "mail [EMAIL] and [EMAIL]"

    def test_rules_apply_in_list_order(self):
        first = RedactionRule(pattern=r"alpha beta", tag="[BOTH]")
        second = RedactionRule(pattern=r"alpha", tag="[ONE]")
        assert redact("alpha beta", [first, second]) == "[BOTH]"
        assert redact("alpha beta", [second, first]) == "[ONE] beta"

    def test_bad_pattern_fails_at_construction(self):
        with pytest.raises(ConfigError):
            RedactionRule(pattern="(", tag="[X]")

    def test_bad_tag_rejected(self):
        with pytest.raises(ConfigError):
            RedactionRule(pattern="x", tag="NAME")
        with pytest.raises(ConfigError):
            RedactionRule(pattern="x", tag="[name]")

    def test_rules_file(self, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text(json.dumps([{"pattern": "cat", "tag": "[ANIMAL]"}]))
        rules = load_redaction_rules(path)
        assert redact("a cat", rules) == "a [ANIMAL]"

    def test_rules_file_bad_shape(self, tmp_path):
        path = tmp_path / "rules.json"
        path.write_text(json.dumps([{"pattern": "x"}]))
        with pytest.raises(ConfigError):
            load_redaction_rules(path)

    def test_redact_ticket_touches_text_fields_only(self):
        ticket = make_ticket(
            "A", "from Leonardo", "Leonardo wrote this", solution="ask Leonardo"
        )
        scrubbed = redact_ticket(ticket, [NAME_RULE])
        assert scrubbed.title == "from [NAME]"
        assert scrubbed.description == "[NAME] wrote this"
        assert scrubbed.solution == "ask [NAME]"
        assert scrubbed.external_id == "A"

    @given(st.text(max_size=200))
    def test_idempotent_when_tags_unmatchable(self, text):
        rules = [EMAIL_RULE, NAME_RULE]
        once = redact(text, rules)
        assert redact(once, rules) == once


class TestSplit:
    def test_partition_counts(self):
        corpus = make_corpus(56)
        eval_ids = {f"T{i:04d}" for i in range(6)}
        train, evaluation = split_train_eval(corpus, eval_ids)
        assert len(train) == 50 and len(evaluation) == 6
        assert set(train.ids()) | set(evaluation.ids()) == set(corpus.ids())
        assert set(train.ids()) & set(evaluation.ids()) == set()

    def test_empty_eval_ids(self):
        corpus = make_corpus(5)
        train, evaluation = split_train_eval(corpus, set())
        assert train == corpus and len(evaluation) == 0

    def test_all_eval_ids(self):
        corpus = make_corpus(5)
        train, evaluation = split_train_eval(corpus, set(corpus.ids()))
        assert len(train) == 0 and evaluation == corpus

    def test_unknown_id_named(self):
        corpus = make_corpus(3)
        with pytest.raises(DataError, match="NOPE"):
            split_train_eval(corpus, {"NOPE"})

    @given(st.integers(0, 30), st.sets(st.integers(0, 29)))
    def test_partition_property(self, n, picked):
        corpus = make_corpus(max(n, 1))
        eval_ids = {f"T{i:04d}" for i in picked if i < len(corpus)}
        train, evaluation = split_train_eval(corpus, eval_ids)
        assert len(train) + len(evaluation) == len(corpus)
        assert set(evaluation.ids()) == eval_ids
        assert not set(train.ids()) & eval_ids


class TestCorpusInvariants:
    def test_duplicate_rejected_at_construction(self):
        with pytest.raises(DataError):
            Corpus([make_ticket("X"), make_ticket("X")])

    def test_get_unknown(self):
        with pytest.raises(DataError):
            make_corpus(2).get("missing")

    def test_ticket_record_omits_absent(self):
        record = ticket_to_record(make_ticket("A"))
        assert "category" not in record and "date_close" not in record
