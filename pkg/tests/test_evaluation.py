import json
import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ticketrec.corpus import Corpus
from ticketrec.errors import DataError, EvaluationError
from ticketrec.evaluation import (
    CardPosition,
    EvalReportRow,
    EvalSubgroup,
    REFERENCE_RESULTS,
    RelevanceJudgment,
    at_least_one_accuracy,
    build_report,
    evaluate_technique,
    ground_truth,
    load_positions,
    load_positions_dir,
    make_eval_subgroups,
    precision,
    render_report_text,
)
from ticketrec.index import RetrievalResult, ScoredCandidate
from ticketrec.techniques.base import Technique

from conftest import make_ticket


def result_of(query_id, ids):
    return RetrievalResult(
        items=[ScoredCandidate(i, 1.0) for i in ids], query_id=query_id
    )


def judgment(query_id, relevant, subgroup=0):
    return RelevanceJudgment(query_id, frozenset(relevant), subgroup)


class TestLoadPositions:
    def write(self, path, rows, header="external_id,x,y"):
        path.write_text(header + "\n" + "\n".join(rows) + ("\n" if rows else ""))
        return path

    def test_three_files_of_hundred(self, tmp_path):
        for group in range(3):
            rows = [f"S{group}C{i},{i}.0,{group}.0" for i in range(100)]
            self.write(tmp_path / f"subgroup_{group}.csv", rows)
        by_subgroup = load_positions_dir(tmp_path)
        assert sorted(by_subgroup) == [0, 1, 2]
        assert sum(len(v) for v in by_subgroup.values()) == 300

    def test_empty_file_gives_empty_list(self, tmp_path):
        path = tmp_path / "subgroup_0.csv"
        path.write_text("")
        assert load_positions(path) == []
        assert load_positions(self.write(tmp_path / "subgroup_1.csv", [])) == []

    def test_duplicate_id_rejected(self, tmp_path):
        path = self.write(tmp_path / "subgroup_0.csv", ["A,0,0", "A,1,1"])
        with pytest.raises(DataError, match="duplicate"):
            load_positions(path)

    def test_malformed_row_names_row_number(self, tmp_path):
        path = self.write(tmp_path / "subgroup_0.csv", ["A,0,0", "B,zero,0"])
        with pytest.raises(DataError, match="row 3"):
            load_positions(path)

    def test_bad_header_rejected(self, tmp_path):
        path = self.write(tmp_path / "subgroup_0.csv", ["A,0,0"], header="id,a,b")
        with pytest.raises(DataError, match="header"):
            load_positions(path)

    def test_subgroup_from_stem(self, tmp_path):
        path = self.write(tmp_path / "board 2.csv", ["A,0,0"])
        assert load_positions(path)[0].subgroup == 2

    def test_subgroup_column_wins(self, tmp_path):
        path = self.write(
            tmp_path / "subgroup_0.csv", ["A,0,0,1"], header="external_id,x,y,subgroup"
        )
        assert load_positions(path)[0].subgroup == 1

    def test_unusual_size_warns(self, tmp_path, caplog):
        path = self.write(tmp_path / "subgroup_0.csv", ["A,0,0", "B,1,1"])
        with caplog.at_level(logging.WARNING):
            load_positions(path)
        assert any("expected 100" in r.message for r in caplog.records)

    def test_missing_dir_rejected(self, tmp_path):
        with pytest.raises(DataError):
            load_positions_dir(tmp_path / "nothing")


def brute_force_nearest(positions, query, n=5):
    """Oracle: all-pairs squared distances, full sort, explicit tie key."""
    rows = []
    for other in positions:
        if other.external_id == query.external_id:
            continue
        dx = other.x - query.x
        dy = other.y - query.y
        rows.append((dx * dx + dy * dy, other.external_id))
    rows.sort()
    return frozenset(external_id for _, external_id in rows[:n])


class TestGroundTruth:
    def line_layout(self):
        xs = [0, 1, 2, 3, 4, 5, 10]
        return [CardPosition(f"c{i}", float(x), 0.0, 0) for i, x in enumerate(xs)]

    def test_line_of_cards(self):
        judgments = {j.query_id: j for j in ground_truth(self.line_layout())}
        assert judgments["c0"].relevant_ids == {"c1", "c2", "c3", "c4", "c5"}

    def test_translation_invariance(self):
        base = self.line_layout()
        shifted = [
            CardPosition(p.external_id, p.x + 1000.0, p.y - 250.0, p.subgroup)
            for p in base
        ]
        assert [j.relevant_ids for j in ground_truth(base)] == [
            j.relevant_ids for j in ground_truth(shifted)
        ]

    def test_tie_breaks_toward_smaller_id(self):
        positions = [
            CardPosition("q", 0.0, 0.0, 0),
            CardPosition("b", 1.0, 0.0, 0),
            CardPosition("a", -1.0, 0.0, 0),
            CardPosition("d", 0.0, 1.0, 0),
            CardPosition("c", 0.0, -1.0, 0),
            CardPosition("e", 2.0, 0.0, 0),
            CardPosition("f", 3.0, 0.0, 0),
        ]
        judgments = {j.query_id: j for j in ground_truth(positions)}
        # five equidistant-or-nearer: a,b,c,d at distance 1, then e at 2.
        assert judgments["q"].relevant_ids == {"a", "b", "c", "d", "e"}

    def test_exact_tie_for_last_slot(self):
        # g and h both at distance 2; only one slot left -> "g" wins.
        positions = [
            CardPosition("q", 0.0, 0.0, 0),
            CardPosition("a", 0.1, 0.0, 0),
            CardPosition("b", 0.2, 0.0, 0),
            CardPosition("c", 0.3, 0.0, 0),
            CardPosition("d", 0.4, 0.0, 0),
            CardPosition("h", 2.0, 0.0, 0),
            CardPosition("g", -2.0, 0.0, 0),
        ]
        judgments = {j.query_id: j for j in ground_truth(positions)}
        assert judgments["q"].relevant_ids == {"a", "b", "c", "d", "g"}

    def test_too_few_cards_rejected(self):
        with pytest.raises(DataError):
            ground_truth(self.line_layout()[:5])

    def test_mixed_subgroups_rejected(self):
        positions = self.line_layout()
        positions[0] = CardPosition("c0", 0.0, 0.0, 1)
        with pytest.raises(DataError):
            ground_truth(positions)

    def test_never_contains_the_query(self):
        for j in ground_truth(self.line_layout()):
            assert j.query_id not in j.relevant_ids
            assert len(j.relevant_ids) == 5

    @settings(max_examples=60)
    @given(st.integers(0, 2**31), st.booleans())
    def test_matches_brute_force_oracle(self, seed, integer_grid):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(6, 30))
        if integer_grid:  # force exact distance ties
            coordinates = rng.integers(0, 4, size=(n, 2)).astype(float)
        else:
            coordinates = rng.uniform(0, 100, size=(n, 2))
        positions = [
            CardPosition(f"p{i:02d}", float(x), float(y), 0)
            for i, (x, y) in enumerate(coordinates)
        ]
        for j in ground_truth(positions):
            query = next(p for p in positions if p.external_id == j.query_id)
            assert j.relevant_ids == brute_force_nearest(positions, query)

    def test_relevance_is_not_symmetric(self):
        # c5 is nearest to c6, but c6 is not among c5's five nearest.
        judgments = {j.query_id: j for j in ground_truth(self.line_layout())}
        assert "c5" in judgments["c6"].relevant_ids
        assert "c6" not in judgments["c5"].relevant_ids


class TestMetrics:
    def test_perfect_retrieval(self):
        judgments = [judgment("q1", {"a", "b", "c", "d", "e"})]
        results = {"q1": result_of("q1", ["a", "b", "c", "d", "e"])}
        assert precision(judgments, results) == 1.0
        assert at_least_one_accuracy(judgments, results) == 1.0

    def test_total_miss(self):
        judgments = [judgment("q1", {"a", "b", "c", "d", "e"})]
        results = {"q1": result_of("q1", ["v", "w", "x", "y", "z"])}
        assert precision(judgments, results) == 0.0
        assert at_least_one_accuracy(judgments, results) == 0.0

    def test_two_of_five(self):
        judgments = [judgment("q1", {"a", "b", "c", "d", "e"})]
        results = {"q1": result_of("q1", ["a", "b", "x", "y", "z"])}
        assert precision(judgments, results) == pytest.approx(0.4)

    def test_single_relevant_among_five_counts_as_hit(self):
        judgments = [judgment("broken mouse", {"mouse not working", "m2", "m3", "m4", "m5"})]
        retrieved = [
            "lost my mouse",
            "mouse not working",
            "cant log in",
            "air conditioner too cold",
            "password recovery",
        ]
        results = {"broken mouse": result_of("broken mouse", retrieved)}
        assert at_least_one_accuracy(judgments, results) == 1.0
        assert precision(judgments, results) == pytest.approx(0.2)

    def test_three_of_four_queries_hit(self):
        judgments = [judgment(f"q{i}", {f"r{i}"}) for i in range(4)]
        results = {
            "q0": result_of("q0", ["r0"]),
            "q1": result_of("q1", ["r1"]),
            "q2": result_of("q2", ["r2"]),
            "q3": result_of("q3", ["zz"]),
        }
        assert at_least_one_accuracy(judgments, results) == 0.75

    def test_missing_result_rejected(self):
        with pytest.raises(DataError, match="q1"):
            precision([judgment("q1", {"a"})], {})

    def test_metrics_ignore_recommendation_order(self):
        judgments = [judgment("q1", {"a", "b", "c", "d", "e"})]
        forward = {"q1": result_of("q1", ["a", "b", "x", "y", "z"])}
        backward = {"q1": result_of("q1", ["z", "y", "x", "b", "a"])}
        assert precision(judgments, forward) == precision(judgments, backward)
        assert at_least_one_accuracy(judgments, forward) == at_least_one_accuracy(
            judgments, backward
        )

    @settings(max_examples=150)
    @given(st.data())
    def test_algebra_and_precision_equals_recall(self, data):
        ids = [f"d{i}" for i in range(12)]
        n_queries = data.draw(st.integers(1, 6))
        judgments, results = [], {}
        for q in range(n_queries):
            relevant = data.draw(
                st.sets(st.sampled_from(ids), min_size=5, max_size=5)
            )
            recommended = data.draw(
                st.lists(st.sampled_from(ids), min_size=5, max_size=5, unique=True)
            )
            judgments.append(judgment(f"q{q}", relevant))
            results[f"q{q}"] = result_of(f"q{q}", recommended)
        p = precision(judgments, results)
        a = at_least_one_accuracy(judgments, results)
        assert p <= a + 1e-12
        assert a <= min(1.0, 5.0 * p) + 1e-12
        recall = sum(
            len(j.relevant_ids & set(results[j.query_id].ids())) / len(j.relevant_ids)
            for j in judgments
        ) / len(judgments)
        assert p == pytest.approx(recall, abs=1e-12)

    def test_judgment_cannot_contain_its_query(self):
        with pytest.raises(DataError):
            judgment("q", {"q", "a"})


class OracleTechnique(Technique):
    """Answers every query with a fixed id list; for harness plumbing tests."""

    family = "oracle"
    kind = "vector"

    def __init__(self, answers):
        super().__init__("oracle")
        self.answers = answers

    def fit(self, train):
        pass

    def represent(self, text, key=None):
        return np.zeros(1)

    def pair_score(self, query_repr, doc_repr):
        return 0.0

    def rank(self, query_repr, candidates, k, query_id=None):
        ids = self.answers[query_id]
        return RetrievalResult(
            items=[ScoredCandidate(i, 0.0) for i in ids], query_id=query_id
        )

    def payload(self):
        return {}

    @classmethod
    def from_payload(cls, name, payload):
        raise NotImplementedError


def grid_subgroup(group, n=8):
    tickets = [make_ticket(f"g{group}t{i}", f"title {i}", "desc") for i in range(n)]
    positions = [CardPosition(t.external_id, float(i), 0.0, group) for i, t in enumerate(tickets)]
    return tickets, positions


class TestEvaluateTechnique:
    def test_oracle_technique_is_perfect(self):
        tickets, positions = grid_subgroup(0)
        judgments = ground_truth(positions)
        answers = {j.query_id: sorted(j.relevant_ids) for j in judgments}
        subgroup = EvalSubgroup(0, tickets, judgments)
        row = evaluate_technique(OracleTechnique(answers), [subgroup])
        assert row.precision == 1.0 and row.accuracy_alo == 1.0
        assert row.time_ms_per_100 > 0.0

    def test_subgroup_averaging_is_unweighted(self):
        tickets_a, positions_a = grid_subgroup(0)
        tickets_b, positions_b = grid_subgroup(1)
        judgments_a = ground_truth(positions_a)
        judgments_b = ground_truth(positions_b)
        answers = {j.query_id: sorted(j.relevant_ids) for j in judgments_a}
        # subgroup b: always miss
        answers.update({j.query_id: ["zz1", "zz2"] for j in judgments_b})
        row = evaluate_technique(
            OracleTechnique(answers),
            [EvalSubgroup(0, tickets_a, judgments_a), EvalSubgroup(1, tickets_b, judgments_b)],
        )
        assert row.precision == pytest.approx(0.5)
        assert row.accuracy_alo == pytest.approx(0.5)

    def test_loader_is_called_per_subgroup(self):
        tickets, positions = grid_subgroup(0)
        judgments = ground_truth(positions)
        answers = {j.query_id: sorted(j.relevant_ids) for j in judgments}
        calls = []

        def loader():
            calls.append(1)
            return OracleTechnique(answers)

        evaluate_technique(loader, [EvalSubgroup(0, tickets, judgments)] * 3)
        assert len(calls) == 3

    def test_technique_error_annotated_with_query(self):
        tickets, positions = grid_subgroup(0)
        judgments = ground_truth(positions)

        class Exploding(OracleTechnique):
            def rank(self, query_repr, candidates, k, query_id=None):
                raise ValueError("boom")

        with pytest.raises(EvaluationError, match="g0t0"):
            evaluate_technique(Exploding({}), [EvalSubgroup(0, tickets, judgments)])

    def test_make_eval_subgroups_joins_corpus_and_positions(self):
        tickets, positions = grid_subgroup(0, n=8)
        corpus = Corpus(tickets)
        subgroups = make_eval_subgroups(corpus, {0: positions})
        assert len(subgroups) == 1
        assert len(subgroups[0].tickets) == 8
        assert len(subgroups[0].judgments) == 8

    def test_make_eval_subgroups_missing_ticket(self):
        tickets, positions = grid_subgroup(0)
        corpus = Corpus(tickets[:-1])
        with pytest.raises(DataError, match="not in corpus"):
            make_eval_subgroups(corpus, {0: positions})


class TestReport:
    def rows(self):
        return [
            EvalReportRow("tfidf", 0.69, 0.297, 672.0),
            EvalReportRow("bm25", 0.59, 0.237, 258.0),
            EvalReportRow("sbert-multilingual", 0.787, 0.351, 6411.0),
        ]

    def test_rows_sorted_by_name(self):
        report = build_report(self.rows())
        assert [r["technique"] for r in report["rows"]] == [
            "bm25",
            "sbert-multilingual",
            "tfidf",
        ]

    def test_reference_values_attached_on_request(self):
        report = build_report(self.rows(), include_reference=True)
        by_name = {r["technique"]: r for r in report["rows"]}
        reference = by_name["sbert-multilingual"]["paper_reference"]
        assert reference["accuracy_alo"] == pytest.approx(0.787)
        assert reference["precision"] == pytest.approx(0.351)
        assert "paper_reference" not in build_report(self.rows())["rows"][0]

    def test_unknown_technique_gets_no_reference(self):
        report = build_report([EvalReportRow("homebrew", 0.5, 0.2, 10.0)], include_reference=True)
        assert "paper_reference" not in report["rows"][0]

    def test_single_row(self):
        report = build_report(self.rows()[:1])
        assert len(report["rows"]) == 1

    def test_text_and_json_agree(self):
        report = build_report(self.rows(), include_reference=True)
        text = render_report_text(report)
        for row in report["rows"]:
            line = next(l for l in text.splitlines() if l.startswith(row["technique"]))
            assert f"{row['accuracy_alo'] * 100:.1f}%" in line
            assert f"{row['precision'] * 100:.1f}%" in line
        assert "78.7%" in text and "35.1%" in text

    def test_error_rows_rendered(self):
        report = build_report(self.rows()[:1], error_rows=[{"technique": "lda", "error": "kaput"}])
        assert any("error" in r for r in report["rows"])
        assert "kaput" in render_report_text(report)

    def test_round_trips_as_json(self):
        report = build_report(self.rows(), include_reference=True)
        assert json.loads(json.dumps(report)) == report

    def test_reference_table_is_complete(self):
        assert len(REFERENCE_RESULTS) == 12
        for values in REFERENCE_RESULTS.values():
            assert 0 < values["precision"] <= values["accuracy_alo"] <= 1
