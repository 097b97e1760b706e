"""Benchmark harness: ground truth from 2D card layouts, precision and
at-least-one accuracy per subgroup, timing, and the comparison report.

Ground truth for a query is the set of the 5 cards nearest to it in the
labeling plane. Metrics are computed per subgroup and averaged uniformly
across subgroups; the timing column is the mean wall-clock time of the
subgroup runs (model loading included, fitting excluded).
"""

from __future__ import annotations

import csv
import logging
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Union

from .corpus import Corpus, Ticket, query_text
from .errors import DataError, EvaluationError
from .index import RepresentationIndex, RetrievalResult
from .techniques.base import Technique

log = logging.getLogger(__name__)

EXPECTED_SUBGROUP_SIZE = 100
RECOMMENDATIONS_PER_QUERY = 5

# Published comparison numbers (accuracy_alo, precision as fractions;
# time in ms per 100 recommendations), attached to reports on request.
REFERENCE_RESULTS: dict[str, dict[str, float]] = {
    "bm25": {"accuracy_alo": 0.590, "precision": 0.237, "time_ms_per_100": 258},
    "bert-multilingual": {"accuracy_alo": 0.500, "precision": 0.172, "time_ms_per_100": 12781},
    "doc2vec": {"accuracy_alo": 0.273, "precision": 0.058, "time_ms_per_100": 933},
    "lda": {"accuracy_alo": 0.663, "precision": 0.209, "time_ms_per_100": 833},
    "random": {"accuracy_alo": 0.260, "precision": 0.055, "time_ms_per_100": 199},
    "sbert-english": {"accuracy_alo": 0.743, "precision": 0.301, "time_ms_per_100": 10601},
    "sbert-multilingual": {"accuracy_alo": 0.787, "precision": 0.351, "time_ms_per_100": 6411},
    "sbert-retrained": {"accuracy_alo": 0.787, "precision": 0.327, "time_ms_per_100": 6450},
    "expert": {"accuracy_alo": 0.427, "precision": 0.172, "time_ms_per_100": 1101},
    "tfidf": {"accuracy_alo": 0.690, "precision": 0.297, "time_ms_per_100": 672},
    "word2vec-english": {"accuracy_alo": 0.583, "precision": 0.234, "time_ms_per_100": 49298},
    "word2vec-retrained": {"accuracy_alo": 0.687, "precision": 0.262, "time_ms_per_100": 49590},
}


@dataclass(frozen=True)
class CardPosition:
    external_id: str
    x: float
    y: float
    subgroup: int


@dataclass(frozen=True)
class RelevanceJudgment:
    """Ground truth for one query: the ids of its 5 nearest cards."""

    query_id: str
    relevant_ids: frozenset[str]
    subgroup: int

    def __post_init__(self):
        if self.query_id in self.relevant_ids:
            raise DataError(f"query {self.query_id!r} is its own relevant document")


@dataclass(frozen=True)
class EvalReportRow:
    technique: str
    accuracy_alo: float
    precision: float
    time_ms_per_100: float


def _subgroup_from_stem(stem: str) -> int:
    match = re.search(r"(\d+)\s*$", stem)
    if not match:
        raise DataError(f"cannot read a subgroup number from file stem {stem!r}")
    return int(match.group(1))


def load_positions(path: str | Path, subgroup: Optional[int] = None) -> list[CardPosition]:
    """One subgroup's card positions from a CSV with header external_id,x,y
    (optionally a subgroup column); otherwise the file stem names the subgroup."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            return []
        header = [h.strip() for h in header]
        if header[:3] != ["external_id", "x", "y"] or header[3:] not in ([], ["subgroup"]):
            raise DataError(f"{path}: expected header external_id,x,y[,subgroup]")
        has_subgroup_column = header[3:] == ["subgroup"]
        positions: list[CardPosition] = []
        seen: set[str] = set()
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}: row {row_no}: expected {len(header)} fields")
            external_id = row[0].strip()
            if not external_id:
                raise DataError(f"{path}: row {row_no}: empty external_id")
            if external_id in seen:
                raise DataError(f"{path}: row {row_no}: duplicate id {external_id!r}")
            seen.add(external_id)
            try:
                x, y = float(row[1]), float(row[2])
            except ValueError:
                raise DataError(f"{path}: row {row_no}: non-numeric coordinate") from None
            if has_subgroup_column:
                try:
                    group = int(row[3])
                except ValueError:
                    raise DataError(f"{path}: row {row_no}: non-integer subgroup") from None
            elif subgroup is not None:
                group = subgroup
            else:
                group = _subgroup_from_stem(path.stem)
            positions.append(CardPosition(external_id, x, y, group))
    counts: dict[int, int] = {}
    for position in positions:
        counts[position.subgroup] = counts.get(position.subgroup, 0) + 1
    for group, count in sorted(counts.items()):
        if count != EXPECTED_SUBGROUP_SIZE:
            log.warning(
                "subgroup %d has %d cards, expected %d", group, count, EXPECTED_SUBGROUP_SIZE
            )
    return positions


def load_positions_dir(directory: str | Path) -> dict[int, list[CardPosition]]:
    """All ``*.csv`` files of a directory, one subgroup per file."""
    directory = Path(directory)
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise DataError(f"no positions CSV files in {directory}")
    by_subgroup: dict[int, list[CardPosition]] = {}
    for path in files:
        for position in load_positions(path):
            by_subgroup.setdefault(position.subgroup, []).append(position)
    return by_subgroup


def ground_truth(positions: list[CardPosition]) -> list[RelevanceJudgment]:
    """For every card, the 5 nearest other cards by Euclidean distance;
    distance ties break toward the lexicographically smaller id."""
    if len(positions) < RECOMMENDATIONS_PER_QUERY + 1:
        raise DataError(
            f"need at least {RECOMMENDATIONS_PER_QUERY + 1} cards, got {len(positions)}"
        )
    groups = {p.subgroup for p in positions}
    if len(groups) != 1:
        raise DataError(f"positions span multiple subgroups: {sorted(groups)}")
    judgments = []
    for query in positions:
        ranked = sorted(
            (
                ((other.x - query.x) ** 2 + (other.y - query.y) ** 2, other.external_id)
                for other in positions
                if other.external_id != query.external_id
            ),
        )
        nearest = frozenset(pid for _, pid in ranked[:RECOMMENDATIONS_PER_QUERY])
        judgments.append(
            RelevanceJudgment(query.external_id, nearest, query.subgroup)
        )
    return judgments


def _per_query_hits(
    judgments: list[RelevanceJudgment],
    results: dict[str, RetrievalResult],
) -> list[tuple[int, int]]:
    """(hits, recommended) per judgment; missing results are an error."""
    if not judgments:
        raise DataError("no judgments to evaluate")
    pairs = []
    for judgment in judgments:
        if judgment.query_id not in results:
            raise DataError(f"no result for query {judgment.query_id!r}")
        recommended = results[judgment.query_id].ids()
        hits = len(judgment.relevant_ids & set(recommended))
        pairs.append((hits, len(recommended)))
    return pairs


def precision(
    judgments: list[RelevanceJudgment], results: dict[str, RetrievalResult]
) -> float:
    """Mean over queries of |relevant ∩ recommended| / |recommended|."""
    pairs = _per_query_hits(judgments, results)
    return sum(hits / n for hits, n in pairs if n > 0) / len(pairs)


def at_least_one_accuracy(
    judgments: list[RelevanceJudgment], results: dict[str, RetrievalResult]
) -> float:
    """Fraction of queries whose recommendations contain any relevant id."""
    pairs = _per_query_hits(judgments, results)
    return sum(1 for hits, _ in pairs if hits > 0) / len(pairs)


@dataclass
class EvalSubgroup:
    subgroup: int
    tickets: list[Ticket]  # oldest first; insertion order defines recency
    judgments: list[RelevanceJudgment]


def make_eval_subgroups(
    corpus: Corpus, positions_by_subgroup: dict[int, list[CardPosition]]
) -> list[EvalSubgroup]:
    """Join the labeled positions with their tickets and derive ground truth."""
    oldest_first = list(reversed(corpus.newest_first()))
    subgroups = []
    for group in sorted(positions_by_subgroup):
        positions = positions_by_subgroup[group]
        wanted = {p.external_id for p in positions}
        missing = sorted(wanted - set(corpus.id_index))
        if missing:
            raise DataError(f"subgroup {group}: ticket(s) not in corpus: {missing[:5]}")
        tickets = [t for t in oldest_first if t.external_id in wanted]
        subgroups.append(
            EvalSubgroup(
                subgroup=group, tickets=tickets, judgments=ground_truth(positions)
            )
        )
    return subgroups


TechniqueSource = Union[Technique, Callable[[], Technique]]


def _run_subgroup(
    source: TechniqueSource, sg: EvalSubgroup, k: int
) -> tuple[dict[str, RetrievalResult], float, str]:
    """One timed subgroup pass: load the technique, represent every ticket,
    recommend for every query against its subgroup peers."""
    start = time.perf_counter()
    technique = source() if callable(source) else source
    index = RepresentationIndex(technique.kind)
    texts = {}
    for ticket in sg.tickets:
        text = query_text(ticket)
        texts[ticket.external_id] = text
        try:
            index.insert(ticket.external_id, technique.represent(text, key=ticket.external_id))
        except Exception as exc:
            raise EvaluationError(f"representing {ticket.external_id!r}: {exc}") from exc
    results: dict[str, RetrievalResult] = {}
    for ticket in sg.tickets:
        candidates = index.candidates(exclude=ticket.external_id)
        try:
            results[ticket.external_id] = technique.recommend(
                texts[ticket.external_id], ticket.external_id, candidates, k
            )
        except Exception as exc:
            raise EvaluationError(f"query {ticket.external_id!r}: {exc}") from exc
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return results, elapsed_ms, technique.name


def evaluate_technique(
    source: TechniqueSource,
    subgroups: list[EvalSubgroup],
    k: int = RECOMMENDATIONS_PER_QUERY,
    name: Optional[str] = None,
) -> EvalReportRow:
    """Run the full benchmark for one technique.

    ``source`` is either a fitted technique or a zero-argument loader;
    passing a loader puts model loading inside the timed span, matching
    the reported time-per-100-recommendations definition.
    """
    if not subgroups:
        raise DataError("no subgroups to evaluate")
    precisions, accuracies, timings = [], [], []
    resolved_name = name
    for sg in subgroups:
        results, elapsed_ms, technique_name = _run_subgroup(source, sg, k)
        resolved_name = resolved_name or technique_name
        precisions.append(precision(sg.judgments, results))
        accuracies.append(at_least_one_accuracy(sg.judgments, results))
        timings.append(elapsed_ms)
    n = len(subgroups)
    return EvalReportRow(
        technique=resolved_name or "unnamed",
        accuracy_alo=sum(accuracies) / n,
        precision=sum(precisions) / n,
        time_ms_per_100=sum(timings) / n,
    )


def build_report(
    rows: list[EvalReportRow],
    include_reference: bool = False,
    error_rows: Optional[list[dict]] = None,
) -> dict:
    """Machine-readable report: {"rows": [...]} sorted by technique name."""
    if not rows and not error_rows:
        raise DataError("report needs at least one row")
    documents = []
    for row in rows:
        document: dict = {
            "technique": row.technique,
            "accuracy_alo": row.accuracy_alo,
            "precision": row.precision,
            "time_ms_per_100": row.time_ms_per_100,
        }
        if include_reference and row.technique in REFERENCE_RESULTS:
            document["paper_reference"] = dict(REFERENCE_RESULTS[row.technique])
        documents.append(document)
    for error_row in error_rows or []:
        documents.append({"technique": error_row["technique"], "error": error_row["error"]})
    documents.sort(key=lambda d: d["technique"])
    return {"rows": documents}


def render_report_text(report: dict) -> str:
    """Aligned, human-readable rendering of :func:`build_report` output."""
    has_reference = any("paper_reference" in row for row in report["rows"])
    header = ["technique", "accuracy_alo", "precision", "time_ms"]
    if has_reference:
        header += ["ref_accuracy_alo", "ref_precision", "ref_time_ms"]
    table = [header]
    for row in report["rows"]:
        if "error" in row:
            table.append([row["technique"], "ERROR: " + row["error"], "", ""])
            continue
        rendered = [
            row["technique"],
            f"{row['accuracy_alo'] * 100:.1f}%",
            f"{row['precision'] * 100:.1f}%",
            f"{row['time_ms_per_100']:g}",
        ]
        if has_reference:
            reference = row.get("paper_reference")
            if reference:
                rendered += [
                    f"{reference['accuracy_alo'] * 100:.1f}%",
                    f"{reference['precision'] * 100:.1f}%",
                    f"{reference['time_ms_per_100']:g}",
                ]
            else:
                rendered += ["-", "-", "-"]
        table.append(rendered)
    widths = [max(len(row[i]) if i < len(row) else 0 for row in table) for i in range(len(header))]
    lines = []
    for row in table:
        cells = [
            (row[i] if i < len(row) else "").ljust(widths[i]) if i == 0
            else (row[i] if i < len(row) else "").rjust(widths[i])
            for i in range(len(header))
        ]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"
