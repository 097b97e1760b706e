"""Ticket corpus: loading, validation, redaction and train/eval splitting.

The on-disk format is JSON-lines, one ticket object per line, UTF-8.
Optional fields are absent (or null) when unknown, never empty strings,
so "not yet closed" stays distinguishable from "closed with empty note".
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .errors import ConfigError, DataError

TICKET_FIELDS = (
    "external_id",
    "title",
    "description",
    "category",
    "date_open",
    "date_close",
    "location",
    "solution",
    "analysts",
)
_REQUIRED_FIELDS = ("external_id", "title", "description")
_DATE_FIELDS = ("date_open", "date_close")

_TAG_RE = re.compile(r"^\[[A-Z_]+\]$")


@dataclass(frozen=True)
class Ticket:
    """One support ticket record.

    Only ``external_id``, ``title`` and ``description`` are known when the
    ticket is opened; the remaining fields are added later (or never).
    """

    external_id: str
    title: str
    description: str
    category: Optional[str] = None
    date_open: Optional[datetime] = None
    date_close: Optional[datetime] = None
    location: Optional[str] = None
    solution: Optional[str] = None
    analysts: Optional[str] = None


def query_text(ticket: Ticket) -> str:
    """Text every technique works from: title and description concatenated."""
    return f"{ticket.title} {ticket.description}"


class Corpus:
    """Immutable, ordered collection of tickets with unique external ids."""

    def __init__(self, tickets: Iterable[Ticket]):
        self.tickets: list[Ticket] = list(tickets)
        self.id_index: dict[str, int] = {}
        for pos, ticket in enumerate(self.tickets):
            if ticket.external_id in self.id_index:
                raise DataError(f"duplicate external_id {ticket.external_id!r}")
            if not ticket.external_id:
                raise DataError("empty external_id")
            self.id_index[ticket.external_id] = pos

    def __len__(self) -> int:
        return len(self.tickets)

    def __iter__(self) -> Iterator[Ticket]:
        return iter(self.tickets)

    def __contains__(self, external_id: str) -> bool:
        return external_id in self.id_index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Corpus) and self.tickets == other.tickets

    def get(self, external_id: str) -> Ticket:
        try:
            return self.tickets[self.id_index[external_id]]
        except KeyError:
            raise DataError(f"unknown external_id {external_id!r}") from None

    def ids(self) -> list[str]:
        return [t.external_id for t in self.tickets]

    def newest_first(self) -> list[Ticket]:
        """Tickets in recency order: date_open descending, ingestion order
        as tie-break (later lines are considered more recent)."""
        order = sorted(
            range(len(self.tickets)),
            key=lambda i: (_sortable_instant(self.tickets[i].date_open), i),
            reverse=True,
        )
        return [self.tickets[i] for i in order]


def _sortable_instant(value: Optional[datetime]) -> float:
    # Naive timestamps are read as UTC so corpora mixing naive and
    # zone-aware dates still sort deterministically.
    if value is None:
        return float("-inf")
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.timestamp()


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp; a trailing Z is read as UTC."""
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        return datetime.fromisoformat(text)
    except ValueError as exc:
        raise DataError(f"bad timestamp {value!r}: {exc}") from None


def _ticket_from_record(record: dict, line_no: int) -> Ticket:
    unknown = set(record) - set(TICKET_FIELDS)
    if unknown:
        raise DataError(f"line {line_no}: unknown field(s) {sorted(unknown)}")
    for name in _REQUIRED_FIELDS:
        if name not in record or record[name] is None:
            raise DataError(f"line {line_no}: missing required field {name!r}")
        if not isinstance(record[name], str):
            raise DataError(f"line {line_no}: field {name!r} must be a string")
    kwargs: dict = {name: record[name] for name in _REQUIRED_FIELDS}
    for name in ("category", "location", "solution", "analysts"):
        value = record.get(name)
        if value is not None and not isinstance(value, str):
            raise DataError(f"line {line_no}: field {name!r} must be a string")
        kwargs[name] = value
    for name in _DATE_FIELDS:
        value = record.get(name)
        if value is None:
            kwargs[name] = None
            continue
        try:
            kwargs[name] = parse_timestamp(value)
        except DataError as exc:
            raise DataError(f"line {line_no}: {exc}") from None
    return Ticket(**kwargs)


def load_tickets(path: str | Path, format: str = "jsonl") -> Corpus:
    """Load a ticket corpus from disk, preserving ingestion order.

    Malformed lines and duplicate ids are reported with the offending
    line number / id rather than silently skipped.
    """
    if format != "jsonl":
        raise ConfigError(f"unsupported corpus format {format!r}")
    path = Path(path)
    tickets: list[Ticket] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"line {line_no}: malformed JSON ({exc.msg})") from None
            if not isinstance(record, dict):
                raise DataError(f"line {line_no}: expected a JSON object")
            ticket = _ticket_from_record(record, line_no)
            if ticket.external_id in seen:
                raise DataError(
                    f"line {line_no}: duplicate external_id {ticket.external_id!r}"
                )
            seen.add(ticket.external_id)
            tickets.append(ticket)
    return Corpus(tickets)


def _format_timestamp(value: datetime) -> str:
    return value.isoformat(sep=" ")


def ticket_to_record(ticket: Ticket) -> dict:
    """JSON-serializable record; absent optionals are omitted."""
    record: dict = {
        "external_id": ticket.external_id,
        "title": ticket.title,
        "description": ticket.description,
    }
    for name in ("category", "location", "solution", "analysts"):
        value = getattr(ticket, name)
        if value is not None:
            record[name] = value
    for name in _DATE_FIELDS:
        value = getattr(ticket, name)
        if value is not None:
            record[name] = _format_timestamp(value)
    return record


def save_tickets(corpus: Corpus, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for ticket in corpus:
            handle.write(json.dumps(ticket_to_record(ticket), ensure_ascii=False, sort_keys=True))
            handle.write("\n")


@dataclass(frozen=True)
class RedactionRule:
    """One PII scrubbing rule: a regular expression and its replacement tag."""

    pattern: str
    tag: str
    regex: re.Pattern = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not _TAG_RE.match(self.tag):
            raise ConfigError(f"bad redaction tag {self.tag!r}: expected [A-Z_]+ in brackets")
        try:
            compiled = re.compile(self.pattern)
        except re.error as exc:
            raise ConfigError(f"bad redaction pattern {self.pattern!r}: {exc}") from None
        object.__setattr__(self, "regex", compiled)


def load_redaction_rules(path: str | Path) -> list[RedactionRule]:
    """Rules file is a JSON array of {pattern, tag}; bad patterns fail here,
    never at apply time."""
    with Path(path).open(encoding="utf-8") as handle:
        raw = json.load(handle)
    if not isinstance(raw, list):
        raise ConfigError("redaction rules file must be a JSON array")
    rules = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict) or set(entry) != {"pattern", "tag"}:
            raise ConfigError(f"rule #{i}: expected an object with keys pattern, tag")
        rules.append(RedactionRule(entry["pattern"], entry["tag"]))
    return rules


def redact(text: str, rules: list[RedactionRule]) -> str:
    """Apply every rule in list order, replacing each match by the rule's tag."""
    for rule in rules:
        text = rule.regex.sub(lambda _m, t=rule.tag: t, text)
    return text


def redact_ticket(ticket: Ticket, rules: list[RedactionRule]) -> Ticket:
    """Redact the free-text fields of a ticket; ids and dates pass through."""
    replaced = {
        name: redact(value, rules)
        for name in ("title", "description", "category", "location", "solution", "analysts")
        if (value := getattr(ticket, name)) is not None
    }
    return Ticket(
        external_id=ticket.external_id,
        date_open=ticket.date_open,
        date_close=ticket.date_close,
        **replaced,
    )


def split_train_eval(corpus: Corpus, eval_ids: set[str]) -> tuple[Corpus, Corpus]:
    """Disjoint partition of the corpus by external id.

    Every id in ``eval_ids`` must exist; order within each half follows
    the original ingestion order.
    """
    unknown = sorted(eval_ids - set(corpus.id_index))
    if unknown:
        raise DataError(f"eval id(s) not in corpus: {', '.join(unknown)}")
    train = [t for t in corpus if t.external_id not in eval_ids]
    evaluation = [t for t in corpus if t.external_id in eval_ids]
    return Corpus(train), Corpus(evaluation)
