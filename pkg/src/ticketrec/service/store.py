"""Durable state for the prototype service: a bootstrap snapshot plus an
append-only journal of live tickets and feedback.

The snapshot is written once from the bootstrap corpus and is
deterministic byte-for-byte; everything that happens afterwards is one
JSON line in the journal, flushed on every append so a crash loses
nothing that was acknowledged.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np

from ..corpus import Corpus, Ticket, query_text, ticket_to_record, _ticket_from_record
from ..errors import DataError
from ..index import RepresentationIndex
from ..techniques.base import Technique
from ..techniques.bm25 import Bm25DocProfile

log = logging.getLogger(__name__)

SNAPSHOT_FILE = "snapshot.jsonl"
MANIFEST_FILE = "manifest.json"
TICKETS_FILE = "tickets.jsonl"
JOURNAL_FILE = "journal.jsonl"


@dataclass(frozen=True)
class FeedbackRecord:
    query_ticket_id: str
    recommended_ids: list[str]
    verdict: str  # helpful | not_helpful
    technique: str
    timestamp: str


@dataclass(frozen=True)
class BootstrapSummary:
    indexed: int
    failed: int


def serialize_representation(kind: str, representation: Any) -> dict:
    if kind == "vector":
        return {"values": [float(v) for v in representation]}
    if kind == "labels":
        return {"labels": sorted(representation)}
    if kind == "bm25":
        return {"counts": representation.counts, "length": representation.length}
    if kind == "random":
        return {}
    raise DataError(f"unknown representation kind {kind!r}")


def deserialize_representation(kind: str, record: dict) -> Any:
    if kind == "vector":
        return np.array(record["values"], dtype=float)
    if kind == "labels":
        return frozenset(record["labels"])
    if kind == "bm25":
        return Bm25DocProfile(counts=dict(record["counts"]), length=record["length"])
    if kind == "random":
        return None
    raise DataError(f"unknown representation kind {kind!r}")


class TicketStore:
    """In-memory view of the store directory, kept durable via the journal."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.index: RepresentationIndex = RepresentationIndex("vector")
        self.tickets: dict[str, Ticket] = {}
        self.feedback: list[FeedbackRecord] = []
        self.live_count = 0
        self.technique_name: Optional[str] = None
        self.kind: Optional[str] = None
        self._journal_handle = None
        self._append_lock = threading.Lock()

    # --- paths -------------------------------------------------------

    def _path(self, name: str) -> Path:
        return self.directory / name

    def has_snapshot(self) -> bool:
        return self._path(MANIFEST_FILE).exists()

    # --- bootstrap ---------------------------------------------------

    def bootstrap(self, corpus: Corpus, technique: Technique) -> BootstrapSummary:
        """Represent and index every corpus ticket, oldest first, then write
        the snapshot. Representation failures are skipped and counted."""
        self.directory.mkdir(parents=True, exist_ok=True)
        self.index = RepresentationIndex(technique.kind)
        self.tickets = {}
        self.feedback = []
        self.live_count = 0
        self.technique_name = technique.name
        self.kind = technique.kind
        failed = 0
        ordered = list(reversed(corpus.newest_first()))
        representations: list[tuple[Ticket, Any]] = []
        for ticket in ordered:
            try:
                representation = technique.represent(
                    query_text(ticket), key=ticket.external_id
                )
            except Exception as exc:
                failed += 1
                log.warning("skipping %s: %s", ticket.external_id, exc)
                continue
            representations.append((ticket, representation))
        for ticket, representation in representations:
            self.index.insert(ticket.external_id, representation)
            self.tickets[ticket.external_id] = ticket
        self._write_snapshot(representations)
        if failed:
            log.error("bootstrap finished with %d representation failure(s)", failed)
        return BootstrapSummary(indexed=len(representations), failed=failed)

    def _write_snapshot(self, representations: list[tuple[Ticket, Any]]) -> None:
        dim = None
        if self.kind == "vector" and representations:
            dim = int(len(representations[0][1]))
        manifest = {
            "technique": self.technique_name,
            "kind": self.kind,
            "dim": dim,
            "count": len(representations),
            "ids": [t.external_id for t, _ in representations],
        }
        self._atomic_write(
            MANIFEST_FILE, json.dumps(manifest, sort_keys=True, ensure_ascii=True) + "\n"
        )
        lines = [json.dumps({"provider": self.technique_name, "dim": dim}, sort_keys=True)]
        for ticket, representation in representations:
            record = {"external_id": ticket.external_id}
            record.update(serialize_representation(self.kind, representation))
            lines.append(json.dumps(record, sort_keys=True, ensure_ascii=True))
        self._atomic_write(SNAPSHOT_FILE, "\n".join(lines) + "\n")
        ticket_lines = [
            json.dumps(ticket_to_record(t), sort_keys=True, ensure_ascii=False)
            for t, _ in representations
        ]
        self._atomic_write(TICKETS_FILE, "\n".join(ticket_lines) + ("\n" if ticket_lines else ""))
        self._path(JOURNAL_FILE).touch()

    def _atomic_write(self, name: str, content: str) -> None:
        tmp = self._path(name + ".tmp")
        tmp.write_text(content, encoding="utf-8")
        tmp.replace(self._path(name))

    # --- load --------------------------------------------------------

    def load(self) -> None:
        """Rebuild in-memory state from snapshot plus journal replay."""
        manifest = json.loads(self._path(MANIFEST_FILE).read_text(encoding="utf-8"))
        self.technique_name = manifest["technique"]
        self.kind = manifest["kind"]
        self.index = RepresentationIndex(self.kind)
        self.tickets = {}
        self.feedback = []
        self.live_count = 0

        representations: dict[str, Any] = {}
        with self._path(SNAPSHOT_FILE).open(encoding="utf-8") as handle:
            handle.readline()  # header record
            for line in handle:
                if not line.strip():
                    continue
                record = json.loads(line)
                representations[record["external_id"]] = deserialize_representation(
                    self.kind, record
                )
        with self._path(TICKETS_FILE).open(encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                ticket = _ticket_from_record(json.loads(line), line_no)
                self.tickets[ticket.external_id] = ticket
        for external_id in manifest["ids"]:
            if external_id not in representations:
                raise DataError(f"snapshot is missing representation for {external_id!r}")
            self.index.insert(external_id, representations[external_id])

        journal = self._path(JOURNAL_FILE)
        if journal.exists():
            with journal.open(encoding="utf-8") as handle:
                for line in handle:
                    if not line.strip():
                        continue
                    self._apply_journal_entry(json.loads(line))

    def _apply_journal_entry(self, entry: dict) -> None:
        if entry["type"] == "ticket":
            ticket = _ticket_from_record(entry["record"], 0)
            self.tickets[ticket.external_id] = ticket
            self.index.insert(
                ticket.external_id,
                deserialize_representation(self.kind, entry["representation"]),
            )
            self.live_count += 1
        elif entry["type"] == "feedback":
            self.feedback.append(FeedbackRecord(**entry["record"]))
        else:
            raise DataError(f"unknown journal entry type {entry['type']!r}")

    # --- journal appends ----------------------------------------------

    def _write_journal_line(self, entry: dict) -> None:
        # Caller holds the append lock.
        if self._journal_handle is None:
            self._journal_handle = self._path(JOURNAL_FILE).open("a", encoding="utf-8")
        self._journal_handle.write(
            json.dumps(entry, sort_keys=True, ensure_ascii=False) + "\n"
        )
        self._journal_handle.flush()
        os.fsync(self._journal_handle.fileno())

    def append_ticket(self, ticket: Ticket, representation: Any) -> None:
        """Durably add a live ticket; the index sees it only after the
        journal write succeeds."""
        with self._append_lock:
            if ticket.external_id in self.tickets:
                raise DataError(f"id already stored: {ticket.external_id!r}")
            self._write_journal_line(
                {
                    "type": "ticket",
                    "record": ticket_to_record(ticket),
                    "representation": serialize_representation(self.kind, representation),
                }
            )
            self.tickets[ticket.external_id] = ticket
            self.index.insert(ticket.external_id, representation)
            self.live_count += 1

    def append_feedback(self, record: FeedbackRecord) -> None:
        with self._append_lock:
            self._write_journal_line({"type": "feedback", "record": asdict(record)})
            self.feedback.append(record)

    def close(self) -> None:
        if self._journal_handle is not None:
            self._journal_handle.close()
            self._journal_handle = None
