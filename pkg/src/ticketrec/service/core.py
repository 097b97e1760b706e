"""Service logic behind the HTTP layer: one active technique, a candidate
window over the most recent stored tickets, and feedback capture."""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Optional

from ..corpus import Ticket, load_tickets, ticket_to_record
from ..errors import ConfigError, DataError, TicketrecError
from ..techniques import load_artifact
from ..techniques.base import Technique
from .store import BootstrapSummary, FeedbackRecord, TicketStore

VERDICTS = ("helpful", "not_helpful")
MAX_RECOMMENDED_IDS = 5


class ValidationFailure(TicketrecError):
    """The request is well-formed JSON but violates a service rule."""


class NotFound(TicketrecError):
    """The referenced ticket does not exist."""


@dataclass
class ServiceConfig:
    model_artifact: str
    store_dir: str
    corpus_path: Optional[str] = None  # needed only for the first bootstrap
    candidate_window: int = 100
    k: int = 5
    host: str = "127.0.0.1"
    port: int = 8900

    def __post_init__(self):
        if self.k < 1 or self.candidate_window < self.k:
            raise ConfigError(
                f"need candidate_window >= k >= 1, got window={self.candidate_window} k={self.k}"
            )


_ENV_FIELDS = {
    "TICKETREC_MODEL_ARTIFACT": ("model_artifact", str),
    "TICKETREC_STORE_DIR": ("store_dir", str),
    "TICKETREC_CORPUS": ("corpus_path", str),
    "TICKETREC_CANDIDATE_WINDOW": ("candidate_window", int),
    "TICKETREC_K": ("k", int),
    "TICKETREC_HOST": ("host", str),
    "TICKETREC_PORT": ("port", int),
}


def load_service_config(
    path: Optional[str | Path] = None, env: Optional[Mapping[str, str]] = None
) -> ServiceConfig:
    """Config file (JSON) merged with TICKETREC_* environment overrides."""
    values: dict = {}
    if path is not None:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ConfigError("service config must be a JSON object")
        unknown = set(raw) - set(ServiceConfig.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        values.update(raw)
    environment = os.environ if env is None else env
    for env_name, (field_name, cast) in _ENV_FIELDS.items():
        if env_name in environment:
            try:
                values[field_name] = cast(environment[env_name])
            except ValueError:
                raise ConfigError(f"bad value for {env_name}") from None
    for required in ("model_artifact", "store_dir"):
        if required not in values:
            raise ConfigError(f"service config is missing {required!r}")
    return ServiceConfig(**values)


class RecommenderService:
    """The running prototype: submit tickets, recommend, record feedback."""

    def __init__(
        self,
        technique: Technique,
        store: TicketStore,
        candidate_window: int = 100,
        k: int = 5,
    ):
        self.technique = technique
        self.store = store
        self.candidate_window = candidate_window
        self.k = k
        self._submit_lock = threading.Lock()

    @classmethod
    def start(cls, config: ServiceConfig) -> tuple["RecommenderService", Optional[BootstrapSummary]]:
        """Load the model and either restore the store from disk or run the
        initial bootstrap over the configured corpus."""
        technique = load_artifact(config.model_artifact)
        store = TicketStore(config.store_dir)
        summary = None
        if store.has_snapshot():
            store.load()
            if store.technique_name != technique.name:
                raise DataError(
                    f"store was built with technique {store.technique_name!r}, "
                    f"config says {technique.name!r}"
                )
        else:
            if config.corpus_path is None:
                raise ConfigError("no snapshot found and no corpus_path configured")
            corpus = load_tickets(config.corpus_path)
            summary = store.bootstrap(corpus, technique)
        return cls(technique, store, config.candidate_window, config.k), summary

    def _next_ticket_id(self) -> str:
        n = self.store.live_count + 1
        while f"live-{n:06d}" in self.store.tickets:
            n += 1
        return f"live-{n:06d}"

    def submit(self, title: str, description: str) -> dict:
        """Recommend against the recent window, then store the new ticket.

        The new ticket is inserted only after scoring, so a query never
        sees itself among its own recommendations.
        """
        if not title.strip() and not description.strip():
            raise ValidationFailure("title and description are both empty")
        # Provisional id: only the append step (under the lock) fixes the
        # final one, so representation and scoring stay concurrent.
        provisional_id = self._next_ticket_id()
        representation = self.technique.represent(
            f"{title} {description}", key=provisional_id
        )
        candidates = self.store.index.candidates(window=self.candidate_window)
        result = self.technique.rank(
            representation, candidates, self.k, query_id=provisional_id
        )
        recommendations = []
        for item in result.items:
            stored = self.store.tickets[item.external_id]
            recommendations.append(
                {
                    "external_id": item.external_id,
                    "score": item.score,
                    "title": stored.title,
                    "solution": stored.solution,
                }
            )
        with self._submit_lock:
            ticket_id = self._next_ticket_id()
            ticket = Ticket(
                external_id=ticket_id,
                title=title,
                description=description,
                date_open=datetime.now(timezone.utc),
            )
            self.store.append_ticket(ticket, representation)
        return {"ticket_id": ticket_id, "recommendations": recommendations}

    def get_ticket(self, external_id: str) -> dict:
        ticket = self.store.tickets.get(external_id)
        if ticket is None:
            raise NotFound(f"no ticket {external_id!r}")
        return ticket_to_record(ticket)

    def record_feedback(
        self,
        query_ticket_id: str,
        recommended_ids: list[str],
        verdict: str,
        technique: str,
    ) -> FeedbackRecord:
        if verdict not in VERDICTS:
            raise ValidationFailure(f"verdict must be one of {VERDICTS}")
        if len(recommended_ids) > MAX_RECOMMENDED_IDS:
            raise ValidationFailure(
                f"at most {MAX_RECOMMENDED_IDS} recommended ids, got {len(recommended_ids)}"
            )
        if query_ticket_id not in self.store.tickets:
            raise NotFound(f"no ticket {query_ticket_id!r}")
        record = FeedbackRecord(
            query_ticket_id=query_ticket_id,
            recommended_ids=list(recommended_ids),
            verdict=verdict,
            technique=technique,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )
        self.store.append_feedback(record)
        return record

    def feedback_list(self) -> list[FeedbackRecord]:
        return list(self.store.feedback)

    def health(self) -> dict:
        return {
            "status": "ok",
            "technique": self.technique.name,
            "index_size": len(self.store.index),
        }

    def close(self) -> None:
        self.store.close()
