"""HTTP JSON API over the recommender service."""

from __future__ import annotations

from dataclasses import asdict
from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from ..errors import TicketrecError
from .core import NotFound, RecommenderService, ValidationFailure


class TicketSubmission(BaseModel):
    title: str
    description: str


class FeedbackSubmission(BaseModel):
    query_ticket_id: str
    recommended_ids: list[str]
    verdict: Literal["helpful", "not_helpful"]
    technique: str


def create_app(service: RecommenderService) -> FastAPI:
    app = FastAPI(title="ticketrec", docs_url=None, redoc_url=None)

    @app.post("/tickets")
    def submit_ticket(submission: TicketSubmission):
        try:
            return service.submit(submission.title, submission.description)
        except ValidationFailure as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except TicketrecError as exc:
            # Representation failed; the ticket was not stored.
            raise HTTPException(status_code=502, detail=str(exc)) from exc

    @app.get("/tickets/{ticket_id}")
    def get_ticket(ticket_id: str):
        try:
            return service.get_ticket(ticket_id)
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.post("/feedback", status_code=201)
    def record_feedback(submission: FeedbackSubmission):
        try:
            record = service.record_feedback(
                submission.query_ticket_id,
                submission.recommended_ids,
                submission.verdict,
                submission.technique,
            )
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except ValidationFailure as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return asdict(record)

    @app.get("/feedback")
    def list_feedback():
        return [asdict(record) for record in service.feedback_list()]

    @app.get("/health")
    def health():
        return service.health()

    return app
