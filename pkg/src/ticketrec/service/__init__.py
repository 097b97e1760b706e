from .app import create_app
from .core import (
    NotFound,
    RecommenderService,
    ServiceConfig,
    ValidationFailure,
    load_service_config,
)
from .store import BootstrapSummary, FeedbackRecord, TicketStore

__all__ = [
    "BootstrapSummary",
    "FeedbackRecord",
    "NotFound",
    "RecommenderService",
    "ServiceConfig",
    "TicketStore",
    "ValidationFailure",
    "create_app",
    "load_service_config",
]
