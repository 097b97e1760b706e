"""Uniform interface shared by all retrieval techniques.

A technique is fitted once on a training corpus, and can then represent
any text (or ticket) and score a query representation against a stored
candidate representation. All techniques are deterministic given
(training corpus, configuration, seed).
"""

from __future__ import annotations

import hashlib
import json
from abc import ABC, abstractmethod
from typing import Any, ClassVar, Optional

from ..corpus import Corpus
from ..errors import ConfigError
from ..index import IndexEntry, RetrievalResult, top_k
from ..textprep import NormalizationConfig


class Technique(ABC):
    """One representation/scoring technique behind the common interface."""

    family: ClassVar[str]
    kind: ClassVar[str]  # "vector" | "labels" | "bm25" | "random"

    def __init__(self, name: Optional[str] = None):
        self.name = name or self.family

    @abstractmethod
    def fit(self, train: Corpus) -> None:
        """Fit on the training corpus. Techniques backed purely by external
        resources treat this as validation only."""

    @abstractmethod
    def represent(self, text: str, key: Optional[str] = None) -> Any:
        """Representation of one document. ``key`` is the ticket id, used by
        techniques that look vectors up by id instead of embedding text."""

    @abstractmethod
    def pair_score(self, query_repr: Any, doc_repr: Any) -> float:
        """Similarity between a query and one candidate representation."""

    def rank(
        self,
        query_repr: Any,
        candidates: list[IndexEntry],
        k: int,
        query_id: Optional[str] = None,
    ) -> RetrievalResult:
        """Rank candidates against an already-computed representation."""
        return top_k(query_repr, candidates, k, self.pair_score, query_id=query_id)

    def recommend(
        self,
        text: str,
        key: Optional[str],
        candidates: list[IndexEntry],
        k: int,
    ) -> RetrievalResult:
        return self.rank(self.represent(text, key=key), candidates, k, query_id=key)

    # --- artifact serialization -------------------------------------

    def preprocessing_config(self) -> Optional[NormalizationConfig]:
        """The normalization applied before representing, or None for
        techniques that consume raw text."""
        return None

    @abstractmethod
    def payload(self) -> dict:
        """JSON-serializable fitted state."""

    @classmethod
    @abstractmethod
    def from_payload(cls, name: str, payload: dict) -> "Technique":
        """Rebuild a fitted technique from :meth:`payload` output."""


def preprocessing_record(cfg: Optional[NormalizationConfig]) -> Optional[dict]:
    return cfg.fingerprint_fields() if cfg is not None else None


def config_from_record(record: Optional[dict]) -> Optional[NormalizationConfig]:
    if record is None:
        return None
    return NormalizationConfig(
        lowercase=record["lowercase"],
        strip_chars=frozenset(record["strip_chars"]),
        unicode_fold=record["unicode_fold"],
        remove_stopwords=record["remove_stopwords"],
        stopword_list=frozenset(record["stopword_list"]),
    )


def fingerprint(family: str, preprocessing: Optional[dict], params: dict) -> str:
    """Stable digest of everything that influences a fitted model, so the
    comparison harness can refuse to mix artifacts built under different
    preprocessing configurations."""
    blob = json.dumps(
        {"family": family, "preprocessing": preprocessing, "params": params},
        sort_keys=True,
        ensure_ascii=True,
    )
    return hashlib.sha256(blob.encode("ascii")).hexdigest()


def require_fitted(technique: Technique, is_fitted: bool) -> None:
    if not is_fitted:
        raise ConfigError(f"technique {technique.name!r} is not fitted")
