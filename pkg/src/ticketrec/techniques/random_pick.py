"""Random-selection baseline: uniform sampling without replacement.

Every query samples with its own stream derived from (seed, query key),
so results are reproducible per seed yet uncorrelated across queries.
"""

from __future__ import annotations

import random
from typing import Optional, Sequence

from ..corpus import Corpus
from ..errors import DataError
from ..index import IndexEntry, RetrievalResult, ScoredCandidate
from .base import Technique


def random_select(candidate_ids: Sequence[str], k: int, seed) -> list[str]:
    """min(k, n) distinct ids, uniformly without replacement."""
    if k < 0:
        raise DataError(f"k must be >= 0, got {k}")
    ids = list(candidate_ids)
    rng = random.Random(seed)
    if k >= len(ids):
        rng.shuffle(ids)
        return ids
    return rng.sample(ids, k)


class RandomTechnique(Technique):
    family = "random"
    kind = "random"

    def __init__(self, seed: int = 13, name: Optional[str] = None):
        super().__init__(name)
        self.seed = seed

    def fit(self, train: Corpus) -> None:
        pass

    def represent(self, text: str, key: Optional[str] = None) -> None:
        # No content representation; selection happens in recommend().
        return None

    def pair_score(self, query_repr, doc_repr) -> float:
        raise DataError("random selection has no similarity scorer")

    def rank(
        self,
        query_repr,
        candidates: list[IndexEntry],
        k: int,
        query_id: Optional[str] = None,
    ) -> RetrievalResult:
        ordered = sorted(candidates, key=lambda e: e.recency_rank)
        picked = random_select(
            [e.external_id for e in ordered], k, f"{self.seed}:{query_id}"
        )
        return RetrievalResult(
            items=[ScoredCandidate(external_id, 0.0) for external_id in picked],
            query_id=query_id,
        )

    def payload(self) -> dict:
        return {"seed": self.seed, "preprocessing": None}

    @classmethod
    def from_payload(cls, name: str, payload: dict) -> "RandomTechnique":
        return cls(seed=payload["seed"], name=name)
