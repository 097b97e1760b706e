"""Representation store, cosine similarity and top-k candidate selection.

Candidate windows are small (at most a few hundred entries), so selection
is an exact exhaustive scan; no approximate nearest-neighbor structure.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class IndexEntry:
    external_id: str
    representation: Any
    recency_rank: int  # 0 = newest


@dataclass(frozen=True)
class ScoredCandidate:
    external_id: str
    score: float


@dataclass(frozen=True)
class RetrievalResult:
    """Ranked recommendations for one query, best first."""

    items: list[ScoredCandidate]
    query_id: Optional[str] = None

    def ids(self) -> list[str]:
        return [c.external_id for c in self.items]


def cosine(a, b) -> float:
    """Cosine similarity of two equal-length vectors.

    Returns 0.0 when either vector has zero norm, so empty or fully
    out-of-vocabulary documents rank last instead of poisoning the sort.
    """
    try:
        va = np.asarray(a, dtype=float)
        vb = np.asarray(b, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DataError(f"cosine expects numeric vectors: {exc}") from None
    if va.ndim != 1 or vb.ndim != 1:
        raise DataError("cosine expects 1-dimensional vectors")
    if va.shape != vb.shape:
        raise DataError(f"dimension mismatch: {va.shape[0]} vs {vb.shape[0]}")
    norm = float(np.linalg.norm(va)) * float(np.linalg.norm(vb))
    if norm == 0.0:
        return 0.0
    return float(np.dot(va, vb) / norm)


def top_k(
    query_repr: Any,
    candidates: list[IndexEntry],
    k: int,
    scorer: Callable[[Any, Any], float],
    query_id: Optional[str] = None,
) -> RetrievalResult:
    """The k highest-scoring candidates, descending score.

    Ties break on smaller recency rank (newer first), then on
    lexicographically smaller id, so rankings are fully deterministic.
    """
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    scored = [
        (scorer(query_repr, entry.representation), entry) for entry in candidates
    ]
    scored.sort(key=lambda pair: (-pair[0], pair[1].recency_rank, pair[1].external_id))
    items = [
        ScoredCandidate(entry.external_id, float(score)) for score, entry in scored[:k]
    ]
    return RetrievalResult(items=items, query_id=query_id)


class RepresentationIndex:
    """Append-only store of one representation per ticket.

    Entries keep insertion order; recency rank is derived from it
    (last inserted = rank 0). Inserts take a lock, reads never block.
    """

    def __init__(self, kind: str):
        self.kind = kind
        self._ids: list[str] = []
        self._representations: list[Any] = []
        self._positions: dict[str, int] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, external_id: str) -> bool:
        return external_id in self._positions

    def insert(self, external_id: str, representation: Any) -> None:
        with self._lock:
            if external_id in self._positions:
                raise DataError(f"id already indexed: {external_id!r}")
            self._positions[external_id] = len(self._ids)
            self._ids.append(external_id)
            self._representations.append(representation)

    def representation_of(self, external_id: str) -> Any:
        try:
            return self._representations[self._positions[external_id]]
        except KeyError:
            raise DataError(f"id not indexed: {external_id!r}") from None

    def ids_oldest_first(self) -> list[str]:
        return list(self._ids)

    def candidates(
        self, window: Optional[int] = None, exclude: Optional[str] = None
    ) -> list[IndexEntry]:
        """Entries with the smallest recency ranks, newest first.

        ``window`` limits how many are returned (after exclusion);
        ``None`` means all entries.
        """
        if window is not None and window < 1:
            raise DataError(f"window must be >= 1, got {window}")
        n = len(self._ids)
        first = 0 if window is None else max(0, n - window)
        return [
            IndexEntry(self._ids[pos], self._representations[pos], n - 1 - pos)
            for pos in range(n - 1, first - 1, -1)
            if self._ids[pos] != exclude
        ]


def recent_candidates(
    index: RepresentationIndex, window: int, exclude: Optional[str] = None
) -> list[IndexEntry]:
    """The ``window`` most recently inserted entries, excluding ``exclude``."""
    return index.candidates(window=window, exclude=exclude)
