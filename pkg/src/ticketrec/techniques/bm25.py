"""Okapi BM25 with the idf floor for very common terms.

Collection statistics (document frequencies, average document length)
are frozen at fit time; any document, indexed or not, can then be scored
from its own term-count profile against those statistics.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from ..corpus import Corpus, query_text
from ..errors import DataError
from ..textprep import NormalizationConfig, preprocess
from .base import Technique, config_from_record, preprocessing_record


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.5
    b: float = 0.75
    epsilon: float = 0.25

    def __post_init__(self):
        if not 0.0 <= self.b <= 1.0:
            raise DataError(f"b must be in [0, 1], got {self.b}")
        if self.epsilon < 0.0:
            raise DataError(f"epsilon must be >= 0, got {self.epsilon}")


@dataclass(frozen=True)
class Bm25DocProfile:
    """What BM25 needs to know about one document: term counts and length."""

    counts: dict[str, int]
    length: int

    @classmethod
    def from_tokens(cls, tokens: list[str]) -> "Bm25DocProfile":
        return cls(counts=dict(Counter(tokens)), length=len(tokens))


class Bm25Index:
    """Fitted BM25 collection statistics plus the indexed training docs."""

    def __init__(
        self,
        params: Bm25Params,
        cfg: NormalizationConfig,
        doc_profiles: dict[str, Bm25DocProfile],
        idf: dict[str, float],
        avgdl: float,
        n_docs: int,
        df: Optional[dict[str, int]] = None,
    ):
        self.params = params
        self.cfg = cfg
        self.doc_profiles = doc_profiles
        self.idf = idf
        self.avgdl = avgdl
        self.n_docs = n_docs
        self.df = df if df is not None else self._recount_df()

    def _recount_df(self) -> dict[str, int]:
        counts: Counter[str] = Counter()
        for profile in self.doc_profiles.values():
            counts.update(profile.counts.keys())
        return dict(counts)

    def score_profile(self, query_tokens: list[str], profile: Bm25DocProfile) -> float:
        """Okapi score of a query against one document profile. Query terms
        unseen at fit time contribute nothing (idf 0)."""
        k1, b = self.params.k1, self.params.b
        norm = k1 * (1.0 - b + b * profile.length / self.avgdl)
        score = 0.0
        for term in query_tokens:
            tf = profile.counts.get(term, 0)
            if tf == 0:
                continue
            score += self.idf.get(term, 0.0) * tf * (k1 + 1.0) / (tf + norm)
        return score


def bm25_fit(
    train: Corpus,
    params: Optional[Bm25Params] = None,
    cfg: Optional[NormalizationConfig] = None,
) -> Bm25Index:
    """Index the training corpus and derive idf with the floor rule:
    idf(t) = ln((N - df + 0.5)/(df + 0.5)), with negative values replaced
    by epsilon times the mean positive idf (epsilon alone if no term has
    positive idf, as in single-document corpora)."""
    if len(train) == 0:
        raise DataError("cannot fit BM25 on an empty corpus")
    params = params or Bm25Params()
    cfg = cfg or NormalizationConfig()
    profiles: dict[str, Bm25DocProfile] = {}
    df: Counter[str] = Counter()
    total_len = 0
    for ticket in train:
        tokens = preprocess(query_text(ticket), cfg)
        profile = Bm25DocProfile.from_tokens(tokens)
        profiles[ticket.external_id] = profile
        df.update(profile.counts.keys())
        total_len += profile.length
    if total_len == 0:
        raise DataError("corpus is empty after preprocessing")
    n = len(train)
    avgdl = total_len / n
    raw = {term: math.log((n - d + 0.5) / (d + 0.5)) for term, d in df.items()}
    positive = [v for v in raw.values() if v > 0]
    floor = params.epsilon * (sum(positive) / len(positive)) if positive else params.epsilon
    idf = {term: (v if v > 0 else floor) for term, v in raw.items()}
    return Bm25Index(params, cfg, profiles, idf, avgdl, n, df=dict(df))


def bm25_score(index: Bm25Index, query: str, doc_id: str) -> float:
    """Score a query against one indexed document by id."""
    if doc_id not in index.doc_profiles:
        raise DataError(f"document not indexed: {doc_id!r}")
    tokens = preprocess(query, index.cfg)
    return index.score_profile(tokens, index.doc_profiles[doc_id])


class Bm25Technique(Technique):
    family = "bm25"
    kind = "bm25"

    def __init__(
        self,
        params: Optional[Bm25Params] = None,
        cfg: Optional[NormalizationConfig] = None,
        name: Optional[str] = None,
    ):
        super().__init__(name)
        self.params = params or Bm25Params()
        self.cfg = cfg or NormalizationConfig()
        self.index: Optional[Bm25Index] = None

    def fit(self, train: Corpus) -> None:
        self.index = bm25_fit(train, self.params, self.cfg)

    def represent(self, text: str, key: Optional[str] = None) -> Bm25DocProfile:
        return Bm25DocProfile.from_tokens(preprocess(text, self.cfg))

    def pair_score(self, query_repr, doc_repr) -> float:
        if self.index is None:
            raise DataError("BM25 technique is not fitted")
        if not isinstance(query_repr, Bm25DocProfile) or not isinstance(
            doc_repr, Bm25DocProfile
        ):
            raise DataError("BM25 scorer expects document profiles")
        tokens = [t for t, c in query_repr.counts.items() for _ in range(c)]
        return self.index.score_profile(tokens, doc_repr)

    def preprocessing_config(self) -> Optional[NormalizationConfig]:
        return self.cfg

    def payload(self) -> dict:
        if self.index is None:
            raise DataError("BM25 technique is not fitted")
        return {
            "params": {
                "k1": self.params.k1,
                "b": self.params.b,
                "epsilon": self.params.epsilon,
            },
            "idf": self.index.idf,
            "avgdl": self.index.avgdl,
            "n_docs": self.index.n_docs,
            "doc_profiles": {
                doc_id: {"counts": p.counts, "length": p.length}
                for doc_id, p in sorted(self.index.doc_profiles.items())
            },
            "preprocessing": preprocessing_record(self.cfg),
        }

    @classmethod
    def from_payload(cls, name: str, payload: dict) -> "Bm25Technique":
        params = Bm25Params(**payload["params"])
        cfg = config_from_record(payload["preprocessing"])
        technique = cls(params=params, cfg=cfg, name=name)
        technique.index = Bm25Index(
            params=params,
            cfg=technique.cfg,
            doc_profiles={
                doc_id: Bm25DocProfile(counts=dict(p["counts"]), length=p["length"])
                for doc_id, p in payload["doc_profiles"].items()
            },
            idf=dict(payload["idf"]),
            avgdl=payload["avgdl"],
            n_docs=payload["n_docs"],
        )
        return technique
