"""TF-IDF representation over a capped vocabulary.

The vocabulary keeps the 500 terms with the highest document frequency
after preprocessing (ties broken lexicographically); idf uses the
smoothed form ln((1+N)/(1+df)) + 1 and vectors are L2-normalized.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..corpus import Corpus, query_text
from ..errors import DataError
from ..index import cosine
from ..textprep import NormalizationConfig, english_stopwords, preprocess
from .base import Technique, config_from_record, preprocessing_record

DEFAULT_VOCAB_SIZE = 500


def default_tfidf_config() -> NormalizationConfig:
    return NormalizationConfig(remove_stopwords=True, stopword_list=english_stopwords())


@dataclass
class TfidfModel:
    vocabulary: list[str]  # ordered, at most the configured cap
    idf: dict[str, float]

    def __post_init__(self):
        self.term_index = {term: i for i, term in enumerate(self.vocabulary)}

    @property
    def dim(self) -> int:
        return len(self.vocabulary)


def tfidf_fit(
    train: Corpus,
    cfg: Optional[NormalizationConfig] = None,
    vocab_size: int = DEFAULT_VOCAB_SIZE,
) -> TfidfModel:
    if len(train) == 0:
        raise DataError("cannot fit tf-idf on an empty corpus")
    cfg = cfg or default_tfidf_config()
    df: Counter[str] = Counter()
    n_docs = 0
    for ticket in train:
        n_docs += 1
        df.update(set(preprocess(query_text(ticket), cfg)))
    if not df:
        raise DataError("corpus is empty after preprocessing")
    ranked = sorted(df.items(), key=lambda item: (-item[1], item[0]))
    vocabulary = [term for term, _ in ranked[:vocab_size]]
    idf = {
        term: math.log((1 + n_docs) / (1 + df[term])) + 1.0 for term in vocabulary
    }
    return TfidfModel(vocabulary=vocabulary, idf=idf)


def tfidf_represent(
    model: TfidfModel, text: str, cfg: Optional[NormalizationConfig] = None
) -> np.ndarray:
    """tf * idf over the vocabulary, L2-normalized; an all-zero raw vector
    (no vocabulary overlap) stays all-zero."""
    cfg = cfg or default_tfidf_config()
    vector = np.zeros(model.dim)
    for term, count in Counter(preprocess(text, cfg)).items():
        i = model.term_index.get(term)
        if i is not None:
            vector[i] = count * model.idf[term]
    norm = np.linalg.norm(vector)
    if norm > 0:
        vector /= norm
    return vector


class TfidfTechnique(Technique):
    family = "tfidf"
    kind = "vector"

    def __init__(
        self,
        cfg: Optional[NormalizationConfig] = None,
        vocab_size: int = DEFAULT_VOCAB_SIZE,
        name: Optional[str] = None,
    ):
        super().__init__(name)
        self.cfg = cfg or default_tfidf_config()
        self.vocab_size = vocab_size
        self.model: Optional[TfidfModel] = None

    def fit(self, train: Corpus) -> None:
        self.model = tfidf_fit(train, self.cfg, self.vocab_size)

    def represent(self, text: str, key: Optional[str] = None) -> np.ndarray:
        if self.model is None:
            raise DataError("tf-idf technique is not fitted")
        return tfidf_represent(self.model, text, self.cfg)

    def pair_score(self, query_repr, doc_repr) -> float:
        return cosine(query_repr, doc_repr)

    def preprocessing_config(self) -> Optional[NormalizationConfig]:
        return self.cfg

    def payload(self) -> dict:
        if self.model is None:
            raise DataError("tf-idf technique is not fitted")
        return {
            "vocab_size": self.vocab_size,
            "vocabulary": self.model.vocabulary,
            "idf": {t: self.model.idf[t] for t in self.model.vocabulary},
            "preprocessing": preprocessing_record(self.cfg),
        }

    @classmethod
    def from_payload(cls, name: str, payload: dict) -> "TfidfTechnique":
        technique = cls(
            cfg=config_from_record(payload["preprocessing"]),
            vocab_size=payload["vocab_size"],
            name=name,
        )
        technique.model = TfidfModel(
            vocabulary=list(payload["vocabulary"]),
            idf=dict(payload["idf"]),
        )
        return technique
