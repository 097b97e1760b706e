"""Topic-model representation via collapsed Gibbs sampling.

Documents are represented as smoothed topic-proportion vectors. Fitting
learns topic-word counts on the training corpus; unseen documents are
folded in against those counts, which stay frozen. Both phases are
deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..corpus import Corpus, query_text
from ..errors import DataError
from ..index import cosine
from ..textprep import NormalizationConfig, preprocess
from .base import Technique, config_from_record, preprocessing_record

DEFAULT_TOPICS = 300


@dataclass(frozen=True)
class LdaConfig:
    num_topics: int = DEFAULT_TOPICS
    alpha: Optional[float] = None  # None -> 50 / num_topics
    beta: float = 0.01
    train_iterations: int = 200
    fold_in_iterations: int = 50
    seed: int = 13

    def __post_init__(self):
        if self.num_topics < 1:
            raise DataError(f"num_topics must be >= 1, got {self.num_topics}")
        if (self.alpha is not None and self.alpha <= 0) or self.beta <= 0:
            raise DataError("alpha and beta must be positive")

    def resolved_alpha(self) -> float:
        return self.alpha if self.alpha is not None else 50.0 / self.num_topics


class LdaModel:
    def __init__(
        self,
        config: LdaConfig,
        vocabulary: list[str],
        topic_word_counts: np.ndarray,
    ):
        self.config = config
        self.vocabulary = vocabulary
        self.term_index = {t: i for i, t in enumerate(vocabulary)}
        self.topic_word_counts = topic_word_counts  # K x V
        self.topic_totals = topic_word_counts.sum(axis=1)  # K


def _gibbs_pass(
    word_ids: np.ndarray,
    doc_ids: np.ndarray,
    assignments: np.ndarray,
    topic_word: np.ndarray,
    topic_totals: np.ndarray,
    doc_topic: np.ndarray,
    alpha: float,
    beta: float,
    v_beta: float,
    rng: np.random.Generator,
    update_words: bool,
) -> None:
    """One sweep of collapsed Gibbs updates over every token.

    With ``update_words`` false the topic-word counts act as a frozen
    prior (fold-in); only the per-document topic counts move.
    """
    for i in range(word_ids.shape[0]):
        w = word_ids[i]
        d = doc_ids[i]
        t = assignments[i]
        doc_topic[d, t] -= 1
        if update_words:
            topic_word[t, w] -= 1
            topic_totals[t] -= 1
        weights = (topic_word[:, w] + beta) / (topic_totals + v_beta)
        weights = weights * (doc_topic[d] + alpha)
        cumulative = np.cumsum(weights)
        t_new = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
        if t_new >= weights.shape[0]:  # guard against fp rounding at the edge
            t_new = weights.shape[0] - 1
        assignments[i] = t_new
        doc_topic[d, t_new] += 1
        if update_words:
            topic_word[t_new, w] += 1
            topic_totals[t_new] += 1


def lda_fit(
    train: Corpus,
    config: Optional[LdaConfig] = None,
    cfg: Optional[NormalizationConfig] = None,
    iterations: Optional[int] = None,
) -> LdaModel:
    if len(train) == 0:
        raise DataError("cannot fit LDA on an empty corpus")
    config = config or LdaConfig()
    cfg = cfg or NormalizationConfig()
    n_iter = iterations if iterations is not None else config.train_iterations
    if n_iter < 1:
        raise DataError(f"iterations must be >= 1, got {n_iter}")

    token_lists = [preprocess(query_text(t), cfg) for t in train]
    vocabulary = sorted({tok for tokens in token_lists for tok in tokens})
    if not vocabulary:
        raise DataError("vocabulary is empty after preprocessing")
    term_index = {t: i for i, t in enumerate(vocabulary)}

    word_ids = np.array(
        [term_index[tok] for tokens in token_lists for tok in tokens], dtype=np.int64
    )
    doc_ids = np.array(
        [d for d, tokens in enumerate(token_lists) for _ in tokens], dtype=np.int64
    )

    k = config.num_topics
    v = len(vocabulary)
    rng = np.random.default_rng(config.seed)
    assignments = rng.integers(0, k, size=word_ids.shape[0])
    topic_word = np.zeros((k, v), dtype=np.int64)
    doc_topic = np.zeros((len(token_lists), k), dtype=np.int64)
    np.add.at(topic_word, (assignments, word_ids), 1)
    np.add.at(doc_topic, (doc_ids, assignments), 1)
    topic_totals = topic_word.sum(axis=1)

    alpha = config.resolved_alpha()
    v_beta = v * config.beta
    for _ in range(n_iter):
        _gibbs_pass(
            word_ids,
            doc_ids,
            assignments,
            topic_word,
            topic_totals,
            doc_topic,
            alpha,
            config.beta,
            v_beta,
            rng,
            update_words=True,
        )
    return LdaModel(config=config, vocabulary=vocabulary, topic_word_counts=topic_word)


def lda_represent(
    model: LdaModel,
    text: str,
    cfg: Optional[NormalizationConfig] = None,
    fold_in_iterations: Optional[int] = None,
    seed: Optional[int] = None,
) -> np.ndarray:
    """Smoothed topic proportions for one document (sums to 1).

    A document with no in-vocabulary tokens gets the uniform vector, the
    pure alpha-smoothing outcome.
    """
    cfg = cfg or NormalizationConfig()
    config = model.config
    n_iter = (
        fold_in_iterations if fold_in_iterations is not None else config.fold_in_iterations
    )
    word_ids = np.array(
        [model.term_index[t] for t in preprocess(text, cfg) if t in model.term_index],
        dtype=np.int64,
    )
    k = config.num_topics
    alpha = config.resolved_alpha()
    doc_topic = np.zeros((1, k), dtype=np.int64)
    if word_ids.shape[0] > 0:
        rng = np.random.default_rng(config.seed if seed is None else seed)
        doc_ids = np.zeros(word_ids.shape[0], dtype=np.int64)
        assignments = rng.integers(0, k, size=word_ids.shape[0])
        np.add.at(doc_topic, (doc_ids, assignments), 1)
        v_beta = len(model.vocabulary) * config.beta
        for _ in range(n_iter):
            _gibbs_pass(
                word_ids,
                doc_ids,
                assignments,
                model.topic_word_counts,
                model.topic_totals,
                doc_topic,
                alpha,
                config.beta,
                v_beta,
                rng,
                update_words=False,
            )
    proportions = doc_topic[0] + alpha
    return proportions / proportions.sum()


class LdaTechnique(Technique):
    family = "lda"
    kind = "vector"

    def __init__(
        self,
        config: Optional[LdaConfig] = None,
        cfg: Optional[NormalizationConfig] = None,
        name: Optional[str] = None,
    ):
        super().__init__(name)
        self.config = config or LdaConfig()
        self.cfg = cfg or NormalizationConfig()
        self.model: Optional[LdaModel] = None

    def fit(self, train: Corpus) -> None:
        self.model = lda_fit(train, self.config, self.cfg)

    def represent(self, text: str, key: Optional[str] = None) -> np.ndarray:
        if self.model is None:
            raise DataError("LDA technique is not fitted")
        return lda_represent(self.model, text, self.cfg)

    def pair_score(self, query_repr, doc_repr) -> float:
        return cosine(query_repr, doc_repr)

    def preprocessing_config(self) -> Optional[NormalizationConfig]:
        return self.cfg

    def payload(self) -> dict:
        if self.model is None:
            raise DataError("LDA technique is not fitted")
        return {
            "config": {
                "num_topics": self.config.num_topics,
                "alpha": self.config.alpha,
                "beta": self.config.beta,
                "train_iterations": self.config.train_iterations,
                "fold_in_iterations": self.config.fold_in_iterations,
                "seed": self.config.seed,
            },
            "vocabulary": self.model.vocabulary,
            "topic_word_counts": self.model.topic_word_counts.tolist(),
            "preprocessing": preprocessing_record(self.cfg),
        }

    @classmethod
    def from_payload(cls, name: str, payload: dict) -> "LdaTechnique":
        config = LdaConfig(**payload["config"])
        technique = cls(
            config=config, cfg=config_from_record(payload["preprocessing"]), name=name
        )
        technique.model = LdaModel(
            config=config,
            vocabulary=list(payload["vocabulary"]),
            topic_word_counts=np.array(payload["topic_word_counts"], dtype=np.int64),
        )
        return technique
