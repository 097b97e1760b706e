"""Expert system: lexicon-driven label extraction compared with Jaccard.

A document receives a canonical label whenever the canonical term, or any
of its synonyms, occurs in the preprocessed text as a run of consecutive
tokens. Multi-word lexicon terms therefore match as token subsequences.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Optional

from ..corpus import Corpus
from ..errors import ConfigError, DataError
from ..textprep import NormalizationConfig, preprocess
from .base import Technique, config_from_record, preprocessing_record


class Lexicon:
    """Canonical IT terms and their synonyms.

    No surface form (canonical or synonym) may map to two canonical
    terms; that would make labeling ambiguous.
    """

    def __init__(self, entries: dict[str, list[str] | set[str] | frozenset[str]]):
        self.entries: dict[str, frozenset[str]] = {
            canonical: frozenset(synonyms) for canonical, synonyms in entries.items()
        }
        self._claimed: dict[str, str] = {}
        for canonical, synonyms in self.entries.items():
            for surface in {canonical, *synonyms}:
                owner = self._claimed.get(surface)
                if owner is not None and owner != canonical:
                    raise ConfigError(
                        f"surface form {surface!r} maps to both {owner!r} and {canonical!r}"
                    )
                self._claimed[surface] = canonical

    def __len__(self) -> int:
        return len(self.entries)

    def surface_forms(self) -> dict[str, str]:
        """Map of every matchable surface form to its canonical term."""
        return dict(self._claimed)


def load_lexicon(path: str | Path) -> Lexicon:
    """Lexicon file: JSON object mapping canonical term -> list of synonyms."""
    with Path(path).open(encoding="utf-8") as handle:
        raw = json.load(handle)
    if not isinstance(raw, dict):
        raise ConfigError("lexicon file must be a JSON object")
    for canonical, synonyms in raw.items():
        if not isinstance(synonyms, list):
            raise ConfigError(f"lexicon entry {canonical!r} must map to a list")
    return Lexicon(raw)


def bundled_lexicon() -> Lexicon:
    """Sample lexicon of common IT jargon shipped with the package."""
    text = resources.files("ticketrec.data").joinpath("lexicon_it.json").read_text("utf-8")
    return Lexicon(json.loads(text))


def _term_tokens(surface: str, cfg: NormalizationConfig) -> tuple[str, ...]:
    return tuple(preprocess(surface, cfg))


def expert_labels(text: str, lexicon: Lexicon, cfg: NormalizationConfig) -> frozenset[str]:
    """Canonical labels whose term or synonym occurs in the text."""
    tokens = preprocess(text, cfg)
    present: set[tuple[str, ...]] = set()
    max_len = 0
    for surface in lexicon.surface_forms():
        max_len = max(max_len, len(_term_tokens(surface, cfg)))
    for n in range(1, max_len + 1):
        for i in range(len(tokens) - n + 1):
            present.add(tuple(tokens[i : i + n]))
    labels = set()
    for surface, canonical in lexicon.surface_forms().items():
        term = _term_tokens(surface, cfg)
        if term and term in present:
            labels.add(canonical)
    return frozenset(labels)


def jaccard(a: frozenset[str] | set[str], b: frozenset[str] | set[str]) -> float:
    """Intersection over union; 0.0 when both sets are empty."""
    if not isinstance(a, (set, frozenset)) or not isinstance(b, (set, frozenset)):
        raise DataError("jaccard expects label sets")
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


class ExpertSystemTechnique(Technique):
    family = "expert"
    kind = "labels"

    def __init__(
        self,
        lexicon: Lexicon,
        cfg: Optional[NormalizationConfig] = None,
        name: Optional[str] = None,
    ):
        super().__init__(name)
        self.lexicon = lexicon
        self.cfg = cfg or NormalizationConfig()

    def fit(self, train: Corpus) -> None:
        # Knowledge lives in the lexicon; nothing is learned from data.
        pass

    def represent(self, text: str, key: Optional[str] = None) -> frozenset[str]:
        return expert_labels(text, self.lexicon, self.cfg)

    def pair_score(self, query_repr, doc_repr) -> float:
        return jaccard(query_repr, doc_repr)

    def preprocessing_config(self) -> Optional[NormalizationConfig]:
        return self.cfg

    def payload(self) -> dict:
        return {
            "lexicon": {c: sorted(s) for c, s in sorted(self.lexicon.entries.items())},
            "preprocessing": preprocessing_record(self.cfg),
        }

    @classmethod
    def from_payload(cls, name: str, payload: dict) -> "ExpertSystemTechnique":
        return cls(
            Lexicon(payload["lexicon"]),
            cfg=config_from_record(payload["preprocessing"]),
            name=name,
        )
