"""Shared text preprocessing: lowercase, special-character stripping,
unicode folding, whitespace tokenization and stopword removal.

Contextual-embedding techniques bypass this module and consume raw text.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ConfigError

# The seven characters stripped before tokenization.
DEFAULT_STRIP_CHARS = frozenset("-.,!?_*")

# Folding repeated until stable; exotic compatibility characters can need
# a second pass (e.g. "…" folds to "..." which must then be stripped).
_MAX_NORMALIZE_PASSES = 8


@dataclass(frozen=True)
class NormalizationConfig:
    lowercase: bool = True
    strip_chars: frozenset[str] = DEFAULT_STRIP_CHARS
    unicode_fold: bool = True
    remove_stopwords: bool = False
    stopword_list: frozenset[str] = frozenset()

    def __post_init__(self):
        for ch in self.strip_chars:
            if len(ch) != 1:
                raise ConfigError(f"strip_chars entries must be single characters, got {ch!r}")
        if self.remove_stopwords and not self.stopword_list:
            raise ConfigError("remove_stopwords is set but stopword_list is empty")

    def fingerprint_fields(self) -> dict:
        """Stable description used in model-artifact config fingerprints."""
        return {
            "lowercase": self.lowercase,
            "strip_chars": sorted(self.strip_chars),
            "unicode_fold": self.unicode_fold,
            "remove_stopwords": self.remove_stopwords,
            "stopword_list": sorted(self.stopword_list),
        }


def _fold(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def _normalize_once(text: str, cfg: NormalizationConfig) -> str:
    if cfg.lowercase:
        text = text.lower()
    if cfg.strip_chars:
        text = text.translate({ord(c): " " for c in cfg.strip_chars})
    if cfg.unicode_fold:
        text = _fold(text)
    return text


def normalize(text: str, cfg: NormalizationConfig | None = None) -> str:
    """Lowercase, replace the configured special characters by spaces, and
    fold accented/compatibility characters to their plain form.

    The pass is repeated until the text is stable, which makes the
    function idempotent even when folding itself produces strippable or
    uppercase characters.
    """
    cfg = cfg or NormalizationConfig()
    for _ in range(_MAX_NORMALIZE_PASSES):
        folded = _normalize_once(text, cfg)
        if folded == text:
            return text
        text = folded
    return text


def tokenize(text: str) -> list[str]:
    """Split on runs of whitespace; an empty token list is a valid result."""
    return text.split()


def remove_stopwords(tokens: list[str], stopwords: frozenset[str] | set[str]) -> list[str]:
    return [t for t in tokens if t not in stopwords]


def preprocess(text: str, cfg: NormalizationConfig) -> list[str]:
    """normalize -> tokenize -> stopword filter, per the technique's config."""
    tokens = tokenize(normalize(text, cfg))
    if cfg.remove_stopwords:
        tokens = remove_stopwords(tokens, cfg.stopword_list)
    return tokens


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One term per line, UTF-8; blank lines and ``#`` comments ignored."""
    terms = set()
    with Path(path).open(encoding="utf-8") as handle:
        for line in handle:
            term = line.split("#", 1)[0].strip()
            if term:
                terms.add(term.lower())
    return frozenset(terms)


def english_stopwords() -> frozenset[str]:
    """The packaged English stopword list."""
    text = resources.files("ticketrec.data").joinpath("stopwords_en.txt").read_text("utf-8")
    terms = set()
    for line in text.splitlines():
        term = line.split("#", 1)[0].strip()
        if term:
            terms.add(term.lower())
    return frozenset(terms)
