"""The retrieval techniques and their model-artifact (de)serialization."""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import DataError
from .base import Technique, fingerprint
from .bm25 import Bm25DocProfile, Bm25Index, Bm25Params, Bm25Technique, bm25_fit, bm25_score
from .expert import (
    ExpertSystemTechnique,
    Lexicon,
    bundled_lexicon,
    expert_labels,
    jaccard,
    load_lexicon,
)
from .external import (
    EmbeddingCache,
    EmbeddingProviderSpec,
    ExternalEmbeddingTechnique,
    RemoteEmbeddingClient,
    external_embed,
    load_vector_file,
    write_vector_file,
)
from .lda import LdaConfig, LdaModel, LdaTechnique, lda_fit, lda_represent
from .random_pick import RandomTechnique, random_select
from .tfidf import TfidfModel, TfidfTechnique, tfidf_fit, tfidf_represent
from .wordvec import (
    WordVectorTable,
    WordVectorTechnique,
    embed_average,
    load_word_vectors,
    save_word_vectors,
)

ARTIFACT_FORMAT = "ticketrec-model"
ARTIFACT_VERSION = 1

FAMILIES: dict[str, type[Technique]] = {
    cls.family: cls
    for cls in (
        ExpertSystemTechnique,
        TfidfTechnique,
        Bm25Technique,
        LdaTechnique,
        WordVectorTechnique,
        ExternalEmbeddingTechnique,
        RandomTechnique,
    )
}


def save_artifact(technique: Technique, path: str | Path) -> None:
    """Serialize a fitted technique, embedding a fingerprint of everything
    that could silently change its behavior."""
    payload = technique.payload()
    document = {
        "format": ARTIFACT_FORMAT,
        "version": ARTIFACT_VERSION,
        "family": technique.family,
        "name": technique.name,
        "config_fingerprint": fingerprint(
            technique.family, payload.get("preprocessing"), payload
        ),
        "payload": payload,
    }
    Path(path).write_text(
        json.dumps(document, sort_keys=True, ensure_ascii=True), encoding="utf-8"
    )


def load_artifact(path: str | Path) -> Technique:
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError:
        raise DataError(f"{path}: not a model artifact (malformed JSON)") from None
    if document.get("format") != ARTIFACT_FORMAT:
        raise DataError(f"{path}: not a {ARTIFACT_FORMAT} artifact")
    if document.get("version") != ARTIFACT_VERSION:
        raise DataError(f"{path}: unsupported artifact version {document.get('version')}")
    family = document.get("family")
    if family not in FAMILIES:
        raise DataError(f"{path}: unknown technique family {family!r}")
    payload = document["payload"]
    expected = fingerprint(family, payload.get("preprocessing"), payload)
    if document.get("config_fingerprint") != expected:
        raise DataError(f"{path}: config fingerprint mismatch; artifact was altered")
    return FAMILIES[family].from_payload(document["name"], payload)


__all__ = [
    "ARTIFACT_FORMAT",
    "ARTIFACT_VERSION",
    "FAMILIES",
    "Bm25DocProfile",
    "Bm25Index",
    "Bm25Params",
    "Bm25Technique",
    "EmbeddingCache",
    "EmbeddingProviderSpec",
    "ExpertSystemTechnique",
    "ExternalEmbeddingTechnique",
    "LdaConfig",
    "LdaModel",
    "LdaTechnique",
    "Lexicon",
    "RandomTechnique",
    "RemoteEmbeddingClient",
    "Technique",
    "TfidfModel",
    "TfidfTechnique",
    "WordVectorTable",
    "WordVectorTechnique",
    "bm25_fit",
    "bm25_score",
    "bundled_lexicon",
    "embed_average",
    "expert_labels",
    "external_embed",
    "jaccard",
    "lda_fit",
    "lda_represent",
    "load_artifact",
    "load_lexicon",
    "load_vector_file",
    "load_word_vectors",
    "random_select",
    "save_artifact",
    "save_word_vectors",
    "tfidf_fit",
    "tfidf_represent",
    "write_vector_file",
]
