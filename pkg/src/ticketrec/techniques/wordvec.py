"""Word-vector tables and mean-pooled document vectors.

Training word embeddings is out of scope; tables are loaded from the
standard text format (header line "count dim", then one term per line
followed by its values).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..corpus import Corpus
from ..errors import DataError
from ..index import cosine
from ..textprep import NormalizationConfig, preprocess
from .base import Technique, config_from_record, preprocessing_record

log = logging.getLogger(__name__)


@dataclass
class WordVectorTable:
    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)
    duplicate_count: int = 0

    def __contains__(self, term: str) -> bool:
        return term in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


def load_word_vectors(path: str | Path) -> WordVectorTable:
    """Parse a word-vector text file; duplicate terms keep the last value
    (counted and logged), any dimension mismatch is an error naming the line."""
    path = Path(path)
    with path.open(encoding="utf-8") as handle:
        header = handle.readline().split()
        if len(header) != 2:
            raise DataError("line 1: expected header 'count dim'")
        try:
            declared_count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise DataError("line 1: header fields must be integers") from None
        if dim < 1:
            raise DataError(f"line 1: dimension must be >= 1, got {dim}")
        table = WordVectorTable(dim=dim)
        for line_no, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            parts = line.split()
            term = parts[0]
            if len(parts) - 1 != dim:
                raise DataError(
                    f"line {line_no}: expected {dim} values, got {len(parts) - 1}"
                )
            try:
                values = np.array([float(x) for x in parts[1:]])
            except ValueError as exc:
                raise DataError(f"line {line_no}: {exc}") from None
            if not np.all(np.isfinite(values)):
                raise DataError(f"line {line_no}: non-finite vector value")
            if term in table.vectors:
                table.duplicate_count += 1
            table.vectors[term] = values
    if table.duplicate_count:
        log.warning(
            "%s: %d duplicate term(s), last occurrence kept", path, table.duplicate_count
        )
    if len(table.vectors) != declared_count:
        log.warning(
            "%s: header declares %d terms, found %d",
            path,
            declared_count,
            len(table.vectors),
        )
    return table


def save_word_vectors(table: WordVectorTable, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        handle.write(f"{len(table.vectors)} {table.dim}\n")
        for term, values in table.vectors.items():
            rendered = " ".join(repr(float(v)) for v in values)
            handle.write(f"{term} {rendered}\n")


def embed_average(table: WordVectorTable, tokens: list[str]) -> np.ndarray:
    """Componentwise mean of the vectors of in-vocabulary tokens; the zero
    vector when every token is out of vocabulary."""
    known = [table.vectors[t] for t in tokens if t in table.vectors]
    if not known:
        return np.zeros(table.dim)
    return np.mean(known, axis=0)


class WordVectorTechnique(Technique):
    family = "wordvec-avg"
    kind = "vector"

    def __init__(
        self,
        table: Optional[WordVectorTable] = None,
        vector_path: Optional[str | Path] = None,
        cfg: Optional[NormalizationConfig] = None,
        name: Optional[str] = None,
    ):
        super().__init__(name)
        if table is None and vector_path is None:
            raise DataError("either a vector table or a vector file path is required")
        self.vector_path = str(vector_path) if vector_path is not None else None
        self.table = table if table is not None else load_word_vectors(vector_path)
        self.cfg = cfg or NormalizationConfig()

    def fit(self, train: Corpus) -> None:
        # Vectors come pre-trained from the file; nothing to fit.
        pass

    def represent(self, text: str, key: Optional[str] = None) -> np.ndarray:
        return embed_average(self.table, preprocess(text, self.cfg))

    def pair_score(self, query_repr, doc_repr) -> float:
        return cosine(query_repr, doc_repr)

    def preprocessing_config(self) -> Optional[NormalizationConfig]:
        return self.cfg

    def payload(self) -> dict:
        if self.vector_path is None:
            raise DataError("cannot serialize an in-memory vector table; give a file path")
        return {
            "vector_path": self.vector_path,
            "dim": self.table.dim,
            "preprocessing": preprocessing_record(self.cfg),
        }

    @classmethod
    def from_payload(cls, name: str, payload: dict) -> "WordVectorTechnique":
        technique = cls(
            vector_path=payload["vector_path"],
            cfg=config_from_record(payload["preprocessing"]),
            name=name,
        )
        if technique.table.dim != payload["dim"]:
            raise DataError(
                f"vector file dimension changed: artifact says {payload['dim']}, "
                f"file has {technique.table.dim}"
            )
        return technique
