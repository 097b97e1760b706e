"""Embeddings obtained outside the process: precomputed per-ticket vector
files, or a remote HTTP provider with a persistent content-addressed cache.

The provider contract is a POST of {"text": ...} answered by
{"values": [...]}; any vector whose length differs from the declared
dimension is a contract violation, never silently accepted.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import httpx
import numpy as np

from ..corpus import Corpus
from ..errors import ContractViolation, DataError, ProviderError
from ..index import cosine
from .base import Technique

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbeddingProviderSpec:
    name: str
    dim: int
    endpoint: Optional[str] = None  # remote HTTP provider
    vector_file: Optional[str] = None  # precomputed vectors keyed by ticket id
    timeout_s: float = 10.0
    retries: int = 2

    def __post_init__(self):
        if self.dim < 1:
            raise DataError(f"dimension must be >= 1, got {self.dim}")
        if (self.endpoint is None) == (self.vector_file is None):
            raise DataError("exactly one of endpoint or vector_file must be set")


def _check_values(values, spec: EmbeddingProviderSpec, context: str) -> np.ndarray:
    array = np.asarray(values, dtype=float)
    if array.ndim != 1 or array.shape[0] != spec.dim:
        raise ContractViolation(
            f"{context}: provider {spec.name!r} declared dim {spec.dim}, "
            f"got {array.shape}"
        )
    if not np.all(np.isfinite(array)):
        raise ContractViolation(f"{context}: non-finite embedding value")
    return array


def load_vector_file(path: str | Path, spec: EmbeddingProviderSpec) -> dict[str, np.ndarray]:
    """Precomputed ticket-embedding JSONL: a header record declaring the
    provider name and dimension, then one {external_id, values} per line."""
    path = Path(path)
    vectors: dict[str, np.ndarray] = {}
    with path.open(encoding="utf-8") as handle:
        header_line = handle.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError:
            raise DataError(f"{path}: line 1: malformed header record") from None
        if "dim" not in header or "provider" not in header:
            raise DataError(f"{path}: line 1: header must declare provider and dim")
        if header["dim"] != spec.dim:
            raise ContractViolation(
                f"{path}: file declares dim {header['dim']}, spec says {spec.dim}"
            )
        for line_no, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                raise DataError(f"{path}: line {line_no}: malformed JSON") from None
            if "external_id" not in record or "values" not in record:
                raise DataError(
                    f"{path}: line {line_no}: expected external_id and values"
                )
            vectors[record["external_id"]] = _check_values(
                record["values"], spec, f"{path}: line {line_no}"
            )
    return vectors


def write_vector_file(
    path: str | Path,
    spec: EmbeddingProviderSpec,
    vectors: dict[str, np.ndarray],
) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        handle.write(json.dumps({"provider": spec.name, "dim": spec.dim}) + "\n")
        for external_id, values in vectors.items():
            record = {"external_id": external_id, "values": [float(v) for v in values]}
            handle.write(json.dumps(record) + "\n")


class EmbeddingCache:
    """Persistent content-addressed store of provider responses.

    One JSON file per key under the cache directory; writes are
    serialized and atomic (write-then-rename), reads never block.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()

    @staticmethod
    def key(spec: EmbeddingProviderSpec, text: str) -> str:
        blob = f"{spec.name}\x1f{spec.dim}\x1f{text}".encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> Optional[list[float]]:
        path = self._path(key)
        if not path.exists():
            return None
        with path.open(encoding="utf-8") as handle:
            return json.load(handle)["values"]

    def put(self, key: str, values: list[float]) -> None:
        with self._write_lock:
            tmp = self._path(key).with_suffix(".tmp")
            tmp.write_text(json.dumps({"values": values}), encoding="utf-8")
            tmp.replace(self._path(key))


class RemoteEmbeddingClient:
    def __init__(self, spec: EmbeddingProviderSpec, cache: Optional[EmbeddingCache] = None):
        if spec.endpoint is None:
            raise DataError("spec has no remote endpoint")
        self.spec = spec
        self.cache = cache

    def embed(self, text: str) -> np.ndarray:
        if self.cache is not None:
            cached = self.cache.get(EmbeddingCache.key(self.spec, text))
            if cached is not None:
                return _check_values(cached, self.spec, "cache")
        values = self._fetch(text)
        array = _check_values(values, self.spec, self.spec.endpoint or "provider")
        if self.cache is not None:
            self.cache.put(EmbeddingCache.key(self.spec, text), [float(v) for v in array])
        return array

    def _fetch(self, text: str) -> list[float]:
        last_error: Optional[Exception] = None
        for attempt in range(self.spec.retries + 1):
            try:
                response = httpx.post(
                    self.spec.endpoint,
                    json={"text": text},
                    timeout=self.spec.timeout_s,
                )
                response.raise_for_status()
                body = response.json()
                if "values" not in body:
                    raise ContractViolation(
                        f"provider {self.spec.name!r} response has no 'values'"
                    )
                return body["values"]
            except ContractViolation:
                raise
            except (httpx.HTTPError, json.JSONDecodeError, ValueError) as exc:
                last_error = exc
                if attempt < self.spec.retries:
                    time.sleep(0.05 * (attempt + 1))
        raise ProviderError(
            f"provider {self.spec.name!r} failed after "
            f"{self.spec.retries + 1} attempt(s): {last_error}",
            retryable=True,
        )


class ExternalEmbeddingTechnique(Technique):
    """Vectors from an out-of-process embedding model; raw text, no
    shared preprocessing."""

    family = "external-embed"
    kind = "vector"

    def __init__(
        self,
        spec: EmbeddingProviderSpec,
        cache_dir: Optional[str | Path] = None,
        name: Optional[str] = None,
    ):
        super().__init__(name or spec.name)
        self.spec = spec
        self.cache_dir = str(cache_dir) if cache_dir is not None else None
        self._client: Optional[RemoteEmbeddingClient] = None
        self._vectors: Optional[dict[str, np.ndarray]] = None
        if spec.vector_file is not None:
            self._vectors = load_vector_file(spec.vector_file, spec)
        else:
            cache = EmbeddingCache(cache_dir) if cache_dir is not None else None
            self._client = RemoteEmbeddingClient(spec, cache)

    def fit(self, train: Corpus) -> None:
        # The embedding model lives outside the process.
        pass

    def represent(self, text: str, key: Optional[str] = None) -> np.ndarray:
        if self._vectors is not None:
            if key is None:
                raise DataError(
                    f"provider {self.spec.name!r} is keyed by ticket id; no id given"
                )
            if key not in self._vectors:
                raise DataError(f"no precomputed vector for ticket {key!r}")
            return self._vectors[key]
        assert self._client is not None
        return self._client.embed(text)

    def pair_score(self, query_repr, doc_repr) -> float:
        return cosine(query_repr, doc_repr)

    def payload(self) -> dict:
        return {
            "spec": {
                "name": self.spec.name,
                "dim": self.spec.dim,
                "endpoint": self.spec.endpoint,
                "vector_file": self.spec.vector_file,
                "timeout_s": self.spec.timeout_s,
                "retries": self.spec.retries,
            },
            "cache_dir": self.cache_dir,
            "preprocessing": None,
        }

    @classmethod
    def from_payload(cls, name: str, payload: dict) -> "ExternalEmbeddingTechnique":
        return cls(
            EmbeddingProviderSpec(**payload["spec"]),
            cache_dir=payload.get("cache_dir"),
            name=name,
        )


def external_embed(
    spec: EmbeddingProviderSpec,
    key: str,
    cache_dir: Optional[str | Path] = None,
) -> np.ndarray:
    """One-shot lookup: ``key`` is a ticket id for vector-file providers and
    the raw text for remote providers."""
    technique = ExternalEmbeddingTechnique(spec, cache_dir=cache_dir)
    if spec.vector_file is not None:
        return technique.represent("", key=key)
    return technique.represent(key)
