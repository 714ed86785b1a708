"""Text embeddings and cosine similarity.

Two providers sit behind one contract: a deterministic hashed
bag-of-tokens embedder that works offline, and a remote provider that
speaks the local-runtime ``/api/embeddings`` protocol.
"""

from __future__ import annotations

import hashlib
import math
import os
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import requests

from .errors import BlankInput, DimensionMismatch, RemoteUnavailable, ZeroVector

DEFAULT_DIMENSION = 384
EMBED_ENDPOINT_ENV = "ASTRA_EMBED_ENDPOINT"

_TOKEN_RE = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    def __post_init__(self):
        if not isinstance(self.values, tuple):
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise DimensionMismatch("embedding must have positive dimension")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("embedding contains non-finite values")

    @property
    def dimension(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class EmbedderConfig:
    kind: str = "deterministic"
    dimension: int = DEFAULT_DIMENSION
    endpoint: Optional[str] = None
    model_name: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("deterministic", "remote"):
            raise ValueError(f"unknown embedder kind {self.kind!r}")
        if self.dimension <= 0:
            raise ValueError("dimension must be positive")
        if self.kind == "remote" and not (self.endpoint and self.model_name):
            raise ValueError("remote embedder requires endpoint and model_name")


def tokenize(text: str) -> list[str]:
    """Lowercased alphanumeric runs; underscores split tokens."""
    return _TOKEN_RE.findall(text.lower())


def token_hash(token: str) -> int:
    """64-bit BLAKE2b digest of the UTF-8 token, read big-endian."""
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


class DeterministicEmbedder:
    """Hashed bag-of-tokens embedder.

    Each token lands in bucket ``h % dimension`` with sign taken from bit 63
    of its hash; the accumulated counts are L2-normalized.
    """

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = dimension

    @property
    def embedder_id(self) -> str:
        return f"hashed-bow/blake2b-64/dim={self.dimension}"

    def embed(self, text: str) -> EmbeddingVector:
        if not text or not text.strip():
            raise BlankInput("cannot embed blank text")
        tokens = tokenize(text)
        if not tokens:
            raise BlankInput("text contains no alphanumeric tokens")
        counts = [0] * self.dimension
        for tok in tokens:
            h = token_hash(tok)
            sign = -1 if h >> 63 else 1
            counts[h % self.dimension] += sign
        norm = math.sqrt(math.fsum(c * c for c in counts))
        if norm == 0.0:
            raise ZeroVector("token contributions cancelled to a zero vector")
        return EmbeddingVector(tuple(c / norm for c in counts))


class RemoteEmbedder:
    def __init__(self, endpoint: str, model_name: str, dimension: int = DEFAULT_DIMENSION,
                 timeout: float = 60.0):
        self.endpoint = endpoint.rstrip("/")
        self.model_name = model_name
        self.dimension = dimension
        self.timeout = timeout

    @property
    def embedder_id(self) -> str:
        return f"remote/{self.model_name}/dim={self.dimension}"

    def embed(self, text: str) -> EmbeddingVector:
        if not text or not text.strip():
            raise BlankInput("cannot embed blank text")
        url = f"{self.endpoint}/api/embeddings"
        try:
            resp = requests.post(url, json={"model": self.model_name, "prompt": text},
                                 timeout=self.timeout)
        except requests.RequestException as exc:
            raise RemoteUnavailable(f"{url}: {exc}") from exc
        if resp.status_code != 200:
            raise RemoteUnavailable(f"{url}: HTTP {resp.status_code} {resp.text[:200]}")
        try:
            values = resp.json()["embedding"]
        except (ValueError, KeyError, TypeError) as exc:
            raise RemoteUnavailable(f"{url}: malformed response ({exc})") from exc
        if len(values) != self.dimension:
            raise DimensionMismatch(
                f"{url} returned {len(values)} values, expected {self.dimension}")
        return EmbeddingVector(tuple(float(v) for v in values))


def make_embedder(config: EmbedderConfig):
    if config.kind == "deterministic":
        return DeterministicEmbedder(config.dimension)
    endpoint = os.environ.get(EMBED_ENDPOINT_ENV) or config.endpoint
    return RemoteEmbedder(endpoint, config.model_name, config.dimension)


def embed_text(text: str, config: EmbedderConfig) -> EmbeddingVector:
    return make_embedder(config).embed(text)


def _values(v) -> Sequence[float]:
    return v.values if isinstance(v, EmbeddingVector) else v


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1]."""
    av, bv = _values(a), _values(b)
    if len(av) != len(bv):
        raise DimensionMismatch(f"dimension {len(av)} != {len(bv)}")
    na = math.sqrt(math.fsum(x * x for x in av))
    nb = math.sqrt(math.fsum(y * y for y in bv))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity undefined for a zero vector")
    score = math.fsum(x * y for x, y in zip(av, bv)) / (na * nb)
    return max(-1.0, min(1.0, score))


def join_intents(intents: Iterable[str]) -> str:
    return "\n".join(intents)
