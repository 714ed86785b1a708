"""Exact top-k retrieval over a chunk index."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .embedding import EmbeddingVector, cosine_similarity
from .errors import DimensionMismatch, EmptyIndex, UnknownChunkId
from .indexer import ChunkIndex

DEFAULT_TOP_K = 3


@dataclass(frozen=True)
class RetrievalResult:
    chunk_id: str
    score: float
    rank: int

    def to_json(self) -> dict:
        return {"chunk_id": self.chunk_id, "score": self.score, "rank": self.rank}


def score_all(index: ChunkIndex, query: EmbeddingVector) -> list[float]:
    if not index.chunks:
        raise EmptyIndex("index has no chunks")
    if query.dimension != index.dimension:
        raise DimensionMismatch(
            f"query dimension {query.dimension} != index dimension {index.dimension}")
    return [cosine_similarity(query, c.embedding) for c in index.chunks]


def retrieve_top_k(index: ChunkIndex, query: EmbeddingVector, k: int = DEFAULT_TOP_K,
                   min_score: Optional[float] = None) -> list[RetrievalResult]:
    """Rank every chunk by cosine score; ties keep index order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = score_all(index, query)
    # sorted() is stable, so equal scores stay in index order
    order = sorted(range(len(scores)), key=lambda i: -scores[i])
    results = []
    for i in order[:k]:
        if min_score is not None and scores[i] < min_score:
            break
        results.append(RetrievalResult(index.chunks[i].id, scores[i], len(results) + 1))
    return results


def format_rag_context(index: ChunkIndex, results: Sequence[RetrievalResult]) -> str:
    blocks = []
    for r in results:
        chunk = index.get(r.chunk_id)
        if chunk is None:
            raise UnknownChunkId(f"chunk {r.chunk_id!r} is not in the index")
        header = (f"### Retrieved example {r.rank} "
                  f"(task_type: {chunk.metadata.task_type}, score: {r.score:.4f})")
        blocks.append(f"{header}\n{chunk.text}")
    return "\n\n".join(blocks)


def format_rag_blocks(index: ChunkIndex, results: Sequence[RetrievalResult]) -> list[str]:
    """Per-result blocks, for budget-aware prompt assembly."""
    return [format_rag_context(index, [r]) for r in results]
