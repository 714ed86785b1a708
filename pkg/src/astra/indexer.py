"""Annotated snippet parsing and the persisted chunk index.

A snippet file holds one or more blocks, each introduced by a comment
header whose first line carries ``AI_METADATA``::

    // AI_METADATA
    // task_type: MULTIFAB_FILL_PARALLELFOR
    // user_intent:
    // 1) Fill a multifab using ParallelFor
    // keywords: MFIter, ParallelFor
    // inputs: MultiFab mf
    // outputs: mf data initialized

Only the ``user_intent`` entries are embedded.
"""

from __future__ import annotations

import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .embedding import EmbeddingVector, join_intents
from .errors import (
    CorruptEmbedding,
    DimensionMismatch,
    DuplicateId,
    EmptyBody,
    EmptyIntent,
    FormatVersionMismatch,
    MalformedPair,
    MissingMarker,
)

log = logging.getLogger(__name__)

INDEX_FORMAT_VERSION = 1
MARKER = "AI_METADATA"
KNOWN_KEYS = ("example", "task_type", "user_intent", "keywords", "inputs", "outputs")
SOURCE_SUFFIXES = {".c", ".cc", ".cpp", ".cxx", ".h", ".hh", ".hpp", ".hxx", ".H", ".inl"}

_TASK_TYPE_RE = re.compile(r"[A-Z0-9_]+")
_COMMENT_RE = re.compile(r"^\s*//(.*)$")
_KEY_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*:(.*)$")
_INTENT_RE = re.compile(r"^\s*(\d+)\)\s*(.*)$")


@dataclass(frozen=True)
class ChunkMetadata:
    task_type: str
    user_intent: tuple[str, ...]
    example: str = ""
    keywords: str = ""
    inputs: str = ""
    outputs: str = ""
    extra: dict = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "user_intent", tuple(self.user_intent))
        if not self.user_intent:
            raise EmptyIntent("user_intent must have at least one entry")
        if any(not s.strip() for s in self.user_intent):
            raise EmptyIntent("user_intent entries must be non-blank")
        if not _TASK_TYPE_RE.fullmatch(self.task_type):
            raise ValueError(f"task_type {self.task_type!r} is not uppercase snake-case")

    def joined_intent(self) -> str:
        return join_intents(self.user_intent)

    def to_json(self) -> dict:
        return {
            "example": self.example,
            "task_type": self.task_type,
            "keywords": self.keywords,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "user_intent": list(self.user_intent),
            "extra": dict(self.extra),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ChunkMetadata":
        return cls(
            task_type=obj["task_type"],
            user_intent=tuple(obj["user_intent"]),
            example=obj.get("example", ""),
            keywords=obj.get("keywords", ""),
            inputs=obj.get("inputs", ""),
            outputs=obj.get("outputs", ""),
            extra=dict(obj.get("extra", {})),
        )


@dataclass(frozen=True)
class ParsedSnippet:
    metadata: ChunkMetadata
    body: str
    header: str = ""
    start_line: int = 1
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class CodeChunk:
    id: str
    text: str
    metadata: ChunkMetadata
    embedding: EmbeddingVector

    def __post_init__(self):
        if not self.text:
            raise EmptyBody(f"chunk {self.id} has an empty body")


@dataclass(frozen=True)
class ChunkIndex:
    dimension: int
    embedder_id: str
    chunks: tuple[CodeChunk, ...]

    def __post_init__(self):
        object.__setattr__(self, "chunks", tuple(self.chunks))
        if self.dimension <= 0:
            raise ValueError("dimension must be positive")
        seen = set()
        for c in self.chunks:
            if c.id in seen:
                raise DuplicateId(f"duplicate chunk id {c.id}")
            seen.add(c.id)
            if c.embedding.dimension != self.dimension:
                raise CorruptEmbedding(
                    f"chunk {c.id} has {c.embedding.dimension} values, expected {self.dimension}",
                    c.id)

    def __len__(self) -> int:
        return len(self.chunks)

    def get(self, chunk_id: str) -> Optional[CodeChunk]:
        for c in self.chunks:
            if c.id == chunk_id:
                return c
        return None


@dataclass(frozen=True)
class Snippet:
    """A parsed block together with where it came from."""

    source: str
    ordinal: int
    parsed: ParsedSnippet

    @property
    def id(self) -> str:
        return f"{self.source}#{self.ordinal}"


def _parse_header(lines: Sequence[str], first_lineno: int):
    """Parse comment lines following the marker line.

    Returns (fields, extra, intents, warnings); raises MalformedPair.
    """
    fields: dict[str, str] = {}
    extra: dict[str, str] = {}
    intents: list[str] = []
    warnings: list[str] = []
    current: Optional[str] = None

    for offset, raw in enumerate(lines):
        lineno = first_lineno + offset
        content = _COMMENT_RE.match(raw).group(1)
        stripped = content.strip()
        if not stripped:
            continue
        # one conventional space after "//"; more means a wrapped continuation
        indented = content.startswith("  ") or content.startswith("\t")

        if current == "user_intent":
            m = _INTENT_RE.match(content)
            if m:
                intents.append(m.group(2).strip())
                continue
            if intents and (indented or not _KEY_RE.match(stripped)):
                intents[-1] = f"{intents[-1]} {stripped}".strip()
                continue
        elif current is not None and indented and not _KEY_RE.match(stripped):
            target = fields if current in KNOWN_KEYS else extra
            target[current] = f"{target[current]} {stripped}".strip()
            continue

        m = _KEY_RE.match(stripped)
        if not m:
            raise MalformedPair(f"expected 'key: value' or an intent entry, got {stripped!r}",
                                lineno)
        key, value = m.group(1), m.group(2).strip()
        if key == "user_intent":
            if value:
                im = _INTENT_RE.match(value)
                intents.append(im.group(2).strip() if im else value)
        elif key in KNOWN_KEYS:
            if key in fields:
                warnings.append(f"line {lineno}: duplicate key {key!r}, keeping the last value")
            fields[key] = value
        else:
            extra[key] = value
        current = key

    return fields, extra, intents, warnings


def _split_blocks(lines: Sequence[str]) -> list[int]:
    return [i for i, ln in enumerate(lines)
            if _COMMENT_RE.match(ln) and MARKER in ln]


def _trim_blank_edges(lines: list[str]) -> list[str]:
    start, end = 0, len(lines)
    while start < end and not lines[start].strip():
        start += 1
    while end > start and not lines[end - 1].strip():
        end -= 1
    return lines[start:end]


def _parse_block(lines: Sequence[str], marker_idx: int, stop: int) -> ParsedSnippet:
    header_end = marker_idx + 1
    while header_end < stop and _COMMENT_RE.match(lines[header_end]):
        header_end += 1
    fields, extra, intents, warnings = _parse_header(lines[marker_idx + 1:header_end],
                                                     marker_idx + 2)
    if not intents:
        raise EmptyIntent(f"block at line {marker_idx + 1} has no user_intent entries")
    if any(not s for s in intents):
        raise EmptyIntent(f"block at line {marker_idx + 1} has a blank user_intent entry")
    for key in ("task_type", "keywords", "inputs", "outputs"):
        if key not in fields:
            warnings.append(f"block at line {marker_idx + 1}: missing {key!r}")
    task_type = fields.get("task_type", "") or "UNSPECIFIED"
    if not _TASK_TYPE_RE.fullmatch(task_type):
        raise MalformedPair(f"task_type {task_type!r} is not uppercase snake-case",
                            marker_idx + 1)
    meta = ChunkMetadata(
        task_type=task_type,
        user_intent=tuple(intents),
        example=fields.get("example", ""),
        keywords=fields.get("keywords", ""),
        inputs=fields.get("inputs", ""),
        outputs=fields.get("outputs", ""),
        extra=extra,
    )
    body_lines = _trim_blank_edges(list(lines[header_end:stop]))
    header = "\n".join(lines[marker_idx:header_end])
    return ParsedSnippet(meta, "\n".join(body_lines), header, marker_idx + 1, tuple(warnings))


def parse_annotated_file(text: str) -> list[ParsedSnippet]:
    """Parse every AI_METADATA block in a file, in order."""
    lines = text.splitlines()
    starts = _split_blocks(lines)
    if not starts:
        raise MissingMarker(f"no {MARKER} comment line found")
    out = []
    for n, idx in enumerate(starts):
        stop = starts[n + 1] if n + 1 < len(starts) else len(lines)
        out.append(_parse_block(lines, idx, stop))
    return out


def parse_annotated_snippet(text: str) -> tuple[ChunkMetadata, str]:
    """Parse a single annotated snippet into (metadata, body).

    Text before the marker line is ignored; a second marker starts a new
    block and is not part of this body.
    """
    first = parse_annotated_file(text)[0]
    for w in first.warnings:
        log.warning(w)
    return first.metadata, first.body


def build_index(snippets: Sequence[Snippet], embedder, keep_header: bool = False) -> ChunkIndex:
    chunks = []
    seen: dict[str, int] = {}
    dimension: Optional[int] = None
    for snip in snippets:
        if snip.id in seen:
            raise DuplicateId(f"chunk id {snip.id} produced twice")
        seen[snip.id] = 1
        parsed = snip.parsed
        if not parsed.body.strip():
            raise EmptyBody(f"{snip.id}: snippet has no code after its metadata header")
        vec = embedder.embed(parsed.metadata.joined_intent())
        if dimension is None:
            dimension = vec.dimension
        elif vec.dimension != dimension:
            raise DimensionMismatch(
                f"{snip.id}: embedder returned {vec.dimension} values, earlier {dimension}")
        text = f"{parsed.header}\n\n{parsed.body}" if keep_header else parsed.body
        chunks.append(CodeChunk(snip.id, text, parsed.metadata, vec))
    if dimension is None:
        dimension = embedder.dimension
    return ChunkIndex(dimension, embedder.embedder_id, tuple(chunks))


def collect_snippets(corpus: Path, workers: int = 4) -> list[Snippet]:
    """Read every annotated source file under ``corpus`` in path order."""
    corpus = Path(corpus)
    files = sorted((p for p in corpus.rglob("*") if p.is_file() and p.suffix in SOURCE_SUFFIXES),
                   key=lambda p: p.relative_to(corpus).as_posix())

    def load(path: Path):
        text = path.read_text(encoding="utf-8", errors="replace")
        if MARKER not in text:
            return []
        rel = path.relative_to(corpus).as_posix()
        return [Snippet(rel, i, p) for i, p in enumerate(parse_annotated_file(text))]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        per_file = list(pool.map(load, files))
    snippets = [s for group in per_file for s in group]
    for s in snippets:
        for w in s.parsed.warnings:
            log.warning("%s: %s", s.source, w)
    return snippets


def index_corpus(corpus: Path, embedder, keep_header: bool = False) -> ChunkIndex:
    return build_index(collect_snippets(corpus), embedder, keep_header=keep_header)


def index_to_json(index: ChunkIndex) -> dict:
    return {
        "version": INDEX_FORMAT_VERSION,
        "dimension": index.dimension,
        "embedder_id": index.embedder_id,
        "chunks": [
            {
                "id": c.id,
                "text": c.text,
                "metadata": c.metadata.to_json(),
                "embedding": list(c.embedding.values),
            }
            for c in index.chunks
        ],
    }


def index_from_json(obj: dict) -> ChunkIndex:
    version = obj.get("version")
    if version != INDEX_FORMAT_VERSION:
        raise FormatVersionMismatch(f"index version {version!r}, expected {INDEX_FORMAT_VERSION}")
    dimension = int(obj["dimension"])
    chunks = []
    for raw in obj["chunks"]:
        values = raw["embedding"]
        if len(values) != dimension:
            raise CorruptEmbedding(
                f"chunk {raw['id']} has {len(values)} embedding values, expected {dimension}",
                raw["id"])
        chunks.append(CodeChunk(raw["id"], raw["text"], ChunkMetadata.from_json(raw["metadata"]),
                                EmbeddingVector(tuple(float(v) for v in values))))
    return ChunkIndex(dimension, obj["embedder_id"], tuple(chunks))


def save_index(index: ChunkIndex, path) -> None:
    Path(path).write_text(json.dumps(index_to_json(index), indent=2) + "\n", encoding="utf-8")


def load_index(path) -> ChunkIndex:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return index_from_json(obj)


def iter_intents(index: ChunkIndex) -> Iterable[tuple[str, str]]:
    for c in index.chunks:
        yield c.id, c.metadata.joined_intent()
