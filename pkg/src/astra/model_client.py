"""Model endpoints: local runtime, remote chat API, and offline replay.

All three stream fragments through ``on_chunk`` and return a
:class:`GenerationResult` whose fragments join to the full text.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Optional

import requests

from .errors import (
    AuthMissing,
    EmptyResponse,
    EndpointUnreachable,
    ProtocolError,
    ReplayMiss,
)
from .structure.lexer import PUNCT, tokenize

MODEL_ENDPOINT_ENV = "ASTRA_MODEL_ENDPOINT"
DEFAULT_API_KEY_ENV = "ASTRA_API_KEY"
DEFAULT_TIMEOUT = 300.0
KINDS = ("local_runtime", "remote_api", "replay")


@dataclass(frozen=True)
class ModelEndpointConfig:
    kind: str = "replay"
    model_name: str = "replay"
    base_url: Optional[str] = None
    api_key_env: Optional[str] = DEFAULT_API_KEY_ENV
    replay_dir: Optional[str] = None
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown endpoint kind {self.kind!r}")
        if self.kind in ("local_runtime", "remote_api") and not self.base_url:
            raise ValueError(f"{self.kind} endpoint requires base_url")
        if self.kind == "replay" and not self.replay_dir:
            raise ValueError("replay endpoint requires replay_dir")


@dataclass
class GenerationResult:
    full_text: str
    chunks: list[str] = field(default_factory=list)
    model_name: str = ""


def prompt_digest(prompt: str) -> str:
    """First 16 hex digits of the prompt's SHA-256."""
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:16]


def _collect(fragments: Iterator[str], on_chunk, model_name: str) -> GenerationResult:
    chunks = []
    try:
        for frag in fragments:
            if not frag:
                continue
            chunks.append(frag)
            if on_chunk is not None:
                on_chunk(frag)
    except requests.RequestException as exc:
        raise EndpointUnreachable(f"stream interrupted: {exc}") from exc
    return GenerationResult("".join(chunks), chunks, model_name)


# -- replay ----------------------------------------------------------------

def _replay_paths(replay_dir, prompt: str) -> tuple[Path, Path, str]:
    digest = prompt_digest(prompt)
    base = Path(replay_dir)
    return base / f"{digest}.txt", base / f"{digest}.meta.json", digest


def record_response(replay_dir, prompt: str, chunks, model_name: str) -> Path:
    """Store a response so that replaying ``prompt`` yields ``chunks``."""
    chunks = list(chunks)
    text_path, meta_path, _ = _replay_paths(replay_dir, prompt)
    text_path.parent.mkdir(parents=True, exist_ok=True)
    boundaries = []
    pos = 0
    for c in chunks:
        pos += len(c)
        boundaries.append(pos)
    with open(text_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("".join(chunks))
    meta_path.write_text(json.dumps({"model_name": model_name, "boundaries": boundaries},
                                    indent=2) + "\n", encoding="utf-8")
    return text_path


def _replay_fragments(config: ModelEndpointConfig, prompt: str) -> tuple[list[str], str]:
    text_path, meta_path, digest = _replay_paths(config.replay_dir, prompt)
    if not text_path.is_file():
        raise ReplayMiss(digest)
    with open(text_path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    model_name = config.model_name
    boundaries = [len(text)]
    if meta_path.is_file():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        model_name = meta.get("model_name", model_name)
        boundaries = meta.get("boundaries") or boundaries
    if boundaries[-1] != len(text) or any(b > a for b, a in zip(boundaries, boundaries[1:])):
        raise ProtocolError(f"replay metadata for {digest} does not match the stored text")
    pieces, prev = [], 0
    for b in boundaries:
        pieces.append(text[prev:b])
        prev = b
    return pieces, model_name


# -- HTTP streaming --------------------------------------------------------

def _post_stream(url: str, payload: dict, headers: dict, timeout: float):
    try:
        resp = requests.post(url, json=payload, headers=headers, stream=True, timeout=timeout)
    except requests.RequestException as exc:
        raise EndpointUnreachable(f"{url}: {exc}") from exc
    if resp.status_code != 200:
        body = resp.text[:300]
        resp.close()
        raise EndpointUnreachable(f"{url}: HTTP {resp.status_code} {body}")
    return resp


def _ndjson_fragments(resp) -> Iterator[str]:
    done = False
    with resp:
        for raw in resp.iter_lines(decode_unicode=False):
            if not raw or not raw.strip():
                continue
            try:
                obj = json.loads(raw.decode("utf-8"))
            except (ValueError, UnicodeDecodeError) as exc:
                raise ProtocolError(f"malformed stream line {raw[:80]!r}") from exc
            if not isinstance(obj, dict) or ("response" not in obj and "error" not in obj):
                raise ProtocolError(f"unexpected stream object {obj!r}")
            if "error" in obj:
                raise ProtocolError(f"endpoint error: {obj['error']}")
            yield obj["response"]
            if obj.get("done"):
                done = True
                break
    if not done:
        raise ProtocolError("stream ended without a done marker")


def _sse_fragments(resp) -> Iterator[str]:
    finished = False
    with resp:
        for raw in resp.iter_lines(decode_unicode=False):
            line = raw.decode("utf-8", errors="replace").strip()
            if not line or line.startswith(":"):
                continue
            if not line.startswith("data:"):
                continue
            data = line[5:].strip()
            if data == "[DONE]":
                finished = True
                break
            try:
                obj = json.loads(data)
                choice = obj["choices"][0]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise ProtocolError(f"malformed event {data[:80]!r}") from exc
            delta = choice.get("delta") or {}
            content = delta.get("content")
            if content:
                yield content
            if choice.get("finish_reason"):
                finished = True
    if not finished:
        raise ProtocolError("event stream ended without [DONE]")


def generate(prompt: str, config: ModelEndpointConfig,
             on_chunk: Optional[Callable[[str], None]] = None) -> GenerationResult:
    """Send ``prompt`` to the configured endpoint and stream the reply."""
    if not prompt:
        raise ValueError("prompt must be non-empty")

    if config.kind == "replay":
        pieces, model_name = _replay_fragments(config, prompt)
        return _collect(iter(pieces), on_chunk, model_name)

    base = config.base_url.rstrip("/")
    if config.kind == "remote_api":
        key_env = config.api_key_env or DEFAULT_API_KEY_ENV
        key = os.environ.get(key_env)
        if not key:
            raise AuthMissing(f"environment variable {key_env} is not set")
        url = f"{base}/v1/chat/completions"
        payload = {"model": config.model_name, "stream": True,
                   "messages": [{"role": "user", "content": prompt}]}
        headers = {"Authorization": f"Bearer {key}", "Accept": "text/event-stream"}
        resp = _post_stream(url, payload, headers, config.timeout)
        return _collect(_sse_fragments(resp), on_chunk, config.model_name)

    url = f"{base}/api/generate"
    payload = {"model": config.model_name, "prompt": prompt, "stream": True}
    resp = _post_stream(url, payload, {}, config.timeout)
    return _collect(_ndjson_fragments(resp), on_chunk, config.model_name)


# -- response post-processing ---------------------------------------------

_FENCE_RE = re.compile(r"^[ \t]*(`{3,}|~{3,})")


def _trim_blank_lines(lines: list[str]) -> str:
    while lines and not lines[0].strip():
        lines.pop(0)
    while lines and not lines[-1].strip():
        lines.pop()
    return "\n".join(lines)


def _looks_like_code(line: str) -> bool:
    s = line.rstrip()
    if not s.strip():
        return True
    if s[0] in " \t":
        return True
    t = s.strip()
    if t in ("public:", "private:", "protected:"):
        return True
    return t.startswith(("#", "//", "/*", "*", "}", "{")) \
        or t.endswith((";", "{", "}", ")", ",", ">")) or ";" in t


def _brace_balanced(lines: list[str]) -> bool:
    depth = 0
    for tok in tokenize("\n".join(lines)):
        if tok.kind == PUNCT and tok.text == "{":
            depth += 1
        elif tok.kind == PUNCT and tok.text == "}":
            depth -= 1
            if depth < 0:
                return False
    return depth == 0


def extract_code_block(response: str) -> str:
    """Code from a model reply.

    The first fenced block wins (language tag ignored). Without fences,
    the longest run of code-looking lines that balances braces and holds a
    ``;`` is taken, else the whole reply.
    """
    if not response or not response.strip():
        raise EmptyResponse("model response is empty")
    lines = response.splitlines()
    for k, ln in enumerate(lines):
        m = _FENCE_RE.match(ln)
        if not m:
            continue
        fence = m.group(1)
        body = []
        for inner in lines[k + 1:]:
            if inner.strip().startswith(fence[0] * len(fence)) and \
                    inner.strip().strip(fence[0]) == "":
                break
            body.append(inner)
        return _trim_blank_lines(body)

    best: list[str] = []
    run: list[str] = []

    def consider(run):
        nonlocal best
        trimmed = _trim_blank_lines(list(run)).split("\n")
        if any(";" in ln for ln in trimmed) and _brace_balanced(trimmed) \
                and len(trimmed) > len(best):
            best = trimmed

    for ln in lines:
        if _looks_like_code(ln):
            run.append(ln)
        else:
            consider(run)
            run = []
    consider(run)
    if best:
        return "\n".join(best)
    return _trim_blank_lines(lines)
