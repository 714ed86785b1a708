"""Intent classification and four-section prompt assembly."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import BlankPrompt, EmptyUserPrompt

GENERAL = "----- General instructions -----"
RAG = "----- Context derived from Retrieval Augmented Generation (RAG) -----"
AST = "----- Information derived from Abstract Syntax Tree (AST) analysis -----"
USER = "----- User prompt -----"
DELIMITERS = (GENERAL, RAG, AST, USER)

DEFAULT_GENERAL_INSTRUCTIONS = """\
You are an expert C++ developer working inside an existing HPC code base.
Follow the coding style, naming and idioms shown in the retrieved examples.
Use only APIs that appear in the examples or in the structural information.
Modify only the requested function; do not change its signature or any other code.
Return the complete function in a single fenced ```cpp code block."""

EDIT_WORDS = ("modify", "change", "replace", "port", "rewrite", "edit")
EXPLAIN_PHRASES = ("explain", "what does", "describe")


@dataclass(frozen=True)
class Intent:
    kind: str = "generate"
    mentioned_classes: tuple[str, ...] = ()
    mentioned_functions: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"kind": self.kind, "mentioned_classes": list(self.mentioned_classes),
                "mentioned_functions": list(self.mentioned_functions)}


@dataclass(frozen=True)
class PromptBundle:
    general_instructions: str
    rag_context: str
    ast_context: str
    user_prompt: str

    def sections(self) -> tuple[str, str, str, str]:
        return (self.general_instructions, self.rag_context, self.ast_context, self.user_prompt)


def _phrase_re(phrase: str) -> re.Pattern:
    words = [re.escape(w) for w in phrase.split()]
    return re.compile(r"\b" + r"\s+".join(words) + r"\b", re.IGNORECASE)


_EDIT_RES = [_phrase_re(w) for w in EDIT_WORDS]
_EXPLAIN_RES = [_phrase_re(w) for w in EXPLAIN_PHRASES]


def _mentions(prompt: str, symbols: Iterable[str]) -> tuple[str, ...]:
    out = []
    for sym in symbols:
        if sym and sym not in out and re.search(
                r"(?<![A-Za-z0-9_])" + re.escape(sym) + r"(?![A-Za-z0-9_])", prompt):
            out.append(sym)
    return tuple(out)


def classify_intent(user_prompt: str, known_classes: Sequence[str] = (),
                    known_functions: Sequence[str] = ()) -> Intent:
    """Keyword-rule intent: edit beats explain, generate is the default."""
    if not user_prompt or not user_prompt.strip():
        raise BlankPrompt("user prompt is blank")
    if any(r.search(user_prompt) for r in _EDIT_RES):
        kind = "edit"
    elif any(r.search(user_prompt) for r in _EXPLAIN_RES):
        kind = "explain"
    else:
        kind = "generate"
    return Intent(kind, _mentions(user_prompt, known_classes),
                  _mentions(user_prompt, known_functions))


def escape_body(body: str) -> str:
    """Prefix a space to lines that are a delimiter preceded only by spaces."""
    out = []
    for ln in body.split("\n"):
        if ln.lstrip(" ") in DELIMITERS:
            out.append(" " + ln)
        else:
            out.append(ln)
    return "\n".join(out)


def unescape_body(body: str) -> str:
    out = []
    for ln in body.split("\n"):
        if ln.startswith(" ") and ln.lstrip(" ") in DELIMITERS:
            out.append(ln[1:])
        else:
            out.append(ln)
    return "\n".join(out)


def compose_prompt(bundle: PromptBundle) -> str:
    """Render the four sections, each under its delimiter line.

    Every section is ``delimiter\\nbody\\n``, so an empty section leaves a
    blank line after its delimiter.
    """
    if not bundle.user_prompt or not bundle.user_prompt.strip():
        raise EmptyUserPrompt("user prompt section is empty")
    parts = []
    for delim, body in zip(DELIMITERS, bundle.sections()):
        parts.append(f"{delim}\n{escape_body(body)}\n")
    return "".join(parts)


def parse_prompt(text: str) -> PromptBundle:
    """Inverse of :func:`compose_prompt`."""
    lines = text.split("\n")
    if text.endswith("\n"):
        lines = lines[:-1]
    positions = []
    for delim in DELIMITERS:
        start = positions[-1] + 1 if positions else 0
        try:
            positions.append(lines.index(delim, start))
        except ValueError:
            raise ValueError(f"delimiter {delim!r} missing") from None
    if positions[0] != 0:
        raise ValueError("text does not start with the general-instructions delimiter")
    bodies = []
    for n, pos in enumerate(positions):
        end = positions[n + 1] if n + 1 < len(positions) else len(lines)
        bodies.append(unescape_body("\n".join(lines[pos + 1:end])))
    return PromptBundle(*bodies)


def build_bundle(user_prompt: str, rag_blocks: Sequence[str] = (),
                 ast_blocks: Sequence[tuple[str, bool]] = (),
                 general_instructions: str = DEFAULT_GENERAL_INSTRUCTIONS,
                 char_budget: Optional[int] = None) -> PromptBundle:
    """Assemble a bundle, trimming context to fit ``char_budget``.

    ``rag_blocks`` are in rank order; ``ast_blocks`` pair rendered text with
    a flag saying whether the block is focused (never dropped). Over
    budget, the lowest-ranked RAG block goes first, then unfocused AST
    blocks from the end.
    """
    rag = list(rag_blocks)
    ast = list(ast_blocks)

    def render() -> PromptBundle:
        return PromptBundle(general_instructions.strip("\n"), "\n\n".join(rag),
                            "\n\n".join(text for text, _ in ast), user_prompt.strip("\n"))

    bundle = render()
    if char_budget is None:
        return bundle
    while len(compose_prompt(bundle)) > char_budget:
        if rag:
            rag.pop()
        else:
            droppable = [k for k, (_, focused) in enumerate(ast) if not focused]
            if not droppable:
                break
            ast.pop(droppable[-1])
        bundle = render()
    return bundle
