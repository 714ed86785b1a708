"""Conflict-marker edits over whole-line function ranges.

``apply_with_markers`` swaps a line range for a marker block holding the
current lines and the proposed replacement::

    <<<<<<< current
    ...current lines...
    =======
    ...replacement...
    >>>>>>> astra:<label>

``resolve`` keeps one side and drops the markers. When the range ends at
a final line without a newline, the closing marker inherits that missing
newline so rejecting restores the file byte for byte.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    MalformedMarkers,
    MultipleBlocks,
    NoMarkers,
    RangeOutOfBounds,
    StaleProposal,
)
from .structure.extractor import SourceRange
from .structure.lexer import PUNCT, tokenize

START = "<<<<<<<"
SEP = "======="
END = ">>>>>>>"
CURRENT_LABEL = "current"
BACKUP_SUFFIX = ".astra.bak"


@dataclass(frozen=True)
class EditProposal:
    file: str
    range: SourceRange
    original_text: str
    replacement_text: str
    marker_label: str

    def __post_init__(self):
        if not self.replacement_text:
            raise ValueError("replacement_text must be non-empty")

    def to_json(self) -> dict:
        return {
            "file": self.file,
            "range": self.range.to_json(),
            "original_text": self.original_text,
            "replacement_text": self.replacement_text,
            "marker_label": self.marker_label,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EditProposal":
        return cls(obj["file"], SourceRange(*obj["range"]), obj["original_text"],
                   obj["replacement_text"], obj["marker_label"])


def split_lines(text: str) -> list[str]:
    """Split on '\\n' only, keeping terminators (unlike str.splitlines)."""
    parts = text.split("\n")
    lines = [p + "\n" for p in parts[:-1]]
    if parts[-1]:
        lines.append(parts[-1])
    return lines


def _check_range(lines: list[str], rng: SourceRange) -> None:
    if rng.start_line < 1 or rng.end_line > len(lines) or rng.start_line > rng.end_line:
        raise RangeOutOfBounds(
            f"range {rng.start_line}-{rng.end_line} outside file of {len(lines)} lines")


def make_proposal(file_text: str, file: str, rng: SourceRange, replacement_text: str,
                  marker_label: str) -> EditProposal:
    lines = split_lines(file_text)
    _check_range(lines, rng)
    original = "".join(lines[rng.start_line - 1:rng.end_line])
    return EditProposal(str(file), rng, original, replacement_text, marker_label)


def _with_newline(text: str) -> str:
    return text if text.endswith("\n") else text + "\n"


def apply_with_markers(file_text: str, proposal: EditProposal) -> str:
    lines = split_lines(file_text)
    rng = proposal.range
    _check_range(lines, rng)
    s, e = rng.start_line, rng.end_line
    current = "".join(lines[s - 1:e])
    if current != proposal.original_text:
        raise StaleProposal(
            f"{proposal.file}: lines {s}-{e} changed since the proposal was made")
    eol = "\r\n" if lines[s - 1].endswith("\r\n") else "\n"
    ends_file = not lines[e - 1].endswith("\n")
    closing = f"{END} astra:{proposal.marker_label}" + ("" if ends_file else eol)
    block = (f"{START} {CURRENT_LABEL}{eol}" + _with_newline(current) + f"{SEP}{eol}"
             + _with_newline(proposal.replacement_text) + closing)
    return "".join(lines[:s - 1]) + block + "".join(lines[e:])


def _marker(line: str) -> str:
    bare = line.rstrip("\n").rstrip("\r")
    if bare == SEP:
        return "sep"
    for tag, prefix in (("start", START), ("end", END)):
        if bare.startswith(prefix) and (len(bare) == 7 or bare[7] == " "):
            return tag
    return ""


def find_blocks(lines: list[str]) -> list[tuple[int, int, int]]:
    """(start, separator, end) line indices of every marker block."""
    blocks = []
    state = None
    start = sep = -1
    for k, ln in enumerate(lines):
        kind = _marker(ln)
        if kind == "start":
            if state is not None:
                raise MalformedMarkers(f"line {k + 1}: nested conflict start marker")
            state, start, sep = "ours", k, -1
        elif kind == "sep" and state is not None:
            if state != "ours":
                raise MalformedMarkers(f"line {k + 1}: second separator in one block")
            state, sep = "theirs", k
        elif kind == "end":
            if state != "theirs":
                raise MalformedMarkers(f"line {k + 1}: end marker without start/separator")
            blocks.append((start, sep, k))
            state = None
    if state is not None:
        raise MalformedMarkers(f"line {start + 1}: conflict block is never closed")
    return blocks


def resolve(file_text: str, decision: str) -> str:
    """Keep the replacement (``accept``) or current (``reject``) side."""
    if decision not in ("accept", "reject"):
        raise ValueError("decision must be 'accept' or 'reject'")
    lines = split_lines(file_text)
    if not any(_marker(ln) in ("start", "end") for ln in lines):
        raise NoMarkers("no conflict markers found")
    blocks = find_blocks(lines)
    if len(blocks) > 1:
        raise MultipleBlocks(f"{len(blocks)} marker blocks; resolve one at a time")
    start, sep, end = blocks[0]
    kept = list(lines[sep + 1:end] if decision == "accept" else lines[start + 1:sep])
    if not lines[end].endswith("\n") and kept and kept[-1].endswith("\n"):
        kept[-1] = kept[-1][:-1]
    return "".join(lines[:start] + kept + lines[end + 1:])


def replacement_range(proposal: EditProposal) -> SourceRange:
    """Lines the replacement occupies once accepted."""
    n = len(split_lines(proposal.replacement_text))
    return SourceRange(proposal.range.start_line, proposal.range.start_line + max(n, 1) - 1)


def verify_braces(resolved_text: str, range_hint: SourceRange) -> list[str]:
    """Warnings for unbalanced (), [] and {} inside the hinted lines.

    Literals and comments are skipped. An empty list means balanced.
    """
    lines = split_lines(resolved_text)
    lo = max(range_hint.start_line, 1)
    hi = min(range_hint.end_line, len(lines))
    region = "".join(lines[lo - 1:hi])
    pairs = {"(": ")", "[": "]", "{": "}"}
    closers = {v: k for k, v in pairs.items()}
    stack: list[tuple[str, int]] = []
    warnings = []
    for tok in tokenize(region):
        if tok.kind != PUNCT:
            continue
        line = tok.line + lo - 1
        if tok.text in pairs:
            stack.append((tok.text, line))
        elif tok.text in closers:
            if stack and stack[-1][0] == closers[tok.text]:
                stack.pop()
            else:
                warnings.append(f"line {line}: unmatched '{tok.text}'")
    for opener, line in stack:
        warnings.append(f"line {line}: '{opener}' is never closed")
    return warnings


# -- file-level helpers used by the CLI -------------------------------------

def backup_path(path) -> Path:
    return Path(str(path) + BACKUP_SUFFIX)


def _read(path) -> str:
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def _write(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def apply_to_file(path, proposal: EditProposal) -> str:
    text = _read(path)
    new_text = apply_with_markers(text, proposal)
    bak = backup_path(path)
    if not bak.exists():
        _write(bak, text)
    _write(path, new_text)
    return new_text


def resolve_file(path, decision: str) -> str:
    new_text = resolve(_read(path), decision)
    _write(path, new_text)
    bak = backup_path(path)
    if bak.exists():
        os.remove(bak)
    return new_text


read_text = _read
write_text = _write
