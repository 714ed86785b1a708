"""A forgiving C++ tokenizer.

Comments and whitespace are dropped, string/char literals become single
tokens, and a preprocessor directive (with its backslash continuations)
becomes one ``pp`` token. The lexer never raises: unterminated literals
or comments run to end of input.
"""

from __future__ import annotations

from dataclasses import dataclass

IDENT = "ident"
NUMBER = "number"
STRING = "string"
CHAR = "char"
PUNCT = "punct"
PP = "pp"

# longest first; '>>' is deliberately absent so template closers stay separate
_PUNCTS = (
    "...", "<<=", "->*", "<=>",
    "::", "->", "++", "--", "<<", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", ".*",
)

_STRING_PREFIXES = ("u8R", "uR", "UR", "LR", "R", "u8", "u", "U", "L")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    start: int
    end: int

    def is_(self, text: str) -> bool:
        return self.kind == PUNCT and self.text == text


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_" or ch == "$"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_" or ch == "$"


def tokenize(src: str) -> list[Token]:
    tokens: list[Token] = []
    i, n, line = 0, len(src), 1
    at_line_start = True

    while i < n:
        ch = src[i]
        if ch == "\n":
            line += 1
            i += 1
            at_line_start = True
            continue
        if ch in " \t\r\f\v":
            i += 1
            continue
        if ch == "\\" and i + 1 < n and src[i + 1] == "\n":
            i += 2
            line += 1
            continue

        start, start_line = i, line

        if src.startswith("//", i):
            j = src.find("\n", i)
            i = n if j < 0 else j
            continue
        if src.startswith("/*", i):
            j = src.find("*/", i + 2)
            j = n if j < 0 else j + 2
            line += src.count("\n", i, j)
            i = j
            continue

        if ch == "#" and at_line_start:
            j = i
            while j < n:
                if src[j] == "\n":
                    if j > 0 and src[j - 1] == "\\":
                        line += 1
                        j += 1
                        continue
                    break
                if src.startswith("//", j):
                    k = src.find("\n", j)
                    j = n if k < 0 else k
                    break
                if src.startswith("/*", j):
                    k = src.find("*/", j + 2)
                    k = n if k < 0 else k + 2
                    line += src.count("\n", j, k)
                    j = k
                    continue
                j += 1
            tokens.append(Token(PP, src[start:j].rstrip(), start_line, start, j))
            i = j
            continue

        at_line_start = False

        if _is_ident_start(ch):
            j = i + 1
            while j < n and _is_ident_char(src[j]):
                j += 1
            word = src[i:j]
            if j < n and src[j] in "\"'" and word in _STRING_PREFIXES:
                i = j
                if "R" in word and src[j] == '"':
                    i, line = _raw_string(src, j, line)
                else:
                    i, line = _quoted(src, j, src[j], line)
                tokens.append(Token(STRING if src[j] == '"' else CHAR, src[start:i],
                                    start_line, start, i))
                continue
            tokens.append(Token(IDENT, word, line, i, j))
            i = j
            continue

        if ch.isdigit() or (ch == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i + 1
            while j < n:
                c = src[j]
                if c.isalnum() or c in "._'":
                    j += 1
                elif c in "+-" and (src[j - 1] in "pP" or (
                        src[j - 1] in "eE" and src[i:i + 2].lower() != "0x")):
                    j += 1
                else:
                    break
            tokens.append(Token(NUMBER, src[i:j], line, i, j))
            i = j
            continue

        if ch in "\"'":
            i, line = _quoted(src, i, ch, line)
            tokens.append(Token(STRING if ch == '"' else CHAR, src[start:i], start_line, start, i))
            continue

        for p in _PUNCTS:
            if src.startswith(p, i):
                tokens.append(Token(PUNCT, p, line, i, i + len(p)))
                i += len(p)
                break
        else:
            tokens.append(Token(PUNCT, ch, line, i, i + 1))
            i += 1

    return tokens


def _quoted(src: str, i: int, quote: str, line: int) -> tuple[int, int]:
    n = len(src)
    j = i + 1
    while j < n:
        c = src[j]
        if c == "\\":
            if j + 1 < n and src[j + 1] == "\n":
                line += 1
            j += 2
            continue
        if c == quote:
            return j + 1, line
        if c == "\n":
            # unterminated literal: stop at end of line
            return j, line
        j += 1
    return n, line


def _raw_string(src: str, i: int, line: int) -> tuple[int, int]:
    n = len(src)
    paren = src.find("(", i + 1)
    if paren < 0 or paren - i - 1 > 16:
        return _quoted(src, i, '"', line)
    delim = src[i + 1:paren]
    close = src.find(")" + delim + '"', paren + 1)
    end = n if close < 0 else close + len(delim) + 2
    return end, line + src.count("\n", i, end)


def line_starts(src: str) -> list[int]:
    """Offsets of the first character of each line (index 0 is line 1)."""
    starts = [0]
    for idx, ch in enumerate(src):
        if ch == "\n":
            starts.append(idx + 1)
    return starts
