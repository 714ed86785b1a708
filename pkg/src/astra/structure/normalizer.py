"""Local-identifier normalization for similarity scoring.

Variables declared inside a function body are renamed, in order of first
declaration, to ``VAR1``, ``VAR2``, ... Parameters, qualified names,
member accesses, type names and caller-supplied identifiers are kept.
Only identifier tokens are rewritten; whitespace and comments survive.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..errors import NotAFunction
from .lexer import IDENT, PP, PUNCT, Token, tokenize

log = logging.getLogger(__name__)

PLACEHOLDER = "VAR"

_SPECIFIERS = {"const", "constexpr", "static", "volatile", "register", "thread_local",
               "mutable", "inline", "typename", "struct", "class", "enum", "union",
               "constinit"}
_BUILTIN_TYPES = {"void", "bool", "char", "char8_t", "char16_t", "char32_t", "wchar_t",
                  "short", "int", "long", "float", "double", "auto", "signed", "unsigned"}
_NOT_TYPES = {
    "return", "delete", "throw", "goto", "case", "default", "else", "new", "co_return",
    "co_yield", "co_await", "using", "typedef", "namespace", "template", "sizeof", "if",
    "for", "while", "do", "switch", "break", "continue", "operator", "this", "true",
    "false", "nullptr", "public", "private", "protected", "friend", "static_assert",
    "try", "catch", "alignof", "noexcept", "asm", "and", "or", "not",
}
_KEYWORDS = _SPECIFIERS | _BUILTIN_TYPES | _NOT_TYPES | {"decltype", "volatile"}
_PTR_OPS = {"*", "&", "&&"}
_DECL_TERMINATORS = {"=", ";", ",", "(", "{", "[", ":", ")"}


@dataclass
class Normalization:
    text: str
    mapping: dict[str, str]
    params: list[str]
    warnings: list[str] = field(default_factory=list)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[Token] = [t for t in tokenize(text) if t.kind != PP]
        self.n = len(self.toks)
        self.closers: dict[int, int] = {}
        self.enclosing: list[Optional[int]] = [None] * self.n
        stack: list[int] = []
        pairs = {"(": ")", "[": "]", "{": "}"}
        for i, t in enumerate(self.toks):
            self.enclosing[i] = stack[-1] if stack else None
            if t.kind != PUNCT:
                continue
            if t.text in pairs:
                stack.append(i)
            elif t.text in (")", "]", "}"):
                for d in range(len(stack) - 1, -1, -1):
                    if pairs[self.toks[stack[d]].text] == t.text:
                        self.closers[stack[d]] = i
                        del stack[d:]
                        break

    def is_p(self, i: int, text: str) -> bool:
        return 0 <= i < self.n and self.toks[i].kind == PUNCT and self.toks[i].text == text

    def is_ident(self, i: int) -> bool:
        return 0 <= i < self.n and self.toks[i].kind == IDENT

    def close(self, i: int) -> int:
        return self.closers.get(i, self.n - 1)

    # -- function shape ----------------------------------------------------

    def locate_function(self) -> tuple[int, int, int, int]:
        """(param open, param close, body open, body close) of the first function."""
        i = 0
        while i < self.n:
            t = self.toks[i]
            if t.kind == PUNCT and t.text == "{":
                i = self.close(i) + 1
                continue
            if t.kind == PUNCT and t.text == "(" and self.is_ident(i - 1) \
                    and self.toks[i - 1].text not in _KEYWORDS - {"operator"} \
                    and i in self.closers:
                close = self.closers[i]
                body = self._body_after(close)
                if body is not None and body in self.closers:
                    return i, close, body, self.closers[body]
                if body is None:
                    i = close + 1
                    continue
            i += 1
        raise NotAFunction("no parameter list followed by a body")

    def _body_after(self, close: int) -> Optional[int]:
        j = close + 1
        init_list = False
        while j < self.n:
            t = self.toks[j]
            if t.kind == PUNCT:
                if t.text == "{":
                    if init_list and (self.is_ident(j - 1) or self.is_p(j - 1, ">")):
                        j = self.close(j) + 1
                        continue
                    return j
                if t.text == ":":
                    init_list = True
                elif t.text in ("(", "["):
                    j = self.close(j)
                elif t.text in (";", "}", ")", "="):
                    return None
            j += 1
        return None

    def param_names(self, open_: int, close: int) -> list[str]:
        names = []
        groups: list[list[int]] = [[]]
        for k in range(open_ + 1, close):
            if self.enclosing[k] == open_ and self.is_p(k, ","):
                groups.append([])
            else:
                groups[-1].append(k)
        for g in groups:
            g = [k for k in g if self.enclosing[k] == open_]
            cut = len(g)
            for pos, k in enumerate(g):
                if self.is_p(k, "=") or self.is_p(k, "["):
                    cut = pos
                    break
            core = g[:cut]
            if len(core) >= 2 and self.is_ident(core[-1]) \
                    and self.toks[core[-1]].text not in _KEYWORDS:
                names.append(self.toks[core[-1]].text)
        return names

    # -- declarations ------------------------------------------------------

    def parse_type(self, i: int, stop: int) -> Optional[int]:
        """Return index just past a type (with cv/ptr ops) starting at ``i``."""
        start = i
        saw_type = False
        while i < stop:
            t = self.toks[i]
            if t.kind == IDENT and t.text in _SPECIFIERS:
                i += 1
                continue
            if t.kind == IDENT and t.text in _BUILTIN_TYPES:
                saw_type = True
                i += 1
                continue
            break
        if not saw_type:
            if self.is_ident(i) and self.toks[i].text == "decltype" and self.is_p(i + 1, "("):
                i = self.close(i + 1) + 1
            else:
                if self.is_p(i, "::"):
                    i += 1
                if not self.is_ident(i) or self.toks[i].text in _KEYWORDS:
                    return None
                while True:
                    i += 1
                    if self.is_p(i, "<"):
                        i = self._skip_template_args(i, stop)
                        if i is None:
                            return None
                    if self.is_p(i, "::") and self.is_ident(i + 1) \
                            and self.toks[i + 1].text not in _NOT_TYPES:
                        i += 1
                        continue
                    break
        while i < stop:
            t = self.toks[i]
            if (t.kind == PUNCT and t.text in _PTR_OPS) or \
                    (t.kind == IDENT and t.text in ("const", "volatile", "__restrict__",
                                                     "__restrict", "restrict")):
                i += 1
                continue
            break
        return i if i > start else None

    def _skip_template_args(self, i: int, stop: int) -> Optional[int]:
        depth = 0
        while i < stop:
            t = self.toks[i]
            if t.kind == PUNCT:
                if t.text == "<":
                    depth += 1
                elif t.text == ">":
                    depth -= 1
                    if depth == 0:
                        return i + 1
                elif t.text in ("(", "["):
                    i = self.close(i)
                elif t.text in (";", "{", "}", ")", "]", "=", "&&", "||"):
                    return None
            i += 1
        return None

    def declaration_at(self, s: int, stop: int, in_for: bool):
        """Declared names and type-token indices if a declaration starts at ``s``."""
        t = self.toks[s]
        if t.kind != IDENT or t.text in _NOT_TYPES:
            return None
        after_type = self.parse_type(s, stop)
        if after_type is None or not self.is_ident(after_type):
            return None
        name_tok = self.toks[after_type]
        if name_tok.text in _KEYWORDS:
            return None
        nxt = after_type + 1
        term = self.toks[nxt] if nxt < self.n else None
        if term is None or term.kind != PUNCT or term.text not in _DECL_TERMINATORS:
            return None
        if term.text == ":" and not in_for:
            return None
        if term.text == ")" and not in_for:
            return None
        names = [after_type]
        type_idx = list(range(s, after_type))
        # further declarators: ``int a = 1, *b, c(2);``
        j = nxt
        while j < stop:
            tk = self.toks[j]
            if tk.kind == PUNCT and tk.text in ("(", "[", "{"):
                j = self.close(j) + 1
                continue
            if tk.kind == PUNCT and tk.text in (";", ")", ":"):
                break
            if tk.kind == PUNCT and tk.text == ",":
                k = j + 1
                while self.is_p(k, "*") or self.is_p(k, "&") or self.is_p(k, "&&") or \
                        (self.is_ident(k) and self.toks[k].text == "const"):
                    type_idx.append(k)
                    k += 1
                if self.is_ident(k) and self.toks[k].text not in _KEYWORDS:
                    names.append(k)
                    j = k + 1
                    continue
                break
            j += 1
        return names, type_idx

    def statement_starts(self, body_open: int, body_close: int) -> list[tuple[int, int, bool]]:
        """(start, stop, in_for_header) candidates inside the body."""
        out = []
        for i in range(body_open + 1, body_close):
            encl = self.enclosing[i]
            prev = i - 1
            if encl is not None and self.toks[encl].text == "{":
                if self.is_p(prev, "{") or self.is_p(prev, ";") or self.is_p(prev, "}") \
                        or (self.is_ident(prev) and self.toks[prev].text in ("else", "do")):
                    out.append((i, self.close(encl), False))
                elif self.is_p(prev, ":") and prev - 1 >= 0 and self.is_ident(prev - 1) \
                        and self.toks[prev - 1].text in ("public", "private", "protected",
                                                         "default"):
                    out.append((i, self.close(encl), False))
            elif encl is not None and self.toks[encl].text == "(" and prev == encl \
                    and self.is_ident(encl - 1) and self.toks[encl - 1].text in ("for", "if",
                                                                                 "switch",
                                                                                 "while"):
                out.append((i, self.close(encl), True))
        return out


def analyze(function_text: str, preserve: Iterable[str] = ()) -> Normalization:
    sc = _Scanner(function_text)
    p_open, p_close, b_open, b_close = sc.locate_function()
    params = sc.param_names(p_open, p_close)
    keep = set(preserve) | set(params)
    warnings: list[str] = []

    declared: list[str] = []
    type_positions: set[int] = set()
    for start, stop, in_for in sc.statement_starts(b_open, b_close):
        found = sc.declaration_at(start, stop, in_for)
        if found is None:
            continue
        names, type_idx = found
        type_positions.update(type_idx)
        for k in names:
            name = sc.toks[k].text
            if name in declared:
                warnings.append(f"line {sc.toks[k].line}: {name!r} redeclared; first "
                                f"declaration wins")
            elif name in params:
                warnings.append(f"line {sc.toks[k].line}: local {name!r} shadows a parameter; "
                                f"kept")
            elif name in keep:
                continue
            else:
                declared.append(name)

    local_set = set(declared)
    taken = {t.text for t in sc.toks if t.kind == IDENT and t.text not in local_set}
    mapping: dict[str, str] = {}
    counter = 0
    for name in declared:
        counter += 1
        while f"{PLACEHOLDER}{counter}" in taken:
            counter += 1
        mapping[name] = f"{PLACEHOLDER}{counter}"

    pieces = []
    last = 0
    for k in range(b_open + 1, b_close):
        t = sc.toks[k]
        if t.kind != IDENT or t.text not in mapping or k in type_positions:
            continue
        if sc.is_p(k - 1, ".") or sc.is_p(k - 1, "->") or sc.is_p(k - 1, "::") \
                or sc.is_p(k + 1, "::") or sc.is_p(k - 1, ".*") or sc.is_p(k - 1, "->*"):
            continue
        pieces.append(function_text[last:t.start])
        pieces.append(mapping[t.text])
        last = t.end
    pieces.append(function_text[last:])
    for w in warnings:
        log.debug(w)
    return Normalization("".join(pieces), mapping, params, warnings)


def normalize_identifiers(function_text: str, preserve: Iterable[str] = ()) -> str:
    """Rename function-local variables to VAR1, VAR2, ... in declaration order."""
    return analyze(function_text, preserve).text
