"""Declaration-level structure extraction for C++ sources.

Covers namespaces, classes/structs/unions (nested types are reported
under ``Outer::Inner``), access sections, non-static data members,
member functions (declared, defined inline or defined out of class) and
free function definitions. Preprocessor lines are dropped before parsing,
so both sides of a conditional are seen; macros are not expanded.

Extraction is total: anything the parser does not understand is skipped
and noted in ``StructuralReport.warnings``.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from typing import Optional

from .lexer import IDENT, PP, PUNCT, Token, tokenize

ACCESS_SPECIFIERS = ("public", "private", "protected")
CLASS_KEYS = ("class", "struct", "union")

_QUALIFIERS = {"const", "volatile", "override", "final", "mutable", "&", "&&"}
_PAREN_KEYWORDS = {"decltype", "alignas", "__attribute__", "__declspec", "sizeof", "alignof",
                   "noexcept", "throw", "static_assert", "typeof", "__typeof__", "requires"}
_NON_NAME_KEYWORDS = {
    "void", "int", "char", "short", "long", "float", "double", "bool", "signed", "unsigned",
    "auto", "const", "volatile", "static", "inline", "virtual", "explicit", "constexpr",
    "return", "if", "else", "for", "while", "do", "switch", "case", "new", "delete",
    "typename", "template", "struct", "class", "union", "enum", "namespace", "using",
} | _PAREN_KEYWORDS
_MACRO_RE = re.compile(r"[A-Z][A-Z0-9_]*")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class SourceRange:
    start_line: int
    end_line: int

    def __post_init__(self):
        if not 1 <= self.start_line <= self.end_line:
            raise ValueError(f"invalid source range {self.start_line}-{self.end_line}")

    def to_json(self) -> list:
        return [self.start_line, self.end_line]


@dataclass(frozen=True)
class FieldInfo:
    name: str
    type_text: str
    access: str
    line: int = 0

    def to_json(self) -> dict:
        return {"name": self.name, "type": self.type_text, "access": self.access}


@dataclass(frozen=True)
class MethodInfo:
    name: str
    signature_text: str
    access: str
    range: SourceRange
    is_definition: bool
    qualifier: str = ""
    template: str = ""
    param_types: tuple[str, ...] = field(default=(), compare=False)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "signature": self.signature_text,
            "access": self.access,
            "range": self.range.to_json(),
            "is_definition": self.is_definition,
        }
        if self.qualifier:
            out["qualifier"] = self.qualifier
        if self.template:
            out["template"] = self.template
        return out


@dataclass(frozen=True)
class ClassInfo:
    name: str
    kind: str
    fields: tuple[FieldInfo, ...]
    methods: tuple[MethodInfo, ...]
    range: SourceRange
    template: str = ""

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "kind": self.kind,
            "range": self.range.to_json(),
            "fields": [f.to_json() for f in self.fields],
            "methods": [m.to_json() for m in self.methods],
        }
        if self.template:
            out["template"] = self.template
        return out


@dataclass(frozen=True)
class StructuralReport:
    file: str
    classes: tuple[ClassInfo, ...] = ()
    free_functions: tuple[MethodInfo, ...] = ()
    warnings: tuple[str, ...] = ()

    def to_json(self, with_warnings: bool = True) -> dict:
        out = {
            "file": self.file,
            "classes": [c.to_json() for c in self.classes],
            "free_functions": [f.to_json() for f in self.free_functions],
        }
        if with_warnings:
            out["warnings"] = list(self.warnings)
        return out

    def class_named(self, name: str) -> list[ClassInfo]:
        return [c for c in self.classes
                if c.name == name or c.name.endswith("::" + name)]

    def symbols(self) -> tuple[list[str], list[str]]:
        """(class names, function names) known to this report."""
        classes = []
        for c in self.classes:
            classes.append(c.name.split("::")[-1])
        functions = [m.name for c in self.classes for m in c.methods]
        functions += [f.name for f in self.free_functions]
        return list(dict.fromkeys(classes)), list(dict.fromkeys(functions))


@dataclass
class _ClassBuilder:
    name: str
    kind: str
    start_line: int
    end_line: int = 0
    template: str = ""
    fields: list = field(default_factory=list)
    methods: list = field(default_factory=list)


class _Parser:
    def __init__(self, source: str, path: str):
        self.src = source
        self.path = path
        self.toks: list[Token] = [t for t in tokenize(source) if t.kind != PP]
        self.n = len(self.toks)
        self.nlines = max(1, source.count("\n") + (0 if source.endswith("\n") else 1))
        self.classes: list[_ClassBuilder] = []
        self.functions: list[MethodInfo] = []
        self.warnings: list[str] = []
        self._closers = self._match_brackets()

    # -- helpers -----------------------------------------------------------

    def _match_brackets(self) -> dict[int, int]:
        pairs = {"(": ")", "[": "]", "{": "}"}
        closers: dict[int, int] = {}
        stack: list[int] = []
        for i, t in enumerate(self.toks):
            if t.kind != PUNCT:
                continue
            if t.text in pairs:
                stack.append(i)
            elif t.text in (")", "]", "}"):
                # pop until a matching opener; mismatched openers stay unclosed
                for depth in range(len(stack) - 1, -1, -1):
                    if pairs[self.toks[stack[depth]].text] == t.text:
                        for j in stack[depth + 1:]:
                            self._unclosed(j)
                        closers[stack[depth]] = i
                        del stack[depth:]
                        break
                else:
                    if t.text == "}":
                        self.warnings.append(
                            f"UnbalancedBraces: unmatched '}}' at line {t.line}")
        for j in stack:
            self._unclosed(j)
        return closers

    def _unclosed(self, i: int) -> None:
        t = self.toks[i]
        if t.text == "{":
            self.warnings.append(f"UnbalancedBraces: '{{' at line {t.line} is never closed")

    def close(self, i: int) -> int:
        """Index of the token closing the bracket at ``i`` (last token if unclosed)."""
        return self._closers.get(i, self.n - 1)

    def tok(self, i: int) -> Optional[Token]:
        return self.toks[i] if 0 <= i < self.n else None

    def is_p(self, i: int, text: str) -> bool:
        t = self.tok(i)
        return t is not None and t.kind == PUNCT and t.text == text

    def is_w(self, i: int, text: str) -> bool:
        t = self.tok(i)
        return t is not None and t.kind == IDENT and t.text == text

    def text(self, i: int, j: int) -> str:
        """Whitespace-collapsed source text of tokens i..j inclusive."""
        if j < i:
            return ""
        return _WS_RE.sub(" ", self.src[self.toks[i].start:self.toks[j].end]).strip()

    def skip_angles(self, i: int) -> int:
        """``i`` is at '<'; return index just past the matching '>'."""
        depth = 0
        while i < self.n:
            t = self.toks[i]
            if t.kind == PUNCT:
                if t.text == "<":
                    depth += 1
                elif t.text == ">":
                    depth -= 1
                    if depth == 0:
                        return i + 1
                elif t.text in ("(", "[", "{"):
                    i = self.close(i)
                elif t.text in (";", "}", ")"):
                    return i
            i += 1
        return i

    def skip_statement(self, i: int) -> int:
        """Skip to just past the next ';' at this nesting level (or the enclosing '}')."""
        while i < self.n:
            t = self.toks[i]
            if t.kind == PUNCT:
                if t.text == ";":
                    return i + 1
                if t.text in ("(", "[", "{"):
                    i = self.close(i)
                elif t.text == "}":
                    return i
            i += 1
        return i

    def line_of_end(self, i: int) -> int:
        return self.toks[min(i, self.n - 1)].line

    # -- scopes ------------------------------------------------------------

    def parse(self) -> StructuralReport:
        self.parse_scope(0, self.n, ())
        self.merge_out_of_class()
        classes = tuple(
            ClassInfo(b.name, b.kind, tuple(b.fields), tuple(b.methods),
                      SourceRange(b.start_line, max(b.start_line, b.end_line)), b.template)
            for b in self.classes)
        return StructuralReport(self.path, classes, tuple(self.functions), tuple(self.warnings))

    def parse_prefix(self, i: int, stop: int) -> tuple[int, str, int]:
        """Consume ``template<...>`` headers and ``[[attributes]]``.

        Returns (index of first declaration token, template text, start index).
        """
        start = i
        template = ""
        while i < stop:
            if self.is_w(i, "template") and self.is_p(i + 1, "<"):
                j = self.skip_angles(i + 1)
                template = self.text(i, j - 1)
                i = j
            elif self.is_p(i, "[") and self.is_p(i + 1, "["):
                i = self.close(i) + 1
            else:
                break
        return i, template, start

    def parse_scope(self, i: int, stop: int, namespaces: tuple) -> None:
        while i < stop:
            t = self.toks[i]
            if t.kind == PUNCT and t.text == ";":
                i += 1
                continue
            if t.kind == PUNCT and t.text == "}":
                i += 1
                continue
            i = max(self.parse_namespace_decl(i, stop, namespaces), i + 1)

    def parse_namespace_decl(self, i: int, stop: int, namespaces: tuple) -> int:
        head, template, start = self.parse_prefix(i, stop)
        if head >= stop:
            return stop
        t = self.toks[head]

        if t.kind == IDENT and t.text in ("namespace", "inline") and (
                t.text == "namespace" or self.is_w(head + 1, "namespace")):
            j = head + (2 if t.text == "inline" else 1)
            name_parts = []
            while j < stop and not self.is_p(j, "{") and not self.is_p(j, ";") \
                    and not self.is_p(j, "="):
                if self.toks[j].kind == IDENT:
                    name_parts.append(self.toks[j].text)
                j += 1
            if self.is_p(j, "{"):
                end = self.close(j)
                self.parse_scope(j + 1, end, namespaces + tuple(name_parts))
                return end + 1
            return self.skip_statement(j)

        if t.kind == IDENT and t.text == "extern" and self.tok(head + 1) is not None \
                and self.toks[head + 1].kind == "string" and self.is_p(head + 2, "{"):
            end = self.close(head + 2)
            self.parse_scope(head + 3, end, namespaces)
            return end + 1

        if t.kind == IDENT and t.text in ("using", "typedef", "static_assert", "friend"):
            return self.skip_statement(head)

        if t.kind == IDENT and t.text == "enum":
            return self.skip_statement(head)

        if t.kind == IDENT and t.text in CLASS_KEYS:
            nxt = self.parse_class_head(head, start, template, outer=None, access=None)
            if nxt is not None:
                return nxt

        return self.parse_declaration(head, start, template, stop, owner=None, access="public")

    # -- classes -----------------------------------------------------------

    def parse_class_head(self, head: int, start: int, template: str,
                         outer: Optional[_ClassBuilder], access: Optional[str]) -> Optional[int]:
        """Parse ``class-key name ... { body } declarators ;``.

        Returns the next index, or None when this is not a class definition
        (e.g. ``struct S s;`` or ``class X;``).
        """
        kind = self.toks[head].text
        j = head + 1
        name = ""
        while j < self.n:
            tk = self.toks[j]
            if tk.kind == PUNCT and tk.text in ("{", ";", "(", "=", ")", "}"):
                break
            if tk.kind == PUNCT and tk.text == ":":
                # base clause: skip to the opening brace
                while j < self.n and not self.is_p(j, "{") and not self.is_p(j, ";"):
                    if self.is_p(j, "<"):
                        j = self.skip_angles(j)
                        continue
                    if self.is_p(j, "("):
                        j = self.close(j)
                    j += 1
                break
            if tk.kind == PUNCT and tk.text == "<":
                j = self.skip_angles(j)
                continue
            if tk.kind == PUNCT and tk.text == "[" and self.is_p(j + 1, "["):
                j = self.close(j) + 1
                continue
            if tk.kind == IDENT and tk.text not in ("final", "alignas"):
                name = tk.text
            j += 1
        if not self.is_p(j, "{"):
            return None
        body_end = self.close(j)
        if not name:
            self.warnings.append(
                f"line {self.toks[head].line}: anonymous {kind} skipped")
            return self.skip_statement(body_end + 1)
        qualified = f"{outer.name}::{name}" if outer is not None else name
        builder = _ClassBuilder(qualified, kind, self.toks[start].line, template=template)
        builder.end_line = self.line_of_end(body_end)
        self.classes.append(builder)
        self.parse_class_body(j + 1, body_end, builder)
        k = body_end + 1
        if self.is_p(k, ";"):
            return k + 1
        # declarators after the closing brace (``} a, b;``)
        nxt = self.skip_statement(k)
        if outer is not None:
            self.warnings.append(
                f"line {self.toks[k].line if k < self.n else builder.end_line}: "
                f"members declared with inline type {qualified} not reported")
        return nxt

    def parse_class_body(self, i: int, stop: int, cls: _ClassBuilder) -> None:
        access = "private" if cls.kind == "class" else "public"
        while i < stop:
            t = self.toks[i]
            if t.kind == PUNCT and t.text == ";":
                i += 1
                continue
            if t.kind == IDENT and t.text in ACCESS_SPECIFIERS and self.is_p(i + 1, ":"):
                access = t.text
                i += 2
                continue
            head, template, start = self.parse_prefix(i, stop)
            if head >= stop:
                break
            h = self.toks[head]
            if h.kind == IDENT and h.text in ("using", "typedef", "static_assert", "friend",
                                              "enum"):
                i = self.skip_statement(head)
                continue
            if h.kind == IDENT and h.text in CLASS_KEYS:
                nxt = self.parse_class_head(head, start, template, outer=cls, access=access)
                if nxt is not None:
                    i = nxt
                    continue
            if h.kind == PUNCT and h.text == "}":
                i = head + 1
                continue
            i = self.parse_declaration(head, start, template, stop, owner=cls, access=access)
            i = max(i, head + 1)

    # -- declarations ------------------------------------------------------

    def find_function_paren(self, head: int, stop: int) -> Optional[int]:
        """Index of the '(' opening a function parameter list, if this is a function."""
        i = head
        while i < stop:
            t = self.toks[i]
            if t.kind == PUNCT:
                if t.text in (";", "{", "=", "}"):
                    return None
                if t.text == ":":
                    return None
                if t.text == "<" and i > head and self.toks[i - 1].kind == IDENT \
                        and self.toks[i - 1].text != "operator":
                    i = self.skip_angles(i)
                    continue
                if t.text == "[":
                    i = self.close(i) + 1
                    continue
                if t.text == "(":
                    prev = self.tok(i - 1)
                    if prev is not None and prev.kind == IDENT \
                            and prev.text not in _NON_NAME_KEYWORDS:
                        close = self.close(i)
                        after = self.tok(close + 1)
                        if _MACRO_RE.fullmatch(prev.text) and after is not None \
                                and after.kind == IDENT and after.text not in _QUALIFIERS \
                                and after.text not in ("noexcept", "throw", "try", "requires") \
                                and i - 1 == head:
                            # leading macro invocation such as ``ATTR(x) void f()``
                            i = close + 1
                            continue
                        return i
                    i = self.close(i) + 1
                    continue
            elif t.kind == IDENT and t.text == "operator":
                # operator<symbol>( ... ) or conversion operator
                j = i + 1
                if self.is_p(j, "(") and self.is_p(j + 1, ")"):
                    return j + 2 if self.is_p(j + 2, "(") else None
                while j < stop and not self.is_p(j, "("):
                    if self.is_p(j, ";") or self.is_p(j, "{"):
                        return None
                    j += 1
                return j if j < stop else None
            i += 1
        return None

    def function_name(self, paren: int, head: int) -> tuple[str, str, int]:
        """(name, qualifier, index of first name token) for the name before ``paren``."""
        j = paren - 1
        # operator names: scan back to the 'operator' keyword
        k = j
        while k >= head and k >= paren - 4:
            if self.is_w(k, "operator"):
                name = "operator" + "".join(t.text for t in self.toks[k + 1:paren])
                first = k
                break
            k -= 1
        else:
            name = self.toks[j].text
            first = j
            if self.is_p(j - 1, "~"):
                name = "~" + name
                first = j - 1
        parts = []
        q = first - 1
        while q >= head and self.is_p(q, "::"):
            p = q - 1
            if self.is_p(p, ">"):
                depth = 0
                while p >= head:
                    if self.is_p(p, ">"):
                        depth += 1
                    elif self.is_p(p, "<"):
                        depth -= 1
                        if depth == 0:
                            break
                    p -= 1
                p -= 1
            if p >= head and self.toks[p].kind == IDENT:
                parts.insert(0, self.toks[p].text)
                first = p
                q = p - 1
            else:
                break
        return name, "::".join(parts), first

    def param_types(self, open_: int, close: int) -> tuple[str, ...]:
        params: list[list[Token]] = [[]]
        i = open_ + 1
        depth = 0
        while i < close:
            t = self.toks[i]
            if t.kind == PUNCT and t.text in ("(", "[", "{", "<"):
                depth += 1
            elif t.kind == PUNCT and t.text in (")", "]", "}", ">"):
                depth -= 1
            if depth == 0 and t.kind == PUNCT and t.text == ",":
                params.append([])
            else:
                params[-1].append(t)
            i += 1
        out = []
        for p in params:
            for k, t in enumerate(p):
                if t.kind == PUNCT and t.text == "=":
                    p = p[:k]
                    break
            if len(p) > 1 and p[-1].kind == IDENT and p[-1].text not in _NON_NAME_KEYWORDS:
                p = p[:-1]
            text = "".join(t.text for t in p)
            if text and text != "void":
                out.append(text)
        return tuple(out)

    def parse_declaration(self, head: int, start: int, template: str, stop: int,
                          owner: Optional[_ClassBuilder], access: str) -> int:
        paren = self.find_function_paren(head, stop)
        if paren is not None:
            return self.parse_function(head, start, template, paren, stop, owner, access)
        end = self.skip_statement(head)
        if owner is not None:
            self.parse_fields(head, end - 1 if self.is_p(end - 1, ";") else end, owner, access)
        return end

    def parse_function(self, head: int, start: int, template: str, paren: int, stop: int,
                       owner: Optional[_ClassBuilder], access: str) -> int:
        name, qualifier, _ = self.function_name(paren, head)
        close = self.close(paren)
        sig_end = close
        i = close + 1
        body: Optional[int] = None
        while i < stop:
            t = self.toks[i]
            if t.kind == PUNCT and t.text == "{":
                body = i
                break
            if t.kind == PUNCT and t.text == ";":
                break
            if t.kind == PUNCT and t.text == "=":
                i = self.skip_statement(i) - 1
                break
            if t.kind == PUNCT and t.text == ":":
                # constructor initializer list
                j = i + 1
                while j < stop:
                    if self.is_p(j, "{") and not (self.toks[j - 1].kind == IDENT
                                                  or self.is_p(j - 1, ">")):
                        break
                    if self.is_p(j, "(") or self.is_p(j, "{"):
                        j = self.close(j)
                    elif self.is_p(j, ";"):
                        break
                    j += 1
                i = j
                continue
            if t.kind == PUNCT and t.text == "->":
                j = i + 1
                while j < stop and not (self.is_p(j, "{") or self.is_p(j, ";")
                                        or self.is_p(j, "=")):
                    if self.is_p(j, "<"):
                        j = self.skip_angles(j)
                        continue
                    if self.is_p(j, "("):
                        j = self.close(j)
                    j += 1
                sig_end = j - 1
                i = j
                continue
            if t.kind == PUNCT and t.text == "(":
                i = self.close(i)
                sig_end = i
                i += 1
                continue
            if t.kind == IDENT and t.text == "try":
                # function-try-block; not part of the signature
                i += 1
                continue
            if t.kind == PUNCT and t.text in (",", "}", ")"):
                self.warnings.append(
                    f"line {t.line}: unsupported declaration near {name!r} skipped")
                return self.skip_statement(i) if t.text == "," else i
            sig_end = i
            i += 1

        start_line = self.toks[start].line
        sig_text = self.text(head, sig_end)
        ptypes = self.param_types(paren, close)
        if body is not None:
            body_end = self.close(body)
            rng = SourceRange(start_line, max(start_line, self.line_of_end(body_end)))
            info = MethodInfo(name, sig_text, access, rng, True, qualifier, template, ptypes)
            nxt = body_end + 1
            # an inline function-try-block has trailing handlers
            while self.is_w(nxt, "catch") and self.is_p(nxt + 1, "("):
                h = self.close(nxt + 1) + 1
                if not self.is_p(h, "{"):
                    break
                body_end = self.close(h)
                nxt = body_end + 1
                info = dataclasses.replace(
                    info, range=SourceRange(start_line, self.line_of_end(body_end)))
        else:
            end_idx = min(i, self.n - 1)
            rng = SourceRange(start_line, max(start_line, self.line_of_end(end_idx)))
            info = MethodInfo(name, sig_text, access, rng, False, qualifier, template, ptypes)
            nxt = i + 1 if self.is_p(i, ";") else i

        if owner is not None:
            if qualifier:
                self.warnings.append(
                    f"line {start_line}: qualified member {qualifier}::{name} inside class "
                    f"{owner.name}")
            owner.methods.append(info)
        elif body is not None:
            self.functions.append(info)
        return nxt

    def parse_fields(self, i: int, end: int, owner: _ClassBuilder, access: str) -> None:
        """Parse a member declaration spanning tokens [i, end)."""
        toks = self.toks[i:end]
        if not toks:
            return
        words = {t.text for t in toks if t.kind == IDENT}
        if "static" in words or "friend" in words:
            return
        # split declarators at top-level commas
        decls: list[list[int]] = [[]]
        depth = angle = 0
        init = False
        for k in range(i, end):
            t = self.toks[k]
            if t.kind == PUNCT:
                if t.text in ("(", "[", "{"):
                    depth += 1
                    if t.text == "{" and depth == 1:
                        init = True
                elif t.text in (")", "]", "}"):
                    depth -= 1
                elif t.text == "=" and depth == 0 and angle == 0:
                    init = True
                elif t.text == "<" and not init and k > i and self.toks[k - 1].kind == IDENT:
                    angle += 1
                elif t.text == ">" and not init and angle > 0:
                    angle -= 1
                elif t.text == "," and depth == 0 and angle == 0:
                    decls.append([])
                    init = False
                    continue
            decls[-1].append(k)

        base_type = ""
        for n, d in enumerate(decls):
            decl = self._declarator(d, first=(n == 0))
            if decl is None:
                line = self.toks[d[0]].line if d else self.toks[i].line
                self.warnings.append(f"line {line}: unsupported member declaration skipped")
                return
            name, type_idx, ptr_ops, array, line = decl
            if n == 0:
                if not type_idx:
                    self.warnings.append(f"line {line}: member {name!r} has no type")
                    return
                type_tokens = [k for k in type_idx if self.toks[k].text != "mutable"]
                type_text = self.text(type_tokens[0], type_tokens[-1]) if type_tokens else ""
                base_type = self._strip_trailing_ptr(type_tokens)
            else:
                type_text = base_type + (" " + ptr_ops if ptr_ops else "")
            owner.fields.append(FieldInfo(name, type_text + array, access, line))

    def _strip_trailing_ptr(self, idx: list[int]) -> str:
        k = len(idx)
        while k > 0 and self.toks[idx[k - 1]].text in ("*", "&", "&&"):
            k -= 1
        return self.text(idx[0], idx[k - 1]) if k else ""

    def _declarator(self, d: list[int], first: bool):
        # cut initializer / bitfield
        cut = len(d)
        depth = 0
        for pos, k in enumerate(d):
            t = self.toks[k]
            if t.kind != PUNCT:
                continue
            if t.text in ("(", "["):
                if t.text == "(" and depth == 0:
                    return None
                depth += 1
            elif t.text in (")", "]"):
                depth -= 1
            elif depth == 0 and t.text in ("=", "{") or (depth == 0 and t.text == ":"):
                cut = pos
                break
        core = d[:cut]
        array = ""
        for pos, k in enumerate(core):
            if self.is_p(k, "["):
                array = "".join(self.toks[x].text for x in core[pos:])
                core = core[:pos]
                break
        if not core:
            return None
        last = self.toks[core[-1]]
        if last.kind != IDENT or last.text in _NON_NAME_KEYWORDS:
            return None
        type_idx = core[:-1]
        ptr_ops = ""
        if not first:
            ops = [self.toks[k].text for k in type_idx]
            if any(op not in ("*", "&", "&&", "const") for op in ops):
                return None
            ptr_ops = "".join(ops)
        return last.text, type_idx, ptr_ops, array, last.line

    # -- out-of-class definitions -----------------------------------------

    def merge_out_of_class(self) -> None:
        remaining = []
        for fn in self.functions:
            if not fn.qualifier:
                remaining.append(fn)
                continue
            owner = self._owner_for(fn.qualifier)
            if owner is None:
                remaining.append(fn)
                continue
            same = [k for k, m in enumerate(owner.methods)
                    if m.name == fn.name and not m.is_definition]
            exact = [k for k in same if owner.methods[k].param_types == fn.param_types]
            arity = [k for k in same if len(owner.methods[k].param_types) == len(fn.param_types)]
            pick = exact if len(exact) == 1 else arity if len(arity) == 1 else \
                same if len(same) == 1 else []
            if pick:
                decl = owner.methods[pick[0]]
                owner.methods[pick[0]] = dataclasses.replace(
                    decl, range=fn.range, is_definition=True,
                    template=decl.template or fn.template)
            else:
                self.warnings.append(
                    f"line {fn.range.start_line}: definition of {fn.qualifier}::{fn.name} "
                    f"matches no unique declaration in {owner.name}")
                access = next((m.access for m in owner.methods if m.name == fn.name), "public")
                owner.methods.append(dataclasses.replace(fn, access=access, qualifier=""))
        self.functions = remaining

    def _owner_for(self, qualifier: str) -> Optional[_ClassBuilder]:
        matches = [c for c in self.classes
                   if qualifier == c.name or qualifier.endswith("::" + c.name)]
        return matches[0] if len(matches) == 1 else None


def extract_structure(source: str, path: str = "<memory>") -> StructuralReport:
    """Report classes, fields, methods and free functions in ``source``."""
    try:
        return _Parser(source, str(path)).parse()
    except RecursionError:
        return StructuralReport(str(path), warnings=("nesting too deep; no structure extracted",))
