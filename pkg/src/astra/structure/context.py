"""Queries over a StructuralReport and its plain-text prompt rendering."""

from __future__ import annotations

from typing import Optional, Sequence

from ..errors import Ambiguous, FocusNotFound, NotADefinition, NotFound
from .extractor import ClassInfo, MethodInfo, SourceRange, StructuralReport

DASH = "–"


def _candidates(report: StructuralReport, class_name: Optional[str],
                fn_name: str) -> list[MethodInfo]:
    if class_name:
        found = [m for c in report.class_named(class_name) for m in c.methods
                 if m.name == fn_name]
        found += [f for f in report.free_functions
                  if f.name == fn_name and f.qualifier
                  and (f.qualifier == class_name or f.qualifier.endswith("::" + class_name))]
        return found
    found = [f for f in report.free_functions if f.name == fn_name]
    if not found:
        found = [m for c in report.classes for m in c.methods if m.name == fn_name]
    return found


def find_function_range(report: StructuralReport, class_name: Optional[str],
                        fn_name: str) -> SourceRange:
    """Line range of the single definition of ``class_name::fn_name``."""
    where = f"{class_name}::{fn_name}" if class_name else fn_name
    cands = _candidates(report, class_name, fn_name)
    if not cands:
        raise NotFound(f"{where} not found in {report.file}")
    defs = [m for m in cands if m.is_definition]
    if not defs:
        lines = ", ".join(str(m.range.start_line) for m in cands)
        raise NotADefinition(f"{where} is declared (line {lines}) but not defined in {report.file}")
    if len(defs) > 1:
        listed = "; ".join(f"{m.signature_text} at lines {m.range.start_line}{DASH}"
                           f"{m.range.end_line}" for m in defs)
        raise Ambiguous(f"{where} has {len(defs)} definitions: {listed}",
                        [m.range for m in defs])
    return defs[0].range


def function_text(source: str, rng: SourceRange) -> str:
    lines = source.splitlines(keepends=True)
    return "".join(lines[rng.start_line - 1:rng.end_line])


def _lines(r: SourceRange) -> str:
    return f"(lines {r.start_line}{DASH}{r.end_line})"


def render_class(cls: ClassInfo) -> str:
    out = [f"class {cls.name} {_lines(cls.range)}", "fields:"]
    out += [f"  {f.access} {f.type_text} {f.name}" for f in cls.fields]
    out.append("methods:")
    out += [f"  {m.access} {m.signature_text} {_lines(m.range)}" for m in cls.methods]
    return "\n".join(out)


def render_free_functions(functions: Sequence[MethodInfo]) -> str:
    out = ["functions:"]
    out += [f"  {f.signature_text} {_lines(f.range)}" for f in functions]
    return "\n".join(out)


def render_focus(report: StructuralReport, focus: tuple[Optional[str], str]) -> str:
    class_name, fn_name = focus
    cands = _candidates(report, class_name, fn_name)
    if not cands:
        where = f"{class_name}::{fn_name}" if class_name else fn_name
        raise FocusNotFound(f"{where} not found in {report.file}")
    defs = [m for m in cands if m.is_definition] or cands
    out = ["TARGET FUNCTION:"]
    out += [f"  {m.signature_text} {_lines(m.range)}" for m in defs]
    return "\n".join(out)


def ast_blocks(report: StructuralReport,
               focus: Optional[tuple[Optional[str], str]] = None) -> list[tuple[str, Optional[str]]]:
    """Rendered blocks in output order, each tagged with its class name.

    The focus block and the free-function block carry ``None``.
    """
    blocks: list[tuple[str, Optional[str]]] = []
    if focus is not None:
        blocks.append((render_focus(report, focus), None))
    blocks += [(render_class(c), c.name) for c in report.classes]
    if report.free_functions:
        blocks.append((render_free_functions(report.free_functions), None))
    return blocks


def format_ast_context(report: StructuralReport,
                       focus: Optional[tuple[Optional[str], str]] = None) -> str:
    """Plain-text summary of classes, fields and methods with line ranges.

    Blocks are separated by one blank line. With ``focus`` the block
    naming the target function comes first.
    """
    return "\n\n".join(text for text, _ in ast_blocks(report, focus))
