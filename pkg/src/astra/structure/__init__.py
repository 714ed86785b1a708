from .compile_db import CompileDbEntry, load_compile_db
from .context import find_function_range, format_ast_context, function_text
from .extractor import (
    ClassInfo,
    FieldInfo,
    MethodInfo,
    SourceRange,
    StructuralReport,
    extract_structure,
)
from .normalizer import normalize_identifiers

__all__ = [
    "ClassInfo",
    "CompileDbEntry",
    "FieldInfo",
    "MethodInfo",
    "SourceRange",
    "StructuralReport",
    "extract_structure",
    "find_function_range",
    "format_ast_context",
    "function_text",
    "load_compile_db",
    "normalize_identifiers",
]
