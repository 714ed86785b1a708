"""Reading ``compile_commands.json`` compilation databases.

Only translation-unit enumeration is used; flags are parsed so callers
can inspect include paths, but nothing is compiled.
"""

from __future__ import annotations

import json
import logging
import shlex
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from ..errors import NotAnArray, Unreadable

log = logging.getLogger(__name__)

HEADER_SUFFIXES = (".H", ".h", ".hpp", ".hh", ".hxx")


@dataclass(frozen=True)
class CompileDbEntry:
    file: str
    directory: str
    arguments_or_command: Union[tuple[str, ...], str]
    output: Optional[str] = None

    @property
    def argv(self) -> list[str]:
        if isinstance(self.arguments_or_command, str):
            return shlex.split(self.arguments_or_command)
        return list(self.arguments_or_command)

    @property
    def path(self) -> Path:
        p = Path(self.file)
        return p if p.is_absolute() else Path(self.directory) / p

    def include_dirs(self) -> list[Path]:
        argv = self.argv
        dirs = []
        for k, arg in enumerate(argv):
            if arg in ("-I", "-isystem", "-iquote") and k + 1 < len(argv):
                value = argv[k + 1]
            elif arg.startswith("-I") and len(arg) > 2:
                value = arg[2:]
            else:
                continue
            p = Path(value)
            dirs.append(p if p.is_absolute() else Path(self.directory) / p)
        return dirs

    def sibling_headers(self) -> list[Path]:
        """Headers sharing the translation unit's stem, next to it."""
        src = self.path
        return [src.with_suffix(s) for s in HEADER_SUFFIXES if src.with_suffix(s).is_file()]


class CompileDb(list):
    """The parsed entries, plus warnings about skipped ones."""

    def __init__(self, entries=(), warnings=()):
        super().__init__(entries)
        self.warnings = list(warnings)

    def find(self, path) -> Optional[CompileDbEntry]:
        target = Path(path).resolve()
        for e in self:
            if e.path.resolve() == target:
                return e
        return None


def parse_compile_db(data, base: Optional[Path] = None) -> CompileDb:
    """Entries from decoded JSON; relative directories resolve against ``base``."""
    if not isinstance(data, list):
        raise NotAnArray("compile database must be a JSON array")
    entries: list[CompileDbEntry] = []
    warnings: list[str] = []
    seen: set[str] = set()
    for n, obj in enumerate(data):
        if not isinstance(obj, dict) or not obj.get("file"):
            warnings.append(f"entry {n}: missing 'file', skipped")
            continue
        if "arguments" in obj:
            args: Union[tuple[str, ...], str] = tuple(obj["arguments"])
        elif "command" in obj:
            args = obj["command"]
        else:
            warnings.append(f"entry {n}: no 'arguments' or 'command', skipped")
            continue
        directory = obj.get("directory", "")
        if base is not None and not Path(directory).is_absolute():
            directory = str(base / directory)
        entry = CompileDbEntry(obj["file"], directory, args, obj.get("output"))
        key = str(entry.path)
        if key in seen:
            warnings.append(f"entry {n}: duplicate file {obj['file']}, keeping first")
            continue
        seen.add(key)
        entries.append(entry)
    for w in warnings:
        log.warning(w)
    return CompileDb(entries, warnings)


def load_compile_db(path) -> CompileDb:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise Unreadable(f"cannot read compile database {path}: {exc}") from exc
    return parse_compile_db(data, Path(path).parent)
