"""End-to-end orchestration: prompt file in, reviewed edit out."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from . import edit
from .config import PipelineConfig
from .embedding import make_embedder
from .errors import (
    AstraError,
    BlankPrompt,
    EmbedderMismatch,
    InvalidValue,
    StructureError,
)
from .indexer import ChunkIndex, load_index
from .model_client import extract_code_block, generate, prompt_digest
from .prompt import (
    DEFAULT_GENERAL_INSTRUCTIONS,
    Intent,
    PromptBundle,
    build_bundle,
    classify_intent,
    compose_prompt,
)
from .retrieval import RetrievalResult, format_rag_blocks, retrieve_top_k
from .structure import compile_db as cdb
from .structure.context import ast_blocks, find_function_range
from .structure.extractor import StructuralReport, extract_structure

log = logging.getLogger(__name__)


@dataclass
class Composition:
    intent: Intent
    results: list[RetrievalResult]
    reports: list[StructuralReport]
    focus: Optional[tuple[Optional[str], str]]
    bundle: PromptBundle
    text: str
    warnings: list[str] = field(default_factory=list)


@dataclass
class RunOutcome:
    run_dir: Path
    composition: Composition
    response: str
    code: str
    proposal: Optional[edit.EditProposal] = None
    decision: Optional[str] = None
    warnings: list[str] = field(default_factory=list)


def read_prompt(path) -> str:
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise BlankPrompt(f"prompt file {path} is blank")
    return text.strip("\n")


def general_instructions(config: PipelineConfig) -> str:
    if config.general_instructions_path:
        return Path(config.general_instructions_path).read_text(encoding="utf-8").strip("\n")
    return DEFAULT_GENERAL_INSTRUCTIONS


def check_embedder(index: ChunkIndex, embedder) -> None:
    if embedder.embedder_id != index.embedder_id:
        raise EmbedderMismatch(
            f"index was built with {index.embedder_id!r} but the configured embedder is "
            f"{embedder.embedder_id!r}")


def load_reports(target_file, compile_db_path=None) -> tuple[list[StructuralReport], list[str]]:
    """Structure of the target file, plus headers beside it when a compile db is given."""
    target = Path(target_file)
    reports = [extract_structure(edit.read_text(target), str(target))]
    warnings: list[str] = []
    if compile_db_path:
        db = cdb.load_compile_db(compile_db_path)
        warnings += db.warnings
        entry = db.find(target)
        if entry is None:
            warnings.append(f"{target} is not listed in {compile_db_path}")
            headers = [target.with_suffix(s) for s in cdb.HEADER_SUFFIXES
                       if target.with_suffix(s).is_file()]
        else:
            headers = entry.sibling_headers()
        for h in headers:
            if h.resolve() != target.resolve():
                reports.append(extract_structure(edit.read_text(h), str(h)))
    for r in reports:
        warnings += [f"{r.file}: {w}" for w in r.warnings]
    return reports, warnings


def resolve_focus(intent: Intent, report: Optional[StructuralReport],
                  class_name: Optional[str], function_name: Optional[str]
                  ) -> Optional[tuple[Optional[str], str]]:
    if report is None:
        return None
    if function_name:
        return (class_name, function_name)
    # a constructor shares its class's name; prefer any other mentioned function
    names = sorted(intent.mentioned_functions, key=lambda f: f in intent.mentioned_classes)
    for fn in names:
        classes = list(intent.mentioned_classes) or [None]
        for cls in classes:
            try:
                find_function_range(report, cls, fn)
                return (cls, fn)
            except StructureError:
                continue
    return None


def compose(prompt_text: str, config: PipelineConfig, index: Optional[ChunkIndex] = None,
            target_file=None, class_name: Optional[str] = None,
            function_name: Optional[str] = None) -> Composition:
    """Intent, retrieval and structure stages, assembled into one prompt."""
    if not prompt_text.strip():
        raise BlankPrompt("prompt is blank")
    warnings: list[str] = []
    reports: list[StructuralReport] = []
    if target_file is not None:
        reports, warnings = load_reports(target_file, config.compile_db_path)

    classes, functions = [], []
    for r in reports:
        c, f = r.symbols()
        classes += c
        functions += f
    intent = classify_intent(prompt_text, list(dict.fromkeys(classes)),
                             list(dict.fromkeys(functions)))

    results: list[RetrievalResult] = []
    rag_blocks: list[str] = []
    if index is not None:
        embedder = make_embedder(config.embedder)
        check_embedder(index, embedder)
        query = embedder.embed(prompt_text)
        results = retrieve_top_k(index, query, config.top_k, config.min_score)
        rag_blocks = format_rag_blocks(index, results)

    focus = resolve_focus(intent, reports[0] if reports else None, class_name, function_name)
    mentioned = set(intent.mentioned_classes)
    if class_name:
        mentioned.add(class_name)
    blocks: list[tuple[str, bool]] = []
    for n, r in enumerate(reports):
        for text, cls in ast_blocks(r, focus if n == 0 else None):
            short = cls.split("::")[-1] if cls else None
            keep = cls is None and text.startswith("TARGET FUNCTION:") or short in mentioned
            blocks.append((text, keep))

    bundle = build_bundle(prompt_text, rag_blocks, blocks, general_instructions(config),
                          config.char_budget)
    return Composition(intent, results, reports, focus, bundle, compose_prompt(bundle), warnings)


def new_run_dir(root, prompt: str) -> Path:
    stamp = time.strftime("%Y%m%dT%H%M%S")
    base = Path(root) / f"{stamp}-{prompt_digest(prompt)[:8]}"
    path, n = base, 1
    while path.exists():
        n += 1
        path = base.with_name(f"{base.name}-{n}")
    path.mkdir(parents=True)
    return path


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def run_pipeline(prompt_file, target_file, config: PipelineConfig, interactive: bool = False,
                 decision: Optional[str] = None, class_name: Optional[str] = None,
                 function_name: Optional[str] = None,
                 on_chunk: Optional[Callable[[str], None]] = None,
                 ask: Optional[Callable[[str], str]] = None) -> RunOutcome:
    """Run every stage and record artifacts in a fresh run directory.

    ``decision`` of ``accept``/``reject`` resolves an edit without asking;
    ``interactive`` applies markers and asks through ``ask``.
    """
    prompt_text = read_prompt(prompt_file)
    if not config.index_path:
        raise InvalidValue("index_path", "an index is required")
    for key, value in (("index_path", config.index_path),
                       ("compile_db_path", config.compile_db_path),
                       ("general_instructions_path", config.general_instructions_path)):
        if value and not Path(value).exists():
            raise InvalidValue(key, f"{value} does not exist")
    index = load_index(config.index_path)
    comp = compose(prompt_text, config, index, target_file, class_name, function_name)

    run_dir = new_run_dir(config.run_root, comp.text)
    _write(run_dir / "prompt.txt", comp.text)

    result = generate(comp.text, config.model, on_chunk)
    _write(run_dir / "response.txt", result.full_text)
    code = extract_code_block(result.full_text)
    _write(run_dir / "code.txt", code + "\n")

    outcome = RunOutcome(run_dir, comp, result.full_text, code, warnings=list(comp.warnings))
    if comp.intent.kind == "edit" and target_file is not None:
        if comp.focus is None:
            outcome.warnings.append("edit intent but no target function could be resolved")
        else:
            try:
                rng = find_function_range(comp.reports[0], *comp.focus)
            except StructureError as exc:
                outcome.warnings.append(f"cannot place edit: {exc}")
            else:
                text = edit.read_text(target_file)
                outcome.proposal = edit.make_proposal(text, str(target_file), rng, code,
                                                      result.model_name or config.model.model_name)
                _write(run_dir / "proposal.json",
                       json.dumps(outcome.proposal.to_json(), indent=2) + "\n")
                outcome.decision = _review(target_file, outcome, interactive, decision, ask)

    summary = {
        "intent": comp.intent.to_json(),
        "retrieval": [r.to_json() for r in comp.results],
        "focus": list(comp.focus) if comp.focus else None,
        "proposal": outcome.proposal is not None,
        "decision": outcome.decision,
        "warnings": outcome.warnings,
    }
    _write(run_dir / "run.json", json.dumps(summary, indent=2) + "\n")
    return outcome


def _review(target_file, outcome: RunOutcome, interactive: bool, decision: Optional[str],
            ask) -> Optional[str]:
    proposal = outcome.proposal
    if decision is None and not interactive:
        return "recorded"
    if decision == "reject":
        return "reject"
    edit.apply_to_file(target_file, proposal)
    if decision is None:
        answer = ""
        while answer not in ("a", "r", "s"):
            answer = (ask or input)("[a]ccept / [r]eject / [s]kip: ").strip().lower()[:1]
        decision = {"a": "accept", "r": "reject", "s": "skip"}[answer]
    if decision == "skip":
        return "skip"
    resolved = edit.resolve_file(target_file, decision)
    if decision == "accept":
        rng = edit.replacement_range(proposal)
        outcome.warnings += edit.verify_braces(resolved, rng)
    return decision


__all__ = ["AstraError", "Composition", "RunOutcome", "compose", "run_pipeline"]
