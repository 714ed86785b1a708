"""``astra`` command-line entry point."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import edit, evaluator, pipeline
from .config import PipelineConfig, load_config
from .embedding import make_embedder
from .errors import AstraError, InvalidValue
from .indexer import index_corpus, load_index, save_index
from .model_client import extract_code_block, generate
from .retrieval import retrieve_top_k
from .structure import compile_db as cdb
from .structure.context import find_function_range, format_ast_context
from .structure.extractor import extract_structure

EXIT_OK, EXIT_USAGE, EXIT_PIPELINE = 0, 2, 3

ENDPOINT_KINDS = {"local": "local_runtime", "remote": "remote_api", "replay": "replay"}


def _add_config_flags(p: argparse.ArgumentParser, model: bool = False) -> None:
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="TOML config file (default .astra/config.toml)")
    g.add_argument("--show-config", action="store_true",
                   help="print the effective configuration before running")
    g.add_argument("--embedder-dim", type=int, dest="embedder_dim")
    g.add_argument("--embed-endpoint", dest="embed_endpoint",
                   help="use a remote embedding service at this URL")
    if model:
        g.add_argument("--endpoint", help="model endpoint base URL")
        g.add_argument("--model", help="model name")
        g.add_argument("--endpoint-kind", choices=sorted(ENDPOINT_KINDS))
        g.add_argument("--replay-dir")
        g.add_argument("--api-key-env")
        g.add_argument("--timeout", type=float)
        g.add_argument("--general-instructions", dest="general_instructions")
        g.add_argument("--char-budget", type=int)


def _add_retrieval_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--top-k", type=int)
    p.add_argument("--min-score", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="astra", description=(
        "Retrieval and structure augmented code generation for C++ sources."))
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("index", help="build an embedding index from an annotated corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--keep-header", action="store_true")
    _add_config_flags(p)

    p = sub.add_parser("query", help="retrieve the closest chunks for a prompt")
    p.add_argument("--index")
    p.add_argument("--prompt-file", required=True)
    p.add_argument("--json", action="store_true")
    _add_retrieval_flags(p)
    _add_config_flags(p)

    p = sub.add_parser("ast", help="print the structural summary of a C++ file")
    p.add_argument("--file", required=True)
    p.add_argument("--compile-db")
    p.add_argument("--class", dest="class_name")
    p.add_argument("--function")
    p.add_argument("--json", action="store_true")

    for name, help_ in (("prompt", "print the composed prompt"),
                        ("generate", "compose a prompt and stream a generation")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--prompt-file", required=True)
        p.add_argument("--index")
        p.add_argument("--file")
        p.add_argument("--compile-db")
        p.add_argument("--class", dest="class_name")
        p.add_argument("--function")
        _add_retrieval_flags(p)
        _add_config_flags(p, model=True)
        if name == "generate":
            p.add_argument("--out", help="also write the extracted code here")

    p = sub.add_parser("apply", help="insert generated code under conflict markers")
    p.add_argument("--file", required=True)
    p.add_argument("--class", dest="class_name")
    p.add_argument("--function", required=True)
    p.add_argument("--from", dest="source", required=True, help="file holding the new code")
    p.add_argument("--label", default="generated")

    p = sub.add_parser("resolve", help="keep one side of a conflict block")
    p.add_argument("--file", required=True)
    side = p.add_mutually_exclusive_group(required=True)
    side.add_argument("--accept", action="store_true")
    side.add_argument("--reject", action="store_true")

    p = sub.add_parser("eval", help="score generations against references")
    p.add_argument("--manifest", required=True)
    p.add_argument("--generations", required=True)
    p.add_argument("--models", help="comma-separated model column order")
    p.add_argument("--csv", help="write full-precision records to this file")
    _add_config_flags(p)

    p = sub.add_parser("run", help="full pipeline: compose, generate, review edit")
    p.add_argument("--prompt-file", required=True)
    p.add_argument("--index")
    p.add_argument("--file")
    p.add_argument("--compile-db")
    p.add_argument("--class", dest="class_name")
    p.add_argument("--function")
    p.add_argument("--run-root")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--yes", action="store_true", help="apply and accept without asking")
    mode.add_argument("--no", action="store_true", help="record the proposal only")
    mode.add_argument("--interactive", action="store_true")
    _add_retrieval_flags(p)
    _add_config_flags(p, model=True)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    get = lambda name: getattr(args, name, None)  # noqa: E731
    o = {
        "index_path": get("index"),
        "compile_db_path": get("compile_db"),
        "top_k": get("top_k"),
        "min_score": get("min_score"),
        "char_budget": get("char_budget"),
        "general_instructions_path": get("general_instructions"),
        "run_root": get("run_root"),
        "embedder.dimension": get("embedder_dim"),
        "embedder.endpoint": get("embed_endpoint"),
        "model.base_url": get("endpoint"),
        "model.model_name": get("model"),
        "model.replay_dir": get("replay_dir"),
        "model.api_key_env": get("api_key_env"),
        "model.timeout": get("timeout"),
    }
    if get("embed_endpoint"):
        o["embedder.kind"] = "remote"
    if get("endpoint_kind"):
        o["model.kind"] = ENDPOINT_KINDS[args.endpoint_kind]
    return o


def _config(args) -> PipelineConfig:
    cfg = load_config(getattr(args, "config", None), overrides=_overrides(args))
    if getattr(args, "show_config", False):
        print(cfg.dumps(), file=sys.stderr)
    return cfg


def _require_index(cfg: PipelineConfig):
    if not cfg.index_path:
        raise InvalidValue("index_path", "pass --index or set index_path in the config")
    return load_index(cfg.index_path)


def _warn(messages) -> None:
    for m in messages:
        print(f"warning: {m}", file=sys.stderr)


def _stream(fragment: str) -> None:
    sys.stdout.write(fragment)
    sys.stdout.flush()


def cmd_index(args) -> int:
    cfg = _config(args)
    index = index_corpus(Path(args.corpus), make_embedder(cfg.embedder), args.keep_header)
    save_index(index, args.out)
    print(f"indexed {len(index.chunks)} chunks into {args.out}")
    return EXIT_OK


def cmd_query(args) -> int:
    cfg = _config(args)
    index = _require_index(cfg)
    embedder = make_embedder(cfg.embedder)
    pipeline.check_embedder(index, embedder)
    query = embedder.embed(pipeline.read_prompt(args.prompt_file))
    results = retrieve_top_k(index, query, cfg.top_k, cfg.min_score)
    if args.json:
        print(json.dumps([r.to_json() for r in results], indent=2))
    else:
        for r in results:
            chunk = index.get(r.chunk_id)
            print(f"{r.rank}  {r.score:.4f}  {r.chunk_id}  {chunk.metadata.task_type}")
    return EXIT_OK


def cmd_ast(args) -> int:
    reports, warnings = pipeline.load_reports(args.file, args.compile_db)
    focus = None
    if args.function:
        focus = (args.class_name, args.function)
        find_function_range(reports[0], *focus)
    if args.json:
        out = [r.to_json(with_warnings=True) for r in reports]
        if focus:
            rng = find_function_range(reports[0], *focus)
            out[0]["focus"] = {"class": args.class_name, "function": args.function,
                               "range": rng.to_json()}
        print(json.dumps(out if len(out) > 1 else out[0], indent=2))
    else:
        print("\n\n".join(format_ast_context(r, focus if n == 0 else None)
                          for n, r in enumerate(reports)))
    _warn(warnings)
    return EXIT_OK


def cmd_prompt(args) -> int:
    cfg = _config(args)
    index = load_index(cfg.index_path) if cfg.index_path else None
    comp = pipeline.compose(pipeline.read_prompt(args.prompt_file), cfg, index, args.file,
                            args.class_name, args.function)
    sys.stdout.write(comp.text)
    _warn(comp.warnings)
    return EXIT_OK


def cmd_generate(args) -> int:
    cfg = _config(args)
    index = load_index(cfg.index_path) if cfg.index_path else None
    comp = pipeline.compose(pipeline.read_prompt(args.prompt_file), cfg, index, args.file,
                            args.class_name, args.function)
    _warn(comp.warnings)
    result = generate(comp.text, cfg.model, _stream)
    if not result.full_text.endswith("\n"):
        sys.stdout.write("\n")
    if args.out:
        edit.write_text(args.out, extract_code_block(result.full_text) + "\n")
    return EXIT_OK


def cmd_apply(args) -> int:
    text = edit.read_text(args.file)
    report = extract_structure(text, args.file)
    rng = find_function_range(report, args.class_name, args.function)
    code = extract_code_block(edit.read_text(args.source))
    proposal = edit.make_proposal(text, args.file, rng, code, args.label)
    edit.apply_to_file(args.file, proposal)
    print(f"{args.file}: markers inserted over lines {rng.start_line}-{rng.end_line}")
    return EXIT_OK


def cmd_resolve(args) -> int:
    decision = "accept" if args.accept else "reject"
    blocks = edit.find_blocks(edit.split_lines(edit.read_text(args.file)))
    resolved = edit.resolve_file(args.file, decision)
    if decision == "accept":
        start, sep, end = blocks[0]
        hint = edit.SourceRange(start + 1, start + max(end - sep - 1, 1))
        _warn(edit.verify_braces(resolved, hint))
    print(f"{args.file}: {decision}ed")
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = _config(args)
    tasks = evaluator.load_manifest(args.manifest)
    gens = evaluator.scan_generations(args.generations)
    models = args.models.split(",") if args.models else sorted({k[1] for k in gens})
    expected = [(t.id, m, mode) for t in tasks for m in models for mode in evaluator.MODES]
    records = evaluator.run_benchmark(tasks, gens, models, make_embedder(cfg.embedder),
                                      expected)
    labels = {t.id: t.description for t in tasks}
    sys.stdout.write(evaluator.render_table(records, models, [t.id for t in tasks], labels))
    if args.csv:
        Path(args.csv).write_text(evaluator.records_to_csv(records), encoding="utf-8")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    decision = "accept" if args.yes else None
    interactive = bool(args.interactive)
    outcome = pipeline.run_pipeline(args.prompt_file, args.file, cfg, interactive=interactive,
                                    decision=decision, class_name=args.class_name,
                                    function_name=args.function, on_chunk=_stream)
    if not outcome.response.endswith("\n"):
        sys.stdout.write("\n")
    _warn(outcome.warnings)
    note = f"; edit {outcome.decision}" if outcome.decision else ""
    print(f"run artifacts in {outcome.run_dir}{note}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "index": cmd_index, "query": cmd_query, "ast": cmd_ast, "prompt": cmd_prompt,
    "generate": cmd_generate, "apply": cmd_apply, "resolve": cmd_resolve,
    "eval": cmd_eval, "run": cmd_run,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except AstraError as exc:
        print(f"error [{exc.module}]: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
