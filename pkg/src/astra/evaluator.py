"""Similarity scoring of generated code against reference implementations."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .embedding import DeterministicEmbedder, cosine_similarity
from .errors import MissingGeneration, NotAFunction
from .model_client import extract_code_block
from .structure.normalizer import normalize_identifiers

MODES = ("baseline", "augmented")
MISSING_CELL = "—"
MODE_TITLES = {
    "baseline": "Baseline (user prompt only)",
    "augmented": "Augmented (user prompt + RAG chunks + AST info)",
}


@dataclass(frozen=True)
class BenchmarkTask:
    id: str
    description: str
    prompt_file: str
    reference_file: str
    preserve_identifiers: tuple[str, ...] = ()

    @classmethod
    def from_json(cls, obj: dict, base: Optional[Path] = None) -> "BenchmarkTask":
        def resolve(p: str) -> str:
            return str(base / p) if base is not None and not Path(p).is_absolute() else p

        return cls(obj["id"], obj.get("description", obj["id"]), resolve(obj["prompt_file"]),
                   resolve(obj["reference_file"]), tuple(obj.get("preserve_identifiers", ())))


@dataclass(frozen=True)
class SimilarityRecord:
    task_id: str
    model_name: str
    mode: str
    score: float
    embedder_id: str = field(default="", compare=False)

    def to_json(self) -> dict:
        return {"task_id": self.task_id, "model_name": self.model_name, "mode": self.mode,
                "score": self.score, "embedder_id": self.embedder_id}


def load_manifest(path) -> list[BenchmarkTask]:
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise ValueError("task manifest must be a JSON array")
    return [BenchmarkTask.from_json(obj, path.parent) for obj in data]


def score_pair(generated: str, reference: str, preserve: Sequence[str] = (),
               embedder=None) -> float:
    """Cosine similarity of the identifier-normalized embeddings."""
    embedder = embedder or DeterministicEmbedder()
    sides = {}
    for label, text in (("generated", generated), ("reference", reference)):
        try:
            sides[label] = normalize_identifiers(text, preserve)
        except NotAFunction as exc:
            raise NotAFunction(f"{label} code: {exc}") from exc
    return cosine_similarity(embedder.embed(sides["generated"]),
                             embedder.embed(sides["reference"]))


def scan_generations(root) -> dict[tuple[str, str, str], Path]:
    """Map ``<task>/<model>/<mode>.txt`` files under ``root`` to keys."""
    root = Path(root)
    found = {}
    for p in sorted(root.glob("*/*/*.txt")):
        task, model, mode = p.parent.parent.name, p.parent.name, p.stem
        if mode in MODES:
            found[(task, model, mode)] = p
    return found


def run_benchmark(tasks: Sequence[BenchmarkTask], generations: Mapping[tuple, Path],
                  models: Optional[Sequence[str]] = None, embedder=None,
                  expected: Optional[Sequence[tuple[str, str, str]]] = None
                  ) -> list[SimilarityRecord]:
    """Score every (task, model, mode) generation.

    ``expected`` lists keys that must be present; all absent ones are
    reported together. Records come out in task order, model order, then
    baseline before augmented.
    """
    embedder = embedder or DeterministicEmbedder()
    if expected is not None:
        missing = [k for k in expected if k not in generations or not Path(generations[k]).is_file()]
    else:
        missing = [k for k, p in generations.items() if not Path(p).is_file()]
    if missing:
        raise MissingGeneration(missing)

    if models is None:
        models = sorted({k[1] for k in generations})
    records = []
    for task in tasks:
        reference = Path(task.reference_file).read_text(encoding="utf-8")
        for model in models:
            for mode in MODES:
                path = generations.get((task.id, model, mode))
                if path is None:
                    continue
                code = extract_code_block(Path(path).read_text(encoding="utf-8"))
                score = score_pair(code, reference, task.preserve_identifiers, embedder)
                records.append(SimilarityRecord(task.id, model, mode, score,
                                                embedder.embedder_id))
    return records


def _table(rows: list[list[str]]) -> str:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    out = []
    for r in rows:
        cells = [r[0].ljust(widths[0])] + [v.rjust(w) for v, w in zip(r[1:], widths[1:])]
        out.append("  ".join(cells).rstrip())
    return "\n".join(out)


def render_table(records: Sequence[SimilarityRecord], models: Sequence[str],
                 tasks: Optional[Sequence[str]] = None,
                 labels: Optional[Mapping[str, str]] = None) -> str:
    """One aligned table per mode: a row per task, a column per model.

    Cells hold the score to two decimals, or ``MISSING_CELL`` when absent.
    """
    if tasks is None:
        tasks = list(dict.fromkeys(r.task_id for r in records))
    labels = labels or {}
    cells = {(r.task_id, r.model_name, r.mode): r.score for r in records}
    out = []
    for mode in MODES:
        rows = [["Task"] + list(models)]
        for t in tasks:
            row = [labels.get(t, t)]
            for m in models:
                s = cells.get((t, m, mode))
                row.append(MISSING_CELL if s is None else f"{s:.2f}")
            rows.append(row)
        out.append(f"{MODE_TITLES[mode]}\n{_table(rows)}")
    return "\n\n".join(out) + "\n"


def records_to_csv(records: Sequence[SimilarityRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["task_id", "model_name", "mode", "score", "embedder_id"])
    for r in records:
        writer.writerow([r.task_id, r.model_name, r.mode, repr(r.score), r.embedder_id])
    return buf.getvalue()
