"""Subject-program ingestion: parse gate, structural classification, size metrics.

Subject programs are Python source carried as opaque text.  The parser
sits behind small module-level functions so another grammar adapter can
replace them without touching callers.

Classification rule (documented so downstream statistics are reproducible):

* MT when the module defines >= 2 top-level classes and uses threading
  (a ``threading``/``_thread`` import, or construction of a thread or
  lock primitive imported from ``threading``);
* MC when >= 2 top-level classes without threading;
* SC when exactly 1 top-level class;
* SF otherwise.

LOC rule: physical lines that are neither blank nor comment-only.
Docstrings are expression statements and therefore count as code.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

SUBJECT_LANGUAGE = "python"
SUBJECT_EXTENSION = ".py"

_THREAD_CONSTRUCTS = {
    "Thread",
    "Timer",
    "Lock",
    "RLock",
    "Condition",
    "Semaphore",
    "BoundedSemaphore",
    "Event",
    "Barrier",
}


class IngestError(RuntimeError):
    """The ingestion source itself is unusable (not a per-record problem)."""


class SourceParseError(ValueError):
    """Subject source does not parse under the subject-language grammar."""


class Origin(str, Enum):
    SYNTHETIC = "synthetic"
    CORPUS = "corpus"
    CUSTOM = "custom"


class ComplexityCategory(str, Enum):
    SF = "SF"
    SC = "SC"
    MC = "MC"
    MT = "MT"


@dataclass(frozen=True)
class Program:
    """One subject source file plus derived metadata."""

    id: str
    source_text: str
    origin: Origin
    complexity: ComplexityCategory
    loc: int
    title: str | None = None
    language: str = SUBJECT_LANGUAGE

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "origin": self.origin.value,
            "complexity": self.complexity.value,
            "loc": self.loc,
            "title": self.title,
            "language": self.language,
        }

    @classmethod
    def from_dict(cls, data: dict, source_text: str) -> "Program":
        return cls(
            id=data["id"],
            source_text=source_text,
            origin=Origin(data["origin"]),
            complexity=ComplexityCategory(data["complexity"]),
            loc=data["loc"],
            title=data.get("title"),
            language=data.get("language", SUBJECT_LANGUAGE),
        )


@dataclass(frozen=True)
class RejectedEntry:
    ref: str
    reason: str
    line: int | None = None

    def to_dict(self) -> dict:
        return {"ref": self.ref, "reason": self.reason, "line": self.line}


@dataclass
class IngestResult:
    programs: list[Program] = field(default_factory=list)
    rejected: list[RejectedEntry] = field(default_factory=list)

    def manifest(self) -> dict:
        return {
            "accepted": [p.to_dict() for p in self.programs],
            "rejected": [r.to_dict() for r in self.rejected],
        }


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def effective_lines(source_text: str) -> list[int]:
    """1-based numbers of lines that are neither blank nor comment-only."""
    out = []
    for i, line in enumerate(source_text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            out.append(i)
    return out


def count_loc(source_text: str) -> int:
    return len(effective_lines(source_text))


def parse_source(source_text: str, ref: str = "<subject>") -> ast.Module:
    try:
        return ast.parse(source_text)
    except SyntaxError as exc:
        raise SourceParseError(f"{ref}: {exc.msg} (line {exc.lineno})") from exc


def _uses_threading(tree: ast.Module) -> bool:
    imported_from_threading: set[str] = set()
    has_threading_import = False
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            for alias in node.names:
                if alias.name.split(".")[0] in ("threading", "_thread"):
                    has_threading_import = True
        elif isinstance(node, ast.ImportFrom):
            if node.module and node.module.split(".")[0] in ("threading", "_thread"):
                has_threading_import = True
                for alias in node.names:
                    imported_from_threading.add(alias.asname or alias.name)
    if has_threading_import:
        # Import alone is not enough: require an actual construction call.
        for node in ast.walk(tree):
            if not isinstance(node, ast.Call):
                continue
            func = node.func
            if isinstance(func, ast.Attribute) and func.attr in _THREAD_CONSTRUCTS:
                if isinstance(func.value, ast.Name) and func.value.id in ("threading", "_thread"):
                    return True
            if isinstance(func, ast.Name) and func.id in imported_from_threading:
                if func.id in _THREAD_CONSTRUCTS:
                    return True
        # Fall back: plain `import threading` with attribute use still counts
        # as threading code even without a recognized constructor name.
        for node in ast.walk(tree):
            if isinstance(node, ast.Attribute) and isinstance(node.value, ast.Name):
                if node.value.id in ("threading", "_thread"):
                    return True
    return False


def classify_complexity(source_text: str) -> ComplexityCategory:
    tree = parse_source(source_text)
    class_count = sum(isinstance(node, ast.ClassDef) for node in tree.body)
    if class_count >= 2 and _uses_threading(tree):
        return ComplexityCategory.MT
    if class_count >= 2:
        return ComplexityCategory.MC
    if class_count == 1:
        return ComplexityCategory.SC
    return ComplexityCategory.SF


def build_program(
    program_id: str,
    source_text: str,
    origin: Origin,
    title: str | None = None,
) -> Program:
    """Parse-gate a source text and derive metadata. Raises SourceParseError."""
    complexity = classify_complexity(source_text)
    loc = count_loc(source_text)
    if loc < 1:
        raise SourceParseError(f"{program_id}: no effective lines of code")
    return Program(
        id=program_id,
        source_text=source_text,
        origin=origin,
        complexity=complexity,
        loc=loc,
        title=title,
    )


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

def ingest_directory(path: str | Path, origin: Origin = Origin.SYNTHETIC) -> IngestResult:
    """Ingest every subject-language file in a directory, ordered by filename.

    Unparseable files land in the rejection list instead of failing the
    whole ingestion; an unreadable path is a hard IngestError.
    """
    root = Path(path)
    if not root.is_dir():
        raise IngestError(f"not a readable directory: {root}")
    result = IngestResult()
    for file in sorted(root.glob(f"*{SUBJECT_EXTENSION}")):
        try:
            text = file.read_text(encoding="utf-8")
        except OSError as exc:
            result.rejected.append(RejectedEntry(ref=file.name, reason=str(exc)))
            continue
        try:
            result.programs.append(build_program(file.stem, text, origin))
        except SourceParseError as exc:
            result.rejected.append(RejectedEntry(ref=file.name, reason=str(exc)))
    return result


def ingest_jsonl(path: str | Path, field_map: dict[str, str]) -> IngestResult:
    """Ingest a JSONL corpus; one record per line; Origin.CORPUS programs.

    ``field_map`` maps record keys to the canonical slots ``id``,
    ``source`` and (optionally) ``title``, e.g. ``{"task_id": "id",
    "completion": "source"}``.  Records missing a mapped required key
    are rejected with their line number.
    """
    slots = {slot: key for key, slot in field_map.items()}
    unknown = set(field_map.values()) - {"id", "source", "title"}
    if unknown:
        raise ValueError(f"field_map targets unknown slots: {sorted(unknown)}")
    for required in ("id", "source"):
        if required not in slots:
            raise ValueError(f"field_map must map some record key to {required!r}")

    file = Path(path)
    if not file.is_file():
        raise IngestError(f"not a readable file: {file}")

    result = IngestResult()
    seen_ids: set[str] = set()
    with file.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                result.rejected.append(
                    RejectedEntry(ref=f"line {lineno}", reason=f"malformed JSON: {exc.msg}", line=lineno)
                )
                continue
            missing = [key for key in (slots["id"], slots["source"]) if key not in record]
            if missing:
                result.rejected.append(
                    RejectedEntry(
                        ref=f"line {lineno}",
                        reason=f"missing mapped key(s): {', '.join(missing)}",
                        line=lineno,
                    )
                )
                continue
            program_id = str(record[slots["id"]])
            title = record.get(slots["title"]) if "title" in slots else None
            if program_id in seen_ids:
                result.rejected.append(
                    RejectedEntry(ref=program_id, reason="duplicate id", line=lineno)
                )
                continue
            try:
                program = build_program(
                    program_id, str(record[slots["source"]]), Origin.CORPUS, title=title
                )
            except SourceParseError as exc:
                result.rejected.append(RejectedEntry(ref=program_id, reason=str(exc), line=lineno))
                continue
            seen_ids.add(program_id)
            result.programs.append(program)
    return result
