"""On-disk campaign: programs, mutants, summaries, verdicts, phase state.

Layout under one campaign directory:

    campaign.json                     id, phase, config snapshot
    campaign.lock                     advisory writer lock
    programs/{id}.py, programs.json   subjects + ingestion manifest
    mutants/{program}/{cell}.py       one file per mutant, plus a .diff
    mutants.json                      mutant manifest incl. shortfalls
    summaries/{cache_key}.json        content-addressed summary cache
    summaries.json                    subject_ref -> cache_key index
    verdicts/{rater}/{mutant}.json    per-rater verdicts ("reconciled" is
                                      a reserved rater directory)
    report/                           emitted tables and figures

Every write is write-then-rename (see fsutil), so a crash leaves either
the old or the new version of a file.  Phases only advance; re-running a
completed stage is a no-op.
"""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from mutsum.corpus import IngestResult, Program, SourceParseError, parse_source
from mutsum import fsutil
from mutsum.fsutil import CampaignLock, read_json
from mutsum.mutation.engine import Cell, PlanResult, _splice
from mutsum.mutation.operators import SourceIndex
from mutsum.mutation.types import LocationBucket, Mutant, MutationType
from mutsum.summaries import (
    FIXED_PROMPT,
    SummaryRecord,
    SummaryStore,
    cache_key,
    record_digest,
)

RECONCILED_DIR = "reconciled"

_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


class PhaseError(RuntimeError):
    """Operation requires a phase the campaign is not in."""


class IntegrityGapError(RuntimeError):
    """Artifacts required to advance are missing."""

    def __init__(self, phase: "Phase", gaps: list[str]):
        super().__init__(f"cannot reach phase {phase.value}: {'; '.join(gaps[:5])}"
                         + (f" (+{len(gaps) - 5} more)" if len(gaps) > 5 else ""))
        self.phase = phase
        self.gaps = gaps


class CampaignExistsError(RuntimeError):
    """Refusing to initialize over an existing campaign without resume."""


class Phase(str, Enum):
    INITIALIZED = "initialized"
    INGESTED = "ingested"
    MUTATED = "mutated"
    SUMMARIZED = "summarized"
    UNDER_REVIEW = "under_review"
    RECONCILED = "reconciled"
    REPORTED = "reported"


PHASE_ORDER = [
    Phase.INITIALIZED,
    Phase.INGESTED,
    Phase.MUTATED,
    Phase.SUMMARIZED,
    Phase.UNDER_REVIEW,
    Phase.RECONCILED,
    Phase.REPORTED,
]


def _check_name(name: str, what: str) -> str:
    if not _NAME_RE.match(name):
        raise ValueError(f"unsafe {what} name: {name!r}")
    return name


def quota_to_dict(quota: dict[Cell, int]) -> dict:
    nested: dict[str, dict[str, int]] = {}
    for (mutation_type, bucket), count in quota.items():
        nested.setdefault(mutation_type.value, {})[bucket.value] = count
    return {t: dict(sorted(b.items())) for t, b in sorted(nested.items())}


def quota_from_dict(nested: dict) -> dict[Cell, int]:
    quota: dict[Cell, int] = {}
    for type_code, buckets in nested.items():
        for bucket_code, count in buckets.items():
            quota[(MutationType(type_code), LocationBucket(bucket_code))] = count
    return quota


@dataclass
class CampaignConfig:
    quota: dict[Cell, int]
    seed: int
    provider: dict
    smoke: dict | None = None

    def to_dict(self) -> dict:
        return {
            "quota": quota_to_dict(self.quota),
            "seed": self.seed,
            "provider": self.provider,
            "smoke": self.smoke,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        return cls(
            quota=quota_from_dict(data["quota"]),
            seed=data["seed"],
            provider=data["provider"],
            smoke=data.get("smoke"),
        )


@dataclass(frozen=True)
class Finding:
    kind: str
    ref: str
    detail: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "ref": self.ref, "detail": self.detail}


@dataclass
class IntegrityReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.findings

    def add(self, kind: str, ref: str, detail: str) -> None:
        self.findings.append(Finding(kind, ref, detail))

    def to_dict(self) -> dict:
        return {"clean": self.clean, "findings": [f.to_dict() for f in self.findings]}


class CampaignStore:
    """Owner of one campaign directory."""

    def __init__(self, root: str | Path, campaign_id: str, config: CampaignConfig,
                 phase: Phase, created_at: str, planned_mutants: int = 0):
        self.root = Path(root)
        self.id = campaign_id
        self.config = config
        self.phase = phase
        self.created_at = created_at
        self.planned_mutants = planned_mutants

    # -- lifecycle -----------------------------------------------------------

    @classmethod
    def init(cls, root: str | Path, campaign_id: str, config: CampaignConfig,
             resume: bool = False) -> "CampaignStore":
        root = Path(root)
        manifest = root / "campaign.json"
        if manifest.exists():
            if not resume:
                raise CampaignExistsError(
                    f"{root} already holds a campaign; pass resume to reopen it"
                )
            return cls.load(root)
        _check_name(campaign_id, "campaign")
        store = cls(
            root=root,
            campaign_id=campaign_id,
            config=config,
            phase=Phase.INITIALIZED,
            created_at=datetime.now(timezone.utc).isoformat(),
        )
        root.mkdir(parents=True, exist_ok=True)
        store.save()
        return store

    @classmethod
    def load(cls, root: str | Path) -> "CampaignStore":
        root = Path(root)
        data = read_json(root / "campaign.json")
        return cls(
            root=root,
            campaign_id=data["id"],
            config=CampaignConfig.from_dict(data["config"]),
            phase=Phase(data["phase"]),
            created_at=data["created_at"],
            planned_mutants=data.get("planned_mutants", 0),
        )

    def save(self) -> None:
        fsutil.atomic_write_json(
            self.root / "campaign.json",
            {
                "id": self.id,
                "phase": self.phase.value,
                "config": self.config.to_dict(),
                "planned_mutants": self.planned_mutants,
                "created_at": self.created_at,
            },
        )

    def writer_lock(self) -> CampaignLock:
        return CampaignLock(self.root)

    # -- programs ------------------------------------------------------------

    @property
    def programs_dir(self) -> Path:
        return self.root / "programs"

    def attach_programs(self, result: IngestResult) -> None:
        existing = self.programs_manifest()
        accepted = {entry["id"] for entry in existing.get("accepted", [])}
        for program in result.programs:
            if program.id in accepted:
                continue
            fsutil.atomic_write_text(self.programs_dir / f"{program.id}.py", program.source_text)
        manifest = result.manifest()
        merged = {
            "accepted": existing.get("accepted", [])
            + [e for e in manifest["accepted"] if e["id"] not in accepted],
            "rejected": existing.get("rejected", []) + manifest["rejected"],
        }
        fsutil.atomic_write_json(self.root / "programs.json", merged)
        per_program = sum(self.config.quota.values())
        self.planned_mutants = len(merged["accepted"]) * per_program
        if self.phase is Phase.INITIALIZED and merged["accepted"]:
            self.phase = Phase.INGESTED
        self.save()

    def programs_manifest(self) -> dict:
        path = self.root / "programs.json"
        if not path.exists():
            return {"accepted": [], "rejected": []}
        return read_json(path)

    def programs(self) -> list[Program]:
        out = []
        for entry in self.programs_manifest()["accepted"]:
            source = (self.programs_dir / f"{entry['id']}.py").read_text(encoding="utf-8")
            out.append(Program.from_dict(entry, source))
        return out

    def program(self, program_id: str) -> Program:
        for entry in self.programs_manifest()["accepted"]:
            if entry["id"] == program_id:
                source = (self.programs_dir / f"{program_id}.py").read_text(encoding="utf-8")
                return Program.from_dict(entry, source)
        raise KeyError(f"no such program: {program_id}")

    # -- mutants ---------------------------------------------------------------

    @property
    def mutants_dir(self) -> Path:
        return self.root / "mutants"

    def _mutant_rel(self, mutant_id: str) -> tuple[str, str]:
        program_id, _, cell = mutant_id.partition("/")
        if not program_id or not cell:
            raise ValueError(f"malformed mutant id: {mutant_id!r}")
        _check_name(program_id, "program")
        _check_name(cell, "mutant")
        return program_id, cell

    def write_plan(self, program: Program, plan: PlanResult) -> int:
        """Persist a plan's mutants; returns how many files were new."""
        manifest = self.mutants_manifest()
        records: dict[str, dict] = manifest.get("mutants", {})
        new = 0
        for mutant in plan.mutants:
            if mutant.id in records:
                continue
            program_id, cell = self._mutant_rel(mutant.id)
            fsutil.atomic_write_text(self.mutants_dir / program_id / f"{cell}.py", mutant.mutated_source)
            diff = difflib.unified_diff(
                program.source_text.splitlines(keepends=True),
                mutant.mutated_source.splitlines(keepends=True),
                fromfile=f"{program_id}.py",
                tofile=f"{program_id}/{cell}.py",
            )
            fsutil.atomic_write_text(self.mutants_dir / program_id / f"{cell}.diff", "".join(diff))
            records[mutant.id] = mutant.to_dict()
            new += 1
        shortfalls = manifest.get("shortfalls", {})
        shortfalls[program.id] = plan.shortfall_manifest()
        fsutil.atomic_write_json(
            self.root / "mutants.json", {"mutants": records, "shortfalls": shortfalls}
        )
        return new

    def mutants_manifest(self) -> dict:
        path = self.root / "mutants.json"
        if not path.exists():
            return {"mutants": {}, "shortfalls": {}}
        return read_json(path)

    def mutant_ids(self) -> list[str]:
        return sorted(self.mutants_manifest()["mutants"])

    def mutant(self, mutant_id: str) -> Mutant:
        data = self.mutants_manifest()["mutants"].get(mutant_id)
        if data is None:
            raise KeyError(f"no such mutant: {mutant_id}")
        program_id, cell = self._mutant_rel(mutant_id)
        source = (self.mutants_dir / program_id / f"{cell}.py").read_text(encoding="utf-8")
        return Mutant.from_dict(data, source)

    def mutants(self) -> list[Mutant]:
        return [self.mutant(mid) for mid in self.mutant_ids()]

    def set_suspected_equivalent(self, mutant_id: str, value: bool) -> None:
        manifest = self.mutants_manifest()
        if mutant_id not in manifest["mutants"]:
            raise KeyError(f"no such mutant: {mutant_id}")
        manifest["mutants"][mutant_id]["suspected_equivalent"] = value
        fsutil.atomic_write_json(self.root / "mutants.json", manifest)

    # -- summaries -------------------------------------------------------------

    def summary_store(self) -> SummaryStore:
        return SummaryStore(self.root / "summaries")

    def summary_index(self) -> dict:
        path = self.root / "summaries.json"
        if not path.exists():
            return {}
        return read_json(path)

    def set_summaries(self, entries: dict[str, dict]) -> None:
        index = self.summary_index()
        index.update(entries)
        fsutil.atomic_write_json(self.root / "summaries.json", index)

    def summary_for(self, subject_ref: str) -> SummaryRecord | None:
        entry = self.summary_index().get(subject_ref)
        if entry is None:
            return None
        return self.summary_store().get(entry["cache_key"])

    def subject_code(self, subject_ref: str) -> str:
        """Source text of a program or mutant subject."""
        if "/" in subject_ref:
            return self.mutant(subject_ref).mutated_source
        return self.program(subject_ref).source_text

    # -- verdicts ----------------------------------------------------------------

    @property
    def verdicts_dir(self) -> Path:
        return self.root / "verdicts"

    def verdict_path(self, rater_id: str, mutant_id: str) -> Path:
        _check_name(rater_id, "rater")
        program_id, cell = self._mutant_rel(mutant_id)
        return self.verdicts_dir / rater_id / program_id / f"{cell}.json"

    def write_verdict(self, rater_id: str, mutant_id: str, payload: dict) -> None:
        fsutil.atomic_write_json(self.verdict_path(rater_id, mutant_id), payload)

    def read_verdict(self, rater_id: str, mutant_id: str) -> dict | None:
        path = self.verdict_path(rater_id, mutant_id)
        if not path.exists():
            return None
        return read_json(path)

    def verdicts_for(self, rater_id: str) -> dict[str, dict]:
        _check_name(rater_id, "rater")
        root = self.verdicts_dir / rater_id
        out: dict[str, dict] = {}
        if not root.is_dir():
            return out
        for file in sorted(root.glob("*/*.json")):
            mutant_id = f"{file.parent.name}/{file.stem}"
            out[mutant_id] = read_json(file)
        return out

    def raters(self) -> list[str]:
        if not self.verdicts_dir.is_dir():
            return []
        return sorted(
            p.name for p in self.verdicts_dir.iterdir()
            if p.is_dir() and p.name != RECONCILED_DIR
        )

    # -- phase machine ----------------------------------------------------------

    def advance(self, target: Phase) -> Phase:
        """Move the campaign forward; already-reached phases are a no-op."""
        current_i = PHASE_ORDER.index(self.phase)
        target_i = PHASE_ORDER.index(target)
        if target_i <= current_i:
            return self.phase
        for step in PHASE_ORDER[current_i + 1 : target_i + 1]:
            gaps = self.phase_gaps(step)
            if gaps:
                raise IntegrityGapError(step, gaps)
        self.phase = target
        self.save()
        return self.phase

    def require_phase(self, minimum: Phase) -> None:
        if PHASE_ORDER.index(self.phase) < PHASE_ORDER.index(minimum):
            raise PhaseError(
                f"campaign {self.id} is in phase {self.phase.value}, needs >= {minimum.value}"
            )

    def phase_gaps(self, step: Phase) -> list[str]:
        """Artifacts missing for one phase step ('' means complete)."""
        gaps: list[str] = []
        if step is Phase.INGESTED:
            if not self.programs_manifest()["accepted"]:
                gaps.append("no programs ingested")
        elif step is Phase.MUTATED:
            manifest = self.mutants_manifest()
            if not (self.root / "mutants.json").exists():
                gaps.append("no mutation plan recorded")
            else:
                planned = set(manifest.get("shortfalls", {}))
                for entry in self.programs_manifest()["accepted"]:
                    if entry["id"] not in planned:
                        gaps.append(f"no mutation plan for program {entry['id']}")
        elif step is Phase.SUMMARIZED:
            index = self.summary_index()
            subjects = [e["id"] for e in self.programs_manifest()["accepted"]]
            subjects += self.mutant_ids()
            for ref in subjects:
                entry = index.get(ref)
                if entry is None:
                    gaps.append(f"missing summary for {ref}")
                elif entry.get("failed"):
                    gaps.append(f"failed summary for {ref}")
        elif step is Phase.RECONCILED:
            reconciled = self.reconciled_labels()
            for mutant_id in self.mutant_ids():
                if mutant_id not in reconciled:
                    gaps.append(f"unreconciled mutant {mutant_id}")
        elif step is Phase.REPORTED:
            if not (self.root / "report" / "report.md").exists():
                gaps.append("report/report.md missing")
        return gaps

    # -- reconciliation ----------------------------------------------------------

    def write_reconciled(self, mutant_id: str, payload: dict) -> None:
        program_id, cell = self._mutant_rel(mutant_id)
        fsutil.atomic_write_json(
            self.verdicts_dir / RECONCILED_DIR / program_id / f"{cell}.json", payload
        )

    def reconciled_labels(self) -> dict[str, dict]:
        root = self.verdicts_dir / RECONCILED_DIR
        out: dict[str, dict] = {}
        if not root.is_dir():
            return out
        for file in sorted(root.glob("*/*.json")):
            out[f"{file.parent.name}/{file.stem}"] = read_json(file)
        return out

    # -- integrity ----------------------------------------------------------------

    def integrity_check(self) -> IntegrityReport:
        """Verify referential integrity, content digests, and phase artifacts."""
        report = IntegrityReport()
        try:
            programs = {p.id: p for p in self.programs()}
        except (OSError, KeyError, ValueError, SourceParseError) as exc:
            report.add("programs", "programs.json", f"unreadable programs: {exc}")
            return report

        for program in programs.values():
            try:
                parse_source(program.source_text, ref=program.id)
            except SourceParseError as exc:
                report.add("program-parse", program.id, str(exc))

        manifest = self.mutants_manifest()
        mutant_ids = set(manifest["mutants"])
        for mutant_id, data in sorted(manifest["mutants"].items()):
            program = programs.get(data["program_id"])
            if program is None:
                report.add("dangling-mutant", mutant_id, "references a missing program")
                continue
            program_id, cell = self._mutant_rel(mutant_id)
            path = self.mutants_dir / program_id / f"{cell}.py"
            if not path.exists():
                report.add("missing-mutant-file", mutant_id, str(path))
                continue
            stored = path.read_text(encoding="utf-8")
            try:
                mutant = Mutant.from_dict(data, stored)
                expected = _splice(SourceIndex(program.source_text), mutant.site,
                                   mutant.mutated_fragment)
            except Exception as exc:
                report.add("mutant-site", mutant_id, f"recorded site unusable: {exc}")
                continue
            if expected != stored:
                report.add("mutant-drift", mutant_id,
                           "stored mutant no longer matches its recorded edit")

        index = self.summary_index()
        summary_store = self.summary_store()
        for subject_ref, entry in sorted(index.items()):
            known = subject_ref in programs or subject_ref in mutant_ids
            if not known:
                report.add("dangling-summary", subject_ref, "subject does not exist")
                continue
            record = summary_store.get(entry["cache_key"])
            if record is None:
                report.add("missing-summary-record", subject_ref, entry["cache_key"])
                continue
            prefix = FIXED_PROMPT + "\n\n"
            if not record.prompt_text.startswith(prefix):
                report.add("summary-prompt", subject_ref, "prompt missing fixed instruction")
                continue
            code = record.prompt_text[len(prefix):]
            recomputed = cache_key(record.model_id, record.prompt_text, code)
            if recomputed != record.cache_key:
                report.add("cache-key-mismatch", subject_ref,
                           f"recomputed {recomputed[:12]}.. != stored {record.cache_key[:12]}..")
            stored_digest = read_json(summary_store.path_for(entry["cache_key"])).get(
                "record_digest"
            )
            if stored_digest != record_digest(record.cache_key, record.summary_text):
                report.add("cache-key-mismatch", subject_ref, "summary text digest mismatch")

        for rater in self.raters() + [RECONCILED_DIR]:
            root = self.verdicts_dir / rater
            if not root.is_dir():
                continue
            for file in sorted(root.glob("*/*.json")):
                mutant_id = f"{file.parent.name}/{file.stem}"
                if mutant_id not in mutant_ids:
                    report.add("dangling-verdict", f"{rater}:{mutant_id}",
                               "verdict for a missing mutant")
                elif rater != RECONCILED_DIR:
                    for ref in (mutant_id.split("/")[0], mutant_id):
                        if ref not in index:
                            report.add("verdict-without-summary", f"{rater}:{mutant_id}",
                                       f"missing summary for {ref}")

        current_i = PHASE_ORDER.index(self.phase)
        for step in PHASE_ORDER[: current_i + 1]:
            for gap in self.phase_gaps(step):
                report.add("phase-artifact", step.value, gap)
        return report
