"""Behavioral smoke check: run original and mutant under identical inputs."""

from __future__ import annotations

import dataclasses
import subprocess
import sys
import tempfile
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from mutsum.corpus import Program
from mutsum.mutation.types import Mutant


class SmokeOutcome(str, Enum):
    DIVERGED = "diverged"
    NO_DIFFERENCE_OBSERVED = "no_difference_observed"
    NOT_RUN = "not_run"


@dataclass(frozen=True)
class RunnerConfig:
    """Sandboxed execution of a subject file: ``python subject.py <args>``."""

    args: tuple[str, ...] = ()
    stdin_text: str = ""
    timeout_s: float = 10.0
    python: str = sys.executable

    def to_dict(self) -> dict:
        return {
            "args": list(self.args),
            "stdin_text": self.stdin_text,
            "timeout_s": self.timeout_s,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunnerConfig":
        return cls(
            args=tuple(data.get("args", ())),
            stdin_text=data.get("stdin_text", ""),
            timeout_s=data.get("timeout_s", 10.0),
        )


def observe(source_text: str, runner: RunnerConfig) -> tuple:
    """(status, stdout, stderr) of one sandboxed run; hangs become 'timeout'."""
    with tempfile.TemporaryDirectory(prefix="mutsum-smoke-") as tmp:
        subject = Path(tmp) / "subject.py"
        subject.write_text(source_text, encoding="utf-8")
        try:
            proc = subprocess.run(
                [runner.python, str(subject), *runner.args],
                input=runner.stdin_text,
                capture_output=True,
                text=True,
                timeout=runner.timeout_s,
                cwd=tmp,
            )
        except subprocess.TimeoutExpired:
            return ("timeout", "", "")
        return (proc.returncode, proc.stdout, proc.stderr)


def smoke_check(program: Program, mutant: Mutant, runner: RunnerConfig | None) -> SmokeOutcome:
    """Compare one run of the original against one run of the mutant.

    Any difference in exit status or captured output counts as divergence;
    a mutant hang is divergence whenever the original completed.  Equal
    observations mark the mutant as suspected-equivalent (the caller owns
    persisting that flag).
    """
    if runner is None:
        return SmokeOutcome.NOT_RUN
    original = observe(program.source_text, runner)
    mutated = observe(mutant.mutated_source, runner)
    if original != mutated:
        return SmokeOutcome.DIVERGED
    return SmokeOutcome.NO_DIFFERENCE_OBSERVED


def flag_if_equivalent(mutant: Mutant, outcome: SmokeOutcome) -> Mutant:
    if outcome is SmokeOutcome.NO_DIFFERENCE_OBSERVED and not mutant.suspected_equivalent:
        return dataclasses.replace(mutant, suspected_equivalent=True)
    return mutant
