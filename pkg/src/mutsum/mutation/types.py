"""Domain types for single-edit source mutation."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class MutationType(str, Enum):
    """What aspect of the program an edit targets.

    The short codes double as archive-name components
    (``{type}_{bucket}_{n}``), so ``DECISION`` is spelled ``desc``.
    """

    STATEMENT = "stmt"
    VALUE = "val"
    DECISION = "desc"

    @property
    def display(self) -> str:
        return {"stmt": "Statement", "val": "Value", "desc": "Decision"}[self.value]


class LocationBucket(str, Enum):
    """Which third of the program's effective lines holds the edit."""

    BEGINNING = "b"
    MIDDLE = "m"
    END = "e"

    @property
    def display(self) -> str:
        return {"b": "Beginning", "m": "Middle", "e": "End"}[self.value]


@dataclass(frozen=True)
class MutationSite:
    """One location where a registered operator can rewrite the source.

    ``col_start``/``col_end`` are 0-based column offsets; ``col_end`` is
    exclusive and measured on ``end_line``.  ``end_line`` equals ``line``
    for every operator except the adjacent-statement swap, whose original
    fragment spans two physical lines.
    """

    operator_id: str
    line: int
    col_start: int
    col_end: int
    original_fragment: str
    end_line: int

    def to_dict(self) -> dict:
        return {
            "operator_id": self.operator_id,
            "line": self.line,
            "col_start": self.col_start,
            "col_end": self.col_end,
            "end_line": self.end_line,
            "original_fragment": self.original_fragment,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MutationSite":
        return cls(
            operator_id=data["operator_id"],
            line=data["line"],
            col_start=data["col_start"],
            col_end=data["col_end"],
            original_fragment=data["original_fragment"],
            end_line=data.get("end_line", data["line"]),
        )

    def sort_key(self) -> tuple:
        return (self.line, self.col_start, self.end_line, self.col_end, self.operator_id)


@dataclass(frozen=True)
class Mutant:
    """One behavioral edit: the site, the replacement, the full result."""

    id: str
    program_id: str
    mutation_type: MutationType
    bucket: LocationBucket
    site: MutationSite
    mutated_fragment: str
    mutated_source: str
    suspected_equivalent: bool = False
    seed: int = 0

    @property
    def cell_name(self) -> str:
        """Archive basename without the counter, e.g. ``val_b``."""
        return f"{self.mutation_type.value}_{self.bucket.value}"

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "program_id": self.program_id,
            "mutation_type": self.mutation_type.value,
            "bucket": self.bucket.value,
            "site": self.site.to_dict(),
            "mutated_fragment": self.mutated_fragment,
            "suspected_equivalent": self.suspected_equivalent,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict, mutated_source: str) -> "Mutant":
        return cls(
            id=data["id"],
            program_id=data["program_id"],
            mutation_type=MutationType(data["mutation_type"]),
            bucket=LocationBucket(data["bucket"]),
            site=MutationSite.from_dict(data["site"]),
            mutated_fragment=data["mutated_fragment"],
            mutated_source=mutated_source,
            suspected_equivalent=data.get("suspected_equivalent", False),
            seed=data.get("seed", 0),
        )
