"""Detection rates, contingency tests, rank tests, and the campaign report.

Every function here works over flat ``AnalysisRecord`` rows (one
reconciled verdict joined with its mutant's metadata), so the same code
serves live campaigns and bundled verdict fixtures.  Rates are exact
integer fractions rendered to one decimal place.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from mutsum import fsutil, stats
from mutsum.corpus import ComplexityCategory
from mutsum.mutation.types import LocationBucket, MutationType
from mutsum.review import FailureMode, Label
from mutsum.stats import StatResult
from mutsum.store import CampaignStore, Phase


class Dimension(str, Enum):
    COMPLEXITY = "complexity"
    MUTATION_TYPE = "mutation_type"
    LOCATION = "location"
    MODEL = "model"


_COMPLEXITY_ORDER = ["SF", "SC", "MC", "MT"]
_TYPE_ORDER = [MutationType.STATEMENT, MutationType.DECISION, MutationType.VALUE]
_BUCKET_ORDER = [LocationBucket.BEGINNING, LocationBucket.MIDDLE, LocationBucket.END]


@dataclass(frozen=True)
class AnalysisRecord:
    """One reconciled verdict joined with its mutant's metadata."""

    mutant_id: str
    program_id: str
    model_id: str
    mutation_type: MutationType
    bucket: LocationBucket
    complexity: ComplexityCategory
    loc: int
    label: Label
    failure_mode: FailureMode | None = None
    recognized_as_bug: bool = False

    @property
    def positive(self) -> bool:
        return self.label is Label.POSITIVE

    def to_dict(self) -> dict:
        return {
            "mutant_id": self.mutant_id,
            "program_id": self.program_id,
            "model_id": self.model_id,
            "mutation_type": self.mutation_type.value,
            "bucket": self.bucket.value,
            "complexity": self.complexity.value,
            "loc": self.loc,
            "label": self.label.value,
            "failure_mode": self.failure_mode.value if self.failure_mode else None,
            "recognized_as_bug": self.recognized_as_bug,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisRecord":
        return cls(
            mutant_id=data["mutant_id"],
            program_id=data["program_id"],
            model_id=data["model_id"],
            mutation_type=MutationType(data["mutation_type"]),
            bucket=LocationBucket(data["bucket"]),
            complexity=ComplexityCategory(data["complexity"]),
            loc=data["loc"],
            label=Label(data["label"]),
            failure_mode=FailureMode(data["failure_mode"]) if data.get("failure_mode") else None,
            recognized_as_bug=data.get("recognized_as_bug", False),
        )


def load_records(path: str | Path) -> list[AnalysisRecord]:
    return [AnalysisRecord.from_dict(entry) for entry in fsutil.read_json(Path(path))]


def records_from_store(store: CampaignStore) -> list[AnalysisRecord]:
    """Join reconciled labels with mutant and program metadata.

    Raises if any mutant is unreconciled: analytics reads only
    reconciled labels.
    """
    reconciled = store.reconciled_labels()
    missing = [m for m in store.mutant_ids() if m not in reconciled]
    if missing:
        raise ValueError(f"unreconciled mutants: {', '.join(missing[:5])}")
    programs = {p.id: p for p in store.programs()}
    model_id = store.config.provider.get("model_id", "unknown-model")
    verdict_tags: dict[str, dict] = {}
    for rater in store.raters():
        for mutant_id, payload in store.verdicts_for(rater).items():
            tags = verdict_tags.setdefault(mutant_id, {})
            # tags only count when the rater's label matches the final label
            tags.setdefault(payload["label"], payload)
    records = []
    for mutant in store.mutants():
        final = reconciled[mutant.id]
        label = Label(final["final_label"])
        tagged = verdict_tags.get(mutant.id, {}).get(label.value, {})
        program = programs[mutant.program_id]
        records.append(
            AnalysisRecord(
                mutant_id=mutant.id,
                program_id=mutant.program_id,
                model_id=model_id,
                mutation_type=mutant.mutation_type,
                bucket=mutant.bucket,
                complexity=program.complexity,
                loc=program.loc,
                label=label,
                failure_mode=(
                    FailureMode(tagged["failure_mode"]) if tagged.get("failure_mode") else None
                ),
                recognized_as_bug=bool(tagged.get("recognized_as_bug", False)),
            )
        )
    return records


# ---------------------------------------------------------------------------
# Rates
# ---------------------------------------------------------------------------

def format_rate(positives: int, total: int) -> str:
    return f"{100.0 * positives / total:.1f}%"


def format_pp(delta_pp: float) -> str:
    return f"{delta_pp:+.1f}pp"


@dataclass(frozen=True)
class GroupRate:
    group: str
    positives: int
    total: int

    @property
    def rate(self) -> float:
        return self.positives / self.total

    @property
    def percent(self) -> str:
        return format_rate(self.positives, self.total)

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "positives": self.positives,
            "total": self.total,
            "rate": self.rate,
            "percent": self.percent,
        }


@dataclass(frozen=True)
class RateBreakdown:
    dimension: Dimension
    groups: tuple

    def group(self, name: str) -> GroupRate:
        for entry in self.groups:
            if entry.group == name:
                return entry
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension.value,
            "groups": [g.to_dict() for g in self.groups],
        }


def _group_key(record: AnalysisRecord, dimension: Dimension) -> str:
    if dimension is Dimension.COMPLEXITY:
        return record.complexity.value
    if dimension is Dimension.MUTATION_TYPE:
        return record.mutation_type.display
    if dimension is Dimension.LOCATION:
        return record.bucket.display
    return record.model_id


def group_order(records: list[AnalysisRecord], dimension: Dimension) -> list[str]:
    if dimension is Dimension.COMPLEXITY:
        return _COMPLEXITY_ORDER
    if dimension is Dimension.MUTATION_TYPE:
        return [t.display for t in _TYPE_ORDER]
    if dimension is Dimension.LOCATION:
        return [b.display for b in _BUCKET_ORDER]
    return sorted({r.model_id for r in records})


def detection_rates(records: list[AnalysisRecord], dimension: Dimension) -> RateBreakdown:
    """Exact per-group positive rates, in pinned group order.

    Groups with no records are dropped (the remaining groups partition
    the verdict set).
    """
    if not records:
        raise ValueError("no records to analyze")
    counts: dict[str, list[int]] = {}
    for record in records:
        cell = counts.setdefault(_group_key(record, dimension), [0, 0])
        cell[0] += int(record.positive)
        cell[1] += 1
    groups = tuple(
        GroupRate(group=name, positives=counts[name][0], total=counts[name][1])
        for name in group_order(records, dimension)
        if name in counts
    )
    return RateBreakdown(dimension=dimension, groups=groups)


def overall_rate(records: list[AnalysisRecord]) -> GroupRate:
    positives = sum(r.positive for r in records)
    return GroupRate(group="Overall", positives=positives, total=len(records))


def contingency(records: list[AnalysisRecord], dimension: Dimension) -> tuple[list[str], list[list[int]]]:
    breakdown = detection_rates(records, dimension)
    labels = [g.group for g in breakdown.groups]
    table = [[g.positives, g.total - g.positives] for g in breakdown.groups]
    return labels, table


def chi_square_for(records: list[AnalysisRecord], dimension: Dimension) -> StatResult | None:
    """Pearson chi-square over the dimension's positive/negative table.

    None when the table is degenerate (fewer than 2 groups, or a zero
    column), which small demo campaigns legitimately produce.
    """
    _, table = contingency(records, dimension)
    if len(table) < 2:
        return None
    try:
        return stats.chi_square(table)
    except ValueError:
        return None


def loc_rank_test(records: list[AnalysisRecord]) -> StatResult | None:
    """Mann-Whitney U on program LOC: positives vs negatives."""
    positives = [float(r.loc) for r in records if r.positive]
    negatives = [float(r.loc) for r in records if not r.positive]
    if not positives or not negatives:
        return None
    return stats.mann_whitney_u(positives, negatives)


def failure_mode_tally(records: list[AnalysisRecord]) -> dict:
    negatives = [r for r in records if not r.positive]
    tally = {mode.value: 0 for mode in FailureMode}
    untagged = 0
    for record in negatives:
        if record.failure_mode is None:
            untagged += 1
        else:
            tally[record.failure_mode.value] += 1
    return {"negatives": len(negatives), "untagged": untagged, **tally}


def bug_recognition_share(records: list[AnalysisRecord], model_id: str | None = None) -> dict:
    pool = [r for r in records if r.positive and (model_id is None or r.model_id == model_id)]
    recognized = sum(r.recognized_as_bug for r in pool)
    return {
        "model_id": model_id,
        "positives": len(pool),
        "recognized": recognized,
        "share": recognized / len(pool) if pool else 0.0,
    }


def model_comparison(records: list[AnalysisRecord]) -> dict:
    """Per-type and overall rates per model, with an improvement column.

    Models are ordered by id ascending; the improvement column is the
    last model's rate minus the first's, in percentage points.
    """
    models = sorted({r.model_id for r in records})
    rows = []
    for mutation_type in _TYPE_ORDER:
        row: dict = {"group": mutation_type.display}
        for model in models:
            pool = [r for r in records if r.model_id == model and r.mutation_type is mutation_type]
            row[model] = GroupRate(mutation_type.display, sum(r.positive for r in pool), len(pool)) \
                if pool else None
        rows.append(row)
    row = {"group": "Overall"}
    for model in models:
        pool = [r for r in records if r.model_id == model]
        row[model] = GroupRate("Overall", sum(r.positive for r in pool), len(pool)) if pool else None
    rows.append(row)
    if len(models) >= 2:
        first, last = models[0], models[-1]
        for row in rows:
            a, b = row[first], row[last]
            row["improvement_pp"] = (
                round(100.0 * b.rate - 100.0 * a.rate, 10) if a and b else None
            )
    return {"models": models, "rows": rows}


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------

def _format_p(p: float) -> str:
    return "<0.001" if p < 0.001 else f"{p:.3f}"


def _stat_row(name: str, result: StatResult, effect_name: str) -> str:
    df = "" if result.degrees_of_freedom is None else str(result.degrees_of_freedom)
    effect = "" if result.effect_size is None else f"{result.effect_size:.3f}"
    return (
        f"| {name} | {result.statistic:.2f} | {df} | {_format_p(result.p_value)} "
        f"| {effect_name}: {effect} |"
    )


def _csv_text(header: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _rates_csv(breakdown: RateBreakdown) -> str:
    rows = [[g.group, g.positives, g.total, g.percent] for g in breakdown.groups]
    return _csv_text(["group", "positives", "total", "rate"], rows)


def _figure_json(breakdown: RateBreakdown) -> dict:
    return {
        "dimension": breakdown.dimension.value,
        "groups": [g.group for g in breakdown.groups],
        "positive": [g.positives for g in breakdown.groups],
        "negative": [g.total - g.positives for g in breakdown.groups],
    }


def emit_report(store: CampaignStore, records: list[AnalysisRecord] | None = None) -> dict:
    """Write report/report.md plus CSV tables and figure-data JSON.

    Requires the Reconciled phase.  Output is deliberately free of
    timestamps so that re-running a finished campaign is byte-stable.
    """
    store.require_phase(Phase.RECONCILED)
    if records is None:
        records = records_from_store(store)
    report_dir = store.root / "report"
    tables = report_dir / "tables"
    figures = report_dir / "figures"
    written: dict[str, Path] = {}

    md: list[str] = []
    md.append(f"# Campaign report: {store.id}")
    md.append("")
    md.append("## Overview")
    md.append("")
    md.append(f"- programs: {len(store.programs_manifest()['accepted'])}")
    md.append(f"- mutants (reconciled verdicts): {len(records)}")
    md.append(f"- planned mutants: {store.planned_mutants}")
    md.append(f"- seed: {store.config.seed}")
    overall = overall_rate(records)
    md.append(f"- overall detection rate: {overall.positives}/{overall.total} ({overall.percent})")
    md.append("")

    md.append("## Detection rates")
    dims = [Dimension.COMPLEXITY, Dimension.MUTATION_TYPE, Dimension.LOCATION]
    models = sorted({r.model_id for r in records})
    if len(models) > 1:
        dims.append(Dimension.MODEL)
    for dimension in dims:
        breakdown = detection_rates(records, dimension)
        md.append("")
        md.append(f"### By {dimension.value.replace('_', ' ')}")
        md.append("")
        md.append("| group | positives | total | rate |")
        md.append("|---|---|---|---|")
        for g in breakdown.groups:
            md.append(f"| {g.group} | {g.positives} | {g.total} | {g.percent} |")
        table_path = tables / f"rates_{dimension.value}.csv"
        fsutil.atomic_write_text(table_path, _rates_csv(breakdown))
        written[f"table_{dimension.value}"] = table_path
        figure_path = figures / f"{dimension.value}.json"
        fsutil.atomic_write_json(figure_path, _figure_json(breakdown))
        written[f"figure_{dimension.value}"] = figure_path

    md.append("")
    md.append("## Statistical tests")
    md.append("")
    md.append("| test | statistic | df | p | effect size |")
    md.append("|---|---|---|---|---|")
    for dimension in dims:
        result = chi_square_for(records, dimension)
        if result is not None:
            md.append(_stat_row(f"chi-square: {dimension.value}", result, "Cramer's V"))
    rank = loc_rank_test(records)
    if rank is not None:
        md.append(
            f"| Mann-Whitney U: LOC (positive vs negative) | {rank.statistic:.1f} | "
            f"| {_format_p(rank.p_value)} | rank-biserial: {rank.effect_size:.3f} |"
        )

    if len(models) > 1:
        comparison = model_comparison(records)
        md.append("")
        md.append("## Model comparison")
        md.append("")
        header = "| Mutation type | " + " | ".join(comparison["models"])
        if "improvement_pp" in comparison["rows"][0]:
            header += " | Improvement |"
        else:
            header += " |"
        md.append(header)
        md.append("|" + "---|" * (len(comparison["models"]) + 2))
        csv_rows = []
        for row in comparison["rows"]:
            cells = [row["group"]]
            for model in comparison["models"]:
                cells.append(row[model].percent if row[model] else "n/a")
            if row.get("improvement_pp") is not None:
                cells.append(format_pp(row["improvement_pp"]))
            md.append("| " + " | ".join(cells) + " |")
            csv_rows.append(cells)
        comparison_path = tables / "model_comparison.csv"
        fsutil.atomic_write_text(
            comparison_path,
            _csv_text(
                ["mutation_type"] + comparison["models"] + ["improvement"], csv_rows
            ),
        )
        written["table_model_comparison"] = comparison_path

    md.append("")
    md.append("## Failure modes (negative verdicts)")
    md.append("")
    tally = failure_mode_tally(records)
    if tally["negatives"] == 0:
        md.append("No negative verdicts in this campaign.")
    else:
        md.append("| tag | count |")
        md.append("|---|---|")
        md.append(f"| too abstract | {tally['too_abstract']} |")
        md.append(f"| describes original | {tally['describes_original']} |")
        md.append(f"| untagged | {tally['untagged']} |")

    md.append("")
    md.append("## Bug recognition among positives")
    md.append("")
    md.append("| model | recognized | positives | share |")
    md.append("|---|---|---|---|")
    for model in models:
        share = bug_recognition_share(records, model)
        pct = format_rate(share["recognized"], share["positives"]) if share["positives"] else "n/a"
        md.append(f"| {model} | {share['recognized']} | {share['positives']} | {pct} |")
    md.append("")

    report_path = report_dir / "report.md"
    fsutil.atomic_write_text(report_path, "\n".join(md))
    written["report"] = report_path
    return written
