"""Site enumeration, single-edit application, and deterministic plans."""

from __future__ import annotations

import hashlib
from bisect import bisect_right
from dataclasses import dataclass, field

from mutsum.corpus import Program, SourceParseError, effective_lines, parse_source
from mutsum.mutation.operators import OPERATORS, SourceIndex, collect_pairs
from mutsum.mutation.types import LocationBucket, Mutant, MutationSite, MutationType

_BUCKETS = [LocationBucket.BEGINNING, LocationBucket.MIDDLE, LocationBucket.END]


class OperatorApplyError(ValueError):
    """The requested fragment is not producible at the given site."""


def _index_for(program: Program) -> SourceIndex:
    try:
        return SourceIndex(program.source_text)
    except SyntaxError as exc:
        raise SourceParseError(f"{program.id}: {exc.msg} (line {exc.lineno})") from exc


def enumerate_sites(
    program: Program,
    mutation_type: MutationType,
    include_string_literals: bool = False,
) -> list[MutationSite]:
    """Applicable sites of one mutation type, in document order."""
    index = _index_for(program)
    return [site for site, _ in collect_pairs(index, mutation_type, include_string_literals)]


def site_candidates(
    program: Program,
    site: MutationSite,
    include_string_literals: bool = False,
) -> list[str]:
    """Fragments a registered operator may write at this exact site."""
    operator = OPERATORS.get(site.operator_id)
    if operator is None:
        return []
    index = _index_for(program)
    for candidate_site, fragments in collect_pairs(
        index, operator.mutation_type, include_string_literals or operator.opt_in
    ):
        if candidate_site == site:
            return fragments
    return []


def bucket_of(site: MutationSite, program: Program) -> LocationBucket:
    """Which third of the program's effective lines holds the site.

    Thirds run over effective (non-blank, non-comment) line indices with
    floor-division boundaries.
    """
    lines = effective_lines(program.source_text)
    if not lines:
        raise ValueError(f"{program.id}: no effective lines")
    total = len(program.source_text.splitlines())
    if site.line < 1 or site.line > total:
        raise ValueError(f"line {site.line} outside program span 1..{total}")
    position = bisect_right(lines, site.line) - 1
    if position < 0:
        position = 0
    return _BUCKETS[min(position * 3 // len(lines), 2)]


def _splice(index: SourceIndex, site: MutationSite, fragment: str) -> str:
    start = index.abs_offset(site.line, site.col_start)
    end = index.abs_offset(site.end_line, site.col_end)
    if index.source[start:end] != site.original_fragment:
        raise OperatorApplyError(
            f"site text mismatch at line {site.line}: expected {site.original_fragment!r}"
        )
    return index.source[:start] + fragment + index.source[end:]


def changed_line_window(original: str, mutated: str) -> tuple[int, int, int, int] | None:
    """Changed window after maximal common prefix/suffix trim, or None if equal.

    Returns 1-based inclusive ranges ``(a_first, a_last, b_first, b_last)``.
    A pure insertion leaves the original window empty (``a_last ==
    a_first - 1``); same for deletions on the mutated side.  Because the
    trim is maximal, a single contiguous edit is exactly an edit whose
    window sits inside the declared site span.
    """
    a = original.splitlines()
    b = mutated.splitlines()
    if a == b:
        return None
    prefix = 0
    while prefix < len(a) and prefix < len(b) and a[prefix] == b[prefix]:
        prefix += 1
    suffix = 0
    while (
        suffix < len(a) - prefix
        and suffix < len(b) - prefix
        and a[len(a) - 1 - suffix] == b[len(b) - 1 - suffix]
    ):
        suffix += 1
    return (prefix + 1, len(a) - suffix, prefix + 1, len(b) - suffix)


def apply(
    program: Program,
    site: MutationSite,
    mutated_fragment: str,
    mutant_id: str | None = None,
    seed: int = 0,
) -> Mutant:
    """Apply one operator fragment at a site; all mutant invariants checked."""
    operator = OPERATORS.get(site.operator_id)
    if operator is None:
        raise OperatorApplyError(f"unknown operator {site.operator_id!r}")
    candidates = site_candidates(program, site)
    if mutated_fragment not in candidates:
        raise OperatorApplyError(
            f"fragment {mutated_fragment!r} not producible by {site.operator_id} "
            f"at line {site.line} (legal: {candidates!r})"
        )
    index = _index_for(program)
    mutated_source = _splice(index, site, mutated_fragment)
    if mutated_source == program.source_text:
        raise OperatorApplyError("edit produced no textual change")
    try:
        parse_source(mutated_source, ref=f"{program.id} mutant")
    except SourceParseError as exc:
        raise OperatorApplyError(f"mutated source does not parse: {exc}") from exc
    window = changed_line_window(program.source_text, mutated_source)
    assert window is not None
    a_first, a_last, b_first, b_last = window
    a_span = a_last - a_first + 1
    b_span = b_last - b_first + 1
    if a_span > site.end_line - site.line + 1:
        raise OperatorApplyError(
            f"edit changed {a_span} original lines but the site spans "
            f"{site.end_line - site.line + 1} (lines {a_first}..{a_last})"
        )
    if b_span > mutated_fragment.count("\n") + 1:
        raise OperatorApplyError(
            f"edit changed {b_span} mutated lines but the fragment spans "
            f"{mutated_fragment.count(chr(10)) + 1}"
        )
    bucket = bucket_of(site, program)
    return Mutant(
        id=mutant_id or f"{program.id}/{operator.mutation_type.value}_{bucket.value}_adhoc",
        program_id=program.id,
        mutation_type=operator.mutation_type,
        bucket=bucket,
        site=site,
        mutated_fragment=mutated_fragment,
        mutated_source=mutated_source,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Plans
# ---------------------------------------------------------------------------

Cell = tuple[MutationType, LocationBucket]


@dataclass
class PlanResult:
    """Mutants selected for each (type, bucket) cell, plus unmet quota."""

    mutants: list[Mutant] = field(default_factory=list)
    shortfalls: dict[Cell, int] = field(default_factory=dict)

    def shortfall_manifest(self) -> dict[str, int]:
        return {
            f"{cell[0].value}_{cell[1].value}": count
            for cell, count in sorted(
                self.shortfalls.items(), key=lambda item: (item[0][0].value, item[0][1].value)
            )
        }


def uniform_quota(per_cell: int) -> dict[Cell, int]:
    return {
        (mutation_type, bucket): per_cell
        for mutation_type in MutationType
        for bucket in LocationBucket
    }


def _rank(seed: int, program_id: str, cell: Cell, site: MutationSite, fragment: str) -> str:
    key = "|".join(
        [
            str(seed),
            program_id,
            cell[0].value,
            cell[1].value,
            str(site.line),
            str(site.col_start),
            site.operator_id,
            fragment,
        ]
    )
    return hashlib.sha256(key.encode("utf-8")).hexdigest()


def generate_plan(
    program: Program,
    quota: dict[Cell, int] | int,
    seed: int,
    include_string_literals: bool = False,
) -> PlanResult:
    """Select up to quota[cell] distinct mutants per cell, deterministically.

    Selection order is a SHA-256 ranking keyed on (seed, program id, cell,
    site, fragment): a stateless, cross-platform stand-in for a seeded
    uniform shuffle.  A first pass prefers distinct sites; a second pass
    fills remaining quota with alternative fragments.  Unfillable quota is
    reported as a shortfall, never padded from other cells.
    """
    if isinstance(quota, int):
        quota = uniform_quota(quota)
    index = _index_for(program)

    cells: dict[Cell, list[tuple[str, MutationSite, str]]] = {}
    for mutation_type in MutationType:
        for site, fragments in collect_pairs(index, mutation_type, include_string_literals):
            bucket = bucket_of(site, program)
            cell = (mutation_type, bucket)
            for fragment in fragments:
                cells.setdefault(cell, []).append(
                    (_rank(seed, program.id, cell, site, fragment), site, fragment)
                )

    result = PlanResult()
    taken_sources: set[str] = set()
    for cell in sorted(quota, key=lambda c: (c[0].value, c[1].value)):
        want = quota[cell]
        if want <= 0:
            continue
        ranked = sorted(cells.get(cell, []), key=lambda item: item[0])
        chosen: list[tuple[MutationSite, str]] = []
        used_sites: set[tuple] = set()

        def try_take(site: MutationSite, fragment: str) -> bool:
            try:
                mutated = _splice(index, site, fragment)
            except OperatorApplyError:
                return False
            if mutated in taken_sources:
                return False
            taken_sources.add(mutated)
            chosen.append((site, fragment))
            used_sites.add(site.sort_key())
            return True

        for _, site, fragment in ranked:
            if len(chosen) >= want:
                break
            if site.sort_key() in used_sites:
                continue
            try_take(site, fragment)
        if len(chosen) < want:
            for _, site, fragment in ranked:
                if len(chosen) >= want:
                    break
                if (site, fragment) in chosen:
                    continue
                try_take(site, fragment)

        mutation_type, bucket = cell
        for n, (site, fragment) in enumerate(chosen, start=1):
            mutant_id = f"{program.id}/{mutation_type.value}_{bucket.value}_{n}"
            result.mutants.append(
                apply(program, site, fragment, mutant_id=mutant_id, seed=seed)
            )
        if len(chosen) < want:
            result.shortfalls[cell] = want - len(chosen)
    return result
