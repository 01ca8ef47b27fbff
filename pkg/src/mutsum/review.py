"""Human comparison stage: review items, verdicts, agreement, reconciliation.

The verdict criterion is binary: a pair is positive when the mutation is
identifiable by comparing the two summaries, negative otherwise.
Negative verdicts may carry one failure-mode tag (the summary is too
abstract to encode the mutated logic, or it describes the original
behavior); positive verdicts may be tagged as having been recognized as
an outright bug by the model.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from hashlib import sha256

from mutsum import stats
from mutsum.diffs import unified_code_diff, word_diff
from mutsum.store import CampaignStore, Phase


class Label(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class FailureMode(str, Enum):
    TOO_ABSTRACT = "too_abstract"
    DESCRIBES_ORIGINAL = "describes_original"


class VerdictInvariantError(ValueError):
    """Tag combination violates the verdict invariants."""


class ReviewIntegrityError(RuntimeError):
    """An item is not servable (missing summaries or unknown mutant)."""


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class Verdict:
    mutant_id: str
    rater_id: str
    label: Label
    failure_mode: FailureMode | None = None
    recognized_as_bug: bool = False
    note: str = ""
    decided_at: str = ""

    def validate(self) -> None:
        if self.failure_mode is not None and self.label is not Label.NEGATIVE:
            raise VerdictInvariantError("failure_mode is only meaningful on negative verdicts")
        if self.recognized_as_bug and self.label is not Label.POSITIVE:
            raise VerdictInvariantError("recognized_as_bug marks positive verdicts only")

    def to_dict(self) -> dict:
        return {
            "mutant_id": self.mutant_id,
            "rater_id": self.rater_id,
            "label": self.label.value,
            "failure_mode": self.failure_mode.value if self.failure_mode else None,
            "recognized_as_bug": self.recognized_as_bug,
            "note": self.note,
            "decided_at": self.decided_at or _now(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Verdict":
        return cls(
            mutant_id=data["mutant_id"],
            rater_id=data["rater_id"],
            label=Label(data["label"]),
            failure_mode=FailureMode(data["failure_mode"]) if data.get("failure_mode") else None,
            recognized_as_bug=data.get("recognized_as_bug", False),
            note=data.get("note", ""),
            decided_at=data.get("decided_at", ""),
        )


@dataclass(frozen=True)
class ReviewItem:
    mutant_id: str
    original_code: str
    mutated_code: str
    code_diff: str | None
    original_summary: str
    mutated_summary: str
    summary_diff: list
    blind: bool

    def to_dict(self) -> dict:
        return {
            "mutant_id": self.mutant_id,
            "original_code": self.original_code,
            "mutated_code": self.mutated_code,
            "code_diff": self.code_diff,
            "original_summary": self.original_summary,
            "mutated_summary": self.mutated_summary,
            "summary_diff": self.summary_diff,
            "blind": self.blind,
        }


@dataclass(frozen=True)
class AgreementResult:
    n_items: int
    percent_agreement: float
    kappa: float
    confusion: list

    def to_dict(self) -> dict:
        return {
            "n_items": self.n_items,
            "percent_agreement": self.percent_agreement,
            "kappa": self.kappa,
            "confusion": self.confusion,
        }


@dataclass(frozen=True)
class ReconciledVerdict:
    mutant_id: str
    final_label: Label
    resolver_id: str
    note: str = ""
    source: str = "resolution"
    decided_at: str = ""

    def to_dict(self) -> dict:
        return {
            "mutant_id": self.mutant_id,
            "final_label": self.final_label.value,
            "resolver_id": self.resolver_id,
            "note": self.note,
            "source": self.source,
            "decided_at": self.decided_at or _now(),
        }


# ---------------------------------------------------------------------------
# Serving items
# ---------------------------------------------------------------------------

def review_order(store: CampaignStore, rater_id: str) -> list[str]:
    """Deterministic per-rater shuffle of all mutant ids.

    The order is the SHA-256 ranking of ``campaign|rater|mutant``; the
    scheme plus those inputs are the recorded seed, so any session can
    be replayed.
    """
    def rank(mutant_id: str) -> str:
        return sha256(f"{store.id}|{rater_id}|{mutant_id}".encode("utf-8")).hexdigest()

    return sorted(store.mutant_ids(), key=rank)


def build_item(store: CampaignStore, mutant_id: str, blind: bool = False) -> ReviewItem:
    mutant = store.mutant(mutant_id)
    program = store.program(mutant.program_id)
    original_summary = store.summary_for(program.id)
    mutated_summary = store.summary_for(mutant_id)
    if original_summary is None or mutated_summary is None:
        missing = program.id if original_summary is None else mutant_id
        raise ReviewIntegrityError(f"missing summary for {missing}")
    return ReviewItem(
        mutant_id=mutant_id,
        original_code=program.source_text,
        mutated_code=mutant.mutated_source,
        code_diff=None if blind else unified_code_diff(
            program.source_text, mutant.mutated_source,
            from_name=f"{program.id}.py", to_name=f"{mutant_id}.py",
        ),
        original_summary=original_summary.summary_text,
        mutated_summary=mutated_summary.summary_text,
        summary_diff=word_diff(original_summary.summary_text, mutated_summary.summary_text),
        blind=blind,
    )


def next_pending(store: CampaignStore, rater_id: str, blind: bool = False) -> ReviewItem | None:
    store.require_phase(Phase.SUMMARIZED)
    judged = set(store.verdicts_for(rater_id))
    for mutant_id in review_order(store, rater_id):
        if mutant_id not in judged:
            return build_item(store, mutant_id, blind=blind)
    return None


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------

def submit_verdict(store: CampaignStore, verdict: Verdict) -> dict:
    """Validate, persist, and echo the stored verdict payload.

    Resubmission by the same rater overwrites, keeping the previous
    payload under an audit key.
    """
    verdict.validate()
    store.require_phase(Phase.SUMMARIZED)
    try:
        mutant = store.mutant(verdict.mutant_id)
    except KeyError as exc:
        raise ReviewIntegrityError(str(exc)) from exc
    for ref in (mutant.program_id, verdict.mutant_id):
        if store.summary_for(ref) is None:
            raise ReviewIntegrityError(f"missing summary for {ref}")

    payload = verdict.to_dict()
    previous = store.read_verdict(verdict.rater_id, verdict.mutant_id)
    if previous is not None:
        previous.pop("previous", None)
        payload["previous"] = previous
        payload["resubmitted"] = True
    store.write_verdict(verdict.rater_id, verdict.mutant_id, payload)
    if store.phase is Phase.SUMMARIZED:
        store.advance(Phase.UNDER_REVIEW)
    return payload


# ---------------------------------------------------------------------------
# Agreement
# ---------------------------------------------------------------------------

def agreement(store: CampaignStore, rater_a: str, rater_b: str) -> AgreementResult:
    """Percent agreement and Cohen's kappa over the shared item set."""
    verdicts_a = store.verdicts_for(rater_a)
    verdicts_b = store.verdicts_for(rater_b)
    shared = sorted(set(verdicts_a) & set(verdicts_b))
    if not shared:
        raise ValueError(f"raters {rater_a} and {rater_b} share no judged items")
    confusion = [[0, 0], [0, 0]]
    for mutant_id in shared:
        row = 0 if verdicts_a[mutant_id]["label"] == Label.POSITIVE.value else 1
        col = 0 if verdicts_b[mutant_id]["label"] == Label.POSITIVE.value else 1
        confusion[row][col] += 1
    return AgreementResult(
        n_items=len(shared),
        percent_agreement=stats.percent_agreement(confusion),
        kappa=stats.cohens_kappa(confusion),
        confusion=confusion,
    )


# ---------------------------------------------------------------------------
# Reconciliation
# ---------------------------------------------------------------------------

def _labels_for(store: CampaignStore, mutant_id: str) -> dict[str, str]:
    labels = {}
    for rater in store.raters():
        verdict = store.read_verdict(rater, mutant_id)
        if verdict is not None:
            labels[rater] = verdict["label"]
    return labels


def reconcile(
    store: CampaignStore,
    mutant_id: str,
    final_label: Label | str,
    resolver_id: str,
    note: str = "",
    force: bool = False,
) -> ReconciledVerdict:
    """Record the final label for a disputed mutant.

    Requires an actual disagreement (or single-rater mode); agreements
    can only be overridden with ``force``, which keeps an audit note.
    """
    final_label = Label(final_label)
    store.mutant(mutant_id)  # existence check
    labels = _labels_for(store, mutant_id)
    if not labels:
        raise ReviewIntegrityError(f"no verdicts recorded for {mutant_id}")
    single_rater = len(store.raters()) == 1
    disagreement = len(set(labels.values())) > 1
    if not disagreement and not single_rater and not force:
        raise ValueError(
            f"{mutant_id} is not a disagreement; pass force to override the agreed label"
        )
    source = "single_rater" if single_rater else ("resolution" if disagreement else "forced")
    record = ReconciledVerdict(
        mutant_id=mutant_id,
        final_label=final_label,
        resolver_id=resolver_id,
        note=note,
        source=source,
    )
    store.write_reconciled(mutant_id, record.to_dict())
    return record


def auto_reconcile(store: CampaignStore, resolver_id: str = "auto") -> int:
    """Reconcile the undisputed bulk: agreements, or everything in
    single-rater campaigns.  Returns how many labels were newly recorded."""
    raters = store.raters()
    if not raters:
        return 0
    already = set(store.reconciled_labels())
    count = 0
    for mutant_id in store.mutant_ids():
        if mutant_id in already:
            continue
        labels = _labels_for(store, mutant_id)
        if not labels:
            continue
        if len(raters) == 1:
            source = "single_rater"
        elif len(labels) == len(raters) and len(set(labels.values())) == 1:
            source = "agreement"
        else:
            continue
        record = ReconciledVerdict(
            mutant_id=mutant_id,
            final_label=Label(next(iter(labels.values()))),
            resolver_id=resolver_id,
            note="",
            source=source,
        )
        store.write_reconciled(mutant_id, record.to_dict())
        count += 1
    return count


def disagreements(store: CampaignStore) -> list[str]:
    out = []
    for mutant_id in store.mutant_ids():
        labels = _labels_for(store, mutant_id)
        if len(set(labels.values())) > 1:
            out.append(mutant_id)
    return out


def progress(store: CampaignStore) -> dict:
    total = len(store.mutant_ids())
    return {
        "campaign": store.id,
        "phase": store.phase.value,
        "total_mutants": total,
        "raters": {rater: len(store.verdicts_for(rater)) for rater in store.raters()},
        "reconciled": len(store.reconciled_labels()),
        "disagreements": disagreements(store),
        "order_scheme": "sha256(campaign|rater|mutant_id) ascending",
    }
