"""Terminal review mode: the same items as the web UI, rendered as text.

Interactive keys: p / n for the verdict, then optional tags
(1 = too abstract, 2 = describes original, b = recognized as bug).
A script file replaces the prompts for unattended runs: JSON mapping
mutant id to verdict fields.
"""

from __future__ import annotations

from pathlib import Path

from mutsum import review
from mutsum.fsutil import read_json
from mutsum.review import FailureMode, Label, ReviewItem, Verdict
from mutsum.store import CampaignStore

_RULE = "-" * 72


def render_item(item: ReviewItem, position: int, total: int) -> str:
    parts = [
        _RULE,
        f"[{position}/{total}] mutant {item.mutant_id}" + ("  (blind)" if item.blind else ""),
        _RULE,
    ]
    if item.code_diff:
        parts.append("code diff:")
        parts.append(item.code_diff.rstrip("\n"))
        parts.append("")
    parts.append("original summary:")
    parts.append(f"  {item.original_summary}")
    parts.append("")
    parts.append("mutated summary:")
    parts.append(f"  {item.mutated_summary}")
    changed = [seg for seg in item.summary_diff if seg["op"] != "equal"]
    if changed:
        rendered = ", ".join(
            f"{seg['a']!r} -> {seg['b']!r}" for seg in changed if seg["a"] or seg["b"]
        )
        parts.append("")
        parts.append(f"summary word diff: {rendered}")
    return "\n".join(parts)


def _prompt_verdict(item: ReviewItem, rater_id: str, ask) -> Verdict:
    while True:
        answer = ask("verdict [p]ositive / [n]egative / [q]uit: ").strip().lower()
        if answer in ("q", "quit"):
            raise KeyboardInterrupt
        if answer in ("p", "positive"):
            bug = ask("recognized as bug? [y/N]: ").strip().lower() in ("y", "yes")
            return Verdict(
                mutant_id=item.mutant_id,
                rater_id=rater_id,
                label=Label.POSITIVE,
                recognized_as_bug=bug,
            )
        if answer in ("n", "negative"):
            tag = ask("failure mode: [1] too abstract [2] describes original [enter none]: ").strip()
            mode = {"1": FailureMode.TOO_ABSTRACT, "2": FailureMode.DESCRIBES_ORIGINAL}.get(tag)
            return Verdict(
                mutant_id=item.mutant_id,
                rater_id=rater_id,
                label=Label.NEGATIVE,
                failure_mode=mode,
            )


def load_script(path: str | Path) -> dict[str, dict]:
    data = read_json(Path(path))
    if isinstance(data, dict) and "verdicts" in data:
        data = data["verdicts"]
    if not isinstance(data, dict):
        raise ValueError("verdict script must map mutant ids to verdict fields")
    return data


def scripted_verdict(mutant_id: str, rater_id: str, entry: dict) -> Verdict:
    return Verdict(
        mutant_id=mutant_id,
        rater_id=rater_id,
        label=Label(entry["label"]),
        failure_mode=FailureMode(entry["failure_mode"]) if entry.get("failure_mode") else None,
        recognized_as_bug=entry.get("recognized_as_bug", False),
        note=entry.get("note", ""),
    )


def run_review(
    store: CampaignStore,
    rater_id: str,
    blind: bool = False,
    script_path: str | Path | None = None,
    out=print,
    ask=input,
) -> int:
    """Serve pending items until the rater is done; returns verdicts cast."""
    script = load_script(script_path) if script_path else None
    total = len(store.mutant_ids())
    cast = 0
    while True:
        item = review.next_pending(store, rater_id, blind=blind)
        if item is None:
            out(f"review complete: all {total} items judged by {rater_id}")
            return cast
        judged = len(store.verdicts_for(rater_id))
        if script is not None:
            entry = script.get(item.mutant_id)
            if entry is None:
                out(f"script has no verdict for {item.mutant_id}; stopping")
                return cast
            verdict = scripted_verdict(item.mutant_id, rater_id, entry)
        else:
            out(render_item(item, judged + 1, total))
            try:
                verdict = _prompt_verdict(item, rater_id, ask)
            except KeyboardInterrupt:
                out(f"paused after {cast} verdicts; resume any time")
                return cast
        review.submit_verdict(store, verdict)
        cast += 1
