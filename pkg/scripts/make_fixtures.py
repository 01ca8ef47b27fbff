#!/usr/bin/env python3
"""Regenerate the committed test fixtures.

* tests/fixtures/corpus_verdicts.json — reconciled two-model verdict
  records over a 50-program corpus-style campaign (3 mutants each).
  Per-type positive counts are pinned so the comparison table is exact.
* demo/summaries/ — summary cache for the demo corpus, produced by the
  deterministic stub provider (any cache directory doubles as a replay
  fixture).

Both outputs are deterministic; run from the repository root.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from mutsum.corpus import ingest_directory
from mutsum.mutation.engine import generate_plan
from mutsum.summaries import ProviderConfig, SummaryStore, batch_summarize

MODELS = ["gpt-4-1106-preview", "gpt-5.2"]

# positives per mutation type (of 50 programs each)
POSITIVES = {
    "gpt-4-1106-preview": {"stmt": 23, "desc": 22, "val": 29},
    "gpt-5.2": {"stmt": 38, "desc": 44, "val": 46},
}
# positives flagged as explicitly recognized bugs, in record order
RECOGNIZED = {"gpt-4-1106-preview": 20, "gpt-5.2": 62}

BUCKETS = ["b", "m", "e"]
TYPES = ["stmt", "desc", "val"]


def make_corpus_verdicts() -> list[dict]:
    records = []
    for model in MODELS:
        recognized_budget = RECOGNIZED[model]
        for i in range(50):
            program_id = f"task_{i:03d}"
            for t_index, mutation_type in enumerate(TYPES):
                positive = i < POSITIVES[model][mutation_type]
                bucket = BUCKETS[(i + t_index) % 3]
                recognized = False
                if positive:
                    recognized = recognized_budget > 0
                    if recognized:
                        recognized_budget -= 1
                failure_mode = None
                if not positive:
                    failure_mode = "too_abstract" if (i + t_index) % 3 else "describes_original"
                records.append(
                    {
                        "mutant_id": f"{program_id}/{mutation_type}_{bucket}_1",
                        "program_id": program_id,
                        "model_id": model,
                        "mutation_type": mutation_type,
                        "bucket": bucket,
                        "complexity": "SF",
                        "loc": 18 + (i * 7) % 61,
                        "label": "positive" if positive else "negative",
                        "failure_mode": failure_mode,
                        "recognized_as_bug": recognized,
                    }
                )
    return records


class StubSummarizer:
    """Deterministic stand-in summaries keyed on the code text."""

    def complete(self, prompt_text: str):
        import hashlib

        code = prompt_text.split("\n\n", 1)[1] if "\n\n" in prompt_text else prompt_text
        digest = hashlib.sha256(code.encode("utf-8")).hexdigest()[:10]
        lines = [l for l in code.splitlines() if l.strip()]
        heads = [l.split("(")[0].replace("def ", "").replace("class ", "").strip()
                 for l in lines if l.startswith(("def ", "class "))]
        listing = ", ".join(heads) if heads else "a script"
        text = (
            f"This code defines {listing}. It spans {len(lines)} effective lines; "
            f"content fingerprint {digest}."
        )
        return text, None, 1, 0.0


def make_demo_summaries() -> int:
    from mutsum.mutation.engine import uniform_quota

    programs = ingest_directory(ROOT / "demo" / "programs").programs
    store = SummaryStore(ROOT / "demo" / "summaries")
    config = ProviderConfig(model_id="demo-model", endpoint="stub")
    subjects = []
    for program in programs:
        subjects.append((program.id, program.source_text))
        plan = generate_plan(program, uniform_quota(1), seed=7)
        subjects.extend((m.id, m.mutated_source) for m in plan.mutants)
    manifest = batch_summarize(subjects, config, store, provider=StubSummarizer())
    assert not manifest.failures
    return len(manifest.records)


def _demo_mutant_ids() -> list[str]:
    from mutsum.mutation.engine import uniform_quota

    programs = ingest_directory(ROOT / "demo" / "programs").programs
    ids = []
    for program in programs:
        plan = generate_plan(program, uniform_quota(1), seed=7)
        ids.extend(m.id for m in plan.mutants)
    return sorted(ids)


def make_demo_verdicts() -> None:
    """Scripted verdicts for two raters plus the intended resolutions.

    Labels are a deterministic function of the mutant id; the second
    rater disagrees on two pinned items so the reconcile path gets
    exercised end to end.
    """
    import hashlib

    def base_verdict(mutant_id: str) -> dict:
        h = int(hashlib.sha256(mutant_id.encode("utf-8")).hexdigest(), 16)
        if h % 4 == 0:
            return {
                "label": "negative",
                "failure_mode": "too_abstract" if (h >> 16) % 2 else "describes_original",
            }
        return {"label": "positive", "recognized_as_bug": h % 5 == 0}

    ids = _demo_mutant_ids()
    alice = {mid: base_verdict(mid) for mid in ids}
    bob = {mid: dict(v) for mid, v in alice.items()}
    disputed = [ids[0], ids[13]]
    resolutions = {}
    for mid in disputed:
        if bob[mid]["label"] == "positive":
            bob[mid] = {"label": "negative", "failure_mode": "too_abstract"}
        else:
            bob[mid] = {"label": "positive", "recognized_as_bug": False}
        resolutions[mid] = alice[mid]["label"]

    out_dir = ROOT / "demo" / "verdicts"
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "alice.json").write_text(json.dumps({"verdicts": alice}, indent=2) + "\n")
    (out_dir / "bob.json").write_text(json.dumps({"verdicts": bob}, indent=2) + "\n")
    (out_dir / "resolutions.json").write_text(json.dumps(resolutions, indent=2) + "\n")
    print(f"wrote demo/verdicts (2 raters x {len(ids)} verdicts, {len(disputed)} disputes)")


def main() -> None:
    fixtures = ROOT / "tests" / "fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)
    records = make_corpus_verdicts()
    out = fixtures / "corpus_verdicts.json"
    out.write_text(json.dumps(records, indent=2) + "\n")
    print(f"wrote {out} ({len(records)} records)")
    count = make_demo_summaries()
    print(f"wrote demo/summaries ({count} records)")
    make_demo_verdicts()


if __name__ == "__main__":
    main()
