#!/usr/bin/env python3
"""Freeze the demo campaign's report bundle as golden files.

Runs the full offline pipeline (replay fixtures, scripted verdicts) into
a scratch directory and copies report/ into tests/golden/report/.  The
end-to-end test then asserts byte equality.
"""

from __future__ import annotations

import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from mutsum import cli


def run(argv: list[str]) -> None:
    code = cli.main(argv)
    if code != 0:
        raise SystemExit(f"pipeline step failed ({code}): {' '.join(argv)}")


def main() -> None:
    resolutions = json.loads((ROOT / "demo" / "verdicts" / "resolutions.json").read_text())
    with tempfile.TemporaryDirectory() as tmp:
        campaign = str(Path(tmp) / "demo-campaign")
        run(["ingest", "--campaign", campaign, "--campaign-id", "demo",
             "--corpus", str(ROOT / "demo" / "programs"), "--quota", "1", "--seed", "7"])
        run(["mutate", "--campaign", campaign])
        run(["summarize", "--campaign", campaign, "--replay", str(ROOT / "demo" / "summaries")])
        run(["review", "--campaign", campaign, "--rater", "alice",
             "--script", str(ROOT / "demo" / "verdicts" / "alice.json")])
        run(["review", "--campaign", campaign, "--rater", "bob",
             "--script", str(ROOT / "demo" / "verdicts" / "bob.json")])
        reconcile = ["reconcile", "--campaign", campaign, "--resolver", "carol",
                     "--note", "resolved by discussion"]
        for mutant_id, label in sorted(resolutions.items()):
            reconcile += ["--resolve", f"{mutant_id}={label}"]
        run(reconcile)
        run(["report", "--campaign", campaign])

        golden = ROOT / "tests" / "golden" / "report"
        if golden.exists():
            shutil.rmtree(golden)
        shutil.copytree(Path(campaign) / "report", golden)
        files = sorted(p.relative_to(golden) for p in golden.rglob("*") if p.is_file())
        print(f"froze {len(files)} golden files under {golden}:")
        for f in files:
            print(f"  {f}")


if __name__ == "__main__":
    main()
