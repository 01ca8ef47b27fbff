from __future__ import annotations

import json
from pathlib import Path

from mutsum import cli
from mutsum.store import CampaignStore, Phase

from conftest import DEMO_PROGRAMS, DEMO_SUMMARIES, DEMO_VERDICTS, GOLDEN


def run_cli(*argv) -> int:
    return cli.main([str(a) for a in argv])


def run_demo_pipeline(campaign: Path, through: str = "report") -> None:
    steps = [
        ("ingest", ["ingest", "--campaign", campaign, "--campaign-id", "demo",
                    "--corpus", DEMO_PROGRAMS, "--quota", "1", "--seed", "7"]),
        ("mutate", ["mutate", "--campaign", campaign]),
        ("summarize", ["summarize", "--campaign", campaign, "--replay", DEMO_SUMMARIES]),
        ("review-alice", ["review", "--campaign", campaign, "--rater", "alice",
                          "--script", DEMO_VERDICTS / "alice.json"]),
        ("review-bob", ["review", "--campaign", campaign, "--rater", "bob",
                        "--script", DEMO_VERDICTS / "bob.json"]),
    ]
    resolutions = json.loads((DEMO_VERDICTS / "resolutions.json").read_text())
    reconcile = ["reconcile", "--campaign", campaign, "--resolver", "carol",
                 "--note", "resolved by discussion"]
    for mutant_id, label in sorted(resolutions.items()):
        reconcile += ["--resolve", f"{mutant_id}={label}"]
    steps.append(("reconcile", reconcile))
    steps.append(("report", ["report", "--campaign", campaign]))
    for name, argv in steps:
        code = run_cli(*argv)
        assert code == 0, f"step {name} exited {code}"
        if name == through:
            return


def snapshot(campaign: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(campaign)): p.read_bytes()
        for p in sorted(campaign.rglob("*"))
        if p.is_file() and p.name != "campaign.lock"
    }


def test_full_demo_pipeline_matches_goldens(tmp_path):
    campaign = tmp_path / "camp"
    run_demo_pipeline(campaign)
    store = CampaignStore.load(campaign)
    assert store.phase == Phase.REPORTED
    golden_root = GOLDEN / "report"
    golden_files = sorted(p for p in golden_root.rglob("*") if p.is_file())
    assert golden_files, "golden report files are missing; run scripts/make_goldens.py"
    for golden_file in golden_files:
        rel = golden_file.relative_to(golden_root)
        produced = campaign / "report" / rel
        assert produced.exists(), f"report file {rel} was not produced"
        assert produced.read_bytes() == golden_file.read_bytes(), f"report file {rel} deviates"


def test_rerunning_every_stage_creates_zero_new_artifacts(tmp_path):
    campaign = tmp_path / "camp"
    run_demo_pipeline(campaign)
    before = snapshot(campaign)

    assert run_cli("ingest", "--campaign", campaign, "--campaign-id", "demo",
                   "--corpus", DEMO_PROGRAMS, "--quota", "1", "--seed", "7",
                   "--resume") == 0
    assert run_cli("mutate", "--campaign", campaign) == 0
    assert run_cli("summarize", "--campaign", campaign, "--replay", DEMO_SUMMARIES) == 0
    assert run_cli("review", "--campaign", campaign, "--rater", "alice",
                   "--script", DEMO_VERDICTS / "alice.json") == 0
    assert run_cli("reconcile", "--campaign", campaign, "--resolver", "carol") == 0
    assert run_cli("report", "--campaign", campaign) == 0

    after = snapshot(campaign)
    assert set(after) == set(before)
    changed = [name for name in before if before[name] != after[name]]
    assert changed == []


def test_mutate_twice_reports_zero_new(tmp_path, capsys):
    campaign = tmp_path / "camp"
    run_demo_pipeline(campaign, through="mutate")
    capsys.readouterr()
    assert run_cli("mutate", "--campaign", campaign) == 0
    payload = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert payload["new_mutants"] == 0
    assert payload["total_mutants"] == 27


def test_mutate_rejects_mismatched_seed(tmp_path, capsys):
    campaign = tmp_path / "camp"
    run_demo_pipeline(campaign, through="ingest")
    capsys.readouterr()
    code = run_cli("mutate", "--campaign", campaign, "--seed", "99")
    assert code == cli.EXIT_DATA
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "seed-mismatch"


def test_init_without_resume_fails(tmp_path, capsys):
    campaign = tmp_path / "camp"
    run_demo_pipeline(campaign, through="ingest")
    capsys.readouterr()
    code = run_cli("ingest", "--campaign", campaign, "--corpus", DEMO_PROGRAMS,
                   "--quota", "1", "--seed", "7")
    assert code == cli.EXIT_DATA
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "campaign-exists"


def test_phase_violation_exit_code(tmp_path, capsys):
    campaign = tmp_path / "camp"
    run_demo_pipeline(campaign, through="ingest")
    capsys.readouterr()
    code = run_cli("summarize", "--campaign", campaign, "--replay", DEMO_SUMMARIES)
    assert code == cli.EXIT_PHASE
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "phase-violation"


def test_replay_miss_lists_failures_not_crash(tmp_path, capsys):
    campaign = tmp_path / "camp"
    run_demo_pipeline(campaign, through="mutate")
    empty_fixture = tmp_path / "empty.json"
    empty_fixture.write_text("{}")
    capsys.readouterr()
    code = run_cli("summarize", "--campaign", campaign, "--replay", empty_fixture)
    assert code == cli.EXIT_DATA
    payload = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert len(payload["failures"]) == 30
    store = CampaignStore.load(campaign)
    assert store.phase == Phase.MUTATED


def test_verify_passes_on_complete_campaign(tmp_path, capsys):
    campaign = tmp_path / "camp"
    run_demo_pipeline(campaign)
    capsys.readouterr()
    assert run_cli("verify", "--campaign", campaign) == 0
    out = capsys.readouterr().out
    assert "ok integrity: no findings" in out
    assert "FAIL" not in out


def test_verify_flags_tampering(tmp_path, capsys):
    campaign = tmp_path / "camp"
    run_demo_pipeline(campaign)
    store = CampaignStore.load(campaign)
    key = next(iter(store.summary_index().values()))["cache_key"]
    path = store.summary_store().path_for(key)
    data = json.loads(path.read_text())
    data["summary_text"] += " (edited)"
    path.write_text(json.dumps(data))
    capsys.readouterr()
    assert run_cli("verify", "--campaign", campaign) == cli.EXIT_INTEGRITY
    assert "cache-key-mismatch" in capsys.readouterr().out


def test_credential_env_never_serialized_into_campaign(tmp_path):
    settings = tmp_path / "settings.json"
    settings.write_text(json.dumps({
        "provider": {
            "model_id": "live-model",
            "endpoint": "https://api.example.invalid/v1/chat",
            "credential_env": "SUPER_SECRET_VAR",
        }
    }))
    assert run_cli("ingest", "--campaign", tmp_path / "camp", "--corpus", DEMO_PROGRAMS,
                   "--quota", "1", "--seed", "7", "--settings", settings) == 0
    manifest = (tmp_path / "camp" / "campaign.json").read_text()
    assert "SUPER_SECRET_VAR" not in manifest
    assert "credential_env" not in manifest
    assert "live-model" in manifest


def test_jsonl_ingest_via_cli(tmp_path, capsys):
    corpus = tmp_path / "corpus.jsonl"
    rows = [
        {"task_id": f"t{i}", "solution": f"def f():\n    return {i}\n"} for i in range(4)
    ]
    corpus.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    code = run_cli("ingest", "--campaign", tmp_path / "camp", "--jsonl", corpus,
                   "--map", "task_id=id", "--map", "solution=source",
                   "--quota", "1", "--seed", "3")
    assert code == 0
    payload = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert payload["accepted"] == 4
    store = CampaignStore.load(tmp_path / "camp")
    assert [p.id for p in store.programs()] == ["t0", "t1", "t2", "t3"]
