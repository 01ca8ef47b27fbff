"""Single entry point: the pipeline stages as subcommands.

Exit codes: 0 success, 2 usage, 3 phase violation, 4 integrity failure,
5 transport failure, 6 bad data or configuration, 7 writer lock held.
Failures also print one machine-readable JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from mutsum import analytics, review, terminal
from mutsum.corpus import IngestError, Origin, SourceParseError, ingest_directory, ingest_jsonl
from mutsum.fsutil import LockHeldError, read_json
from mutsum.mutation.engine import generate_plan, uniform_quota
from mutsum.mutation.smoke import RunnerConfig, SmokeOutcome, smoke_check
from mutsum.review import Label
from mutsum.store import (
    CampaignConfig,
    CampaignExistsError,
    CampaignStore,
    IntegrityGapError,
    Phase,
    PhaseError,
)
from mutsum.summaries import (
    ProviderConfig,
    ReplayMissError,
    TransportError,
    batch_summarize,
    replay_provider,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PHASE = 3
EXIT_INTEGRITY = 4
EXIT_TRANSPORT = 5
EXIT_DATA = 6
EXIT_LOCK = 7


class CliError(RuntimeError):
    def __init__(self, code: int, name: str, detail: str):
        super().__init__(detail)
        self.code = code
        self.name = name


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def _load_settings(path: str | None) -> dict:
    if not path:
        return {}
    try:
        return read_json(Path(path))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_DATA, "bad-settings", f"cannot read settings {path}: {exc}")


def _provider_config(store: CampaignStore, settings: dict, replay: bool) -> ProviderConfig:
    merged = dict(store.config.provider)
    merged.update(settings.get("provider", {}))
    if replay and not merged.get("endpoint"):
        merged["endpoint"] = "replay"
    if not merged.get("endpoint"):
        raise CliError(
            EXIT_DATA, "no-endpoint",
            "no provider endpoint configured; pass --settings or --replay",
        )
    return ProviderConfig.from_dict(merged)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_ingest(args) -> int:
    settings = _load_settings(args.settings)
    provider = dict(settings.get("provider", {}))
    provider.pop("credential_env", None)  # snapshots must stay shareable
    provider.setdefault("model_id", args.model)
    config = CampaignConfig(
        quota=uniform_quota(args.quota),
        seed=args.seed,
        provider=provider,
        smoke=settings.get("smoke"),
    )
    store = CampaignStore.init(
        args.campaign, args.campaign_id or Path(args.campaign).name, config, resume=args.resume
    )
    with store.writer_lock():
        if args.jsonl:
            field_map = dict(pair.split("=", 1) for pair in args.map or [])
            if not field_map:
                raise CliError(EXIT_USAGE, "missing-map", "--jsonl requires --map entries")
            result = ingest_jsonl(args.jsonl, field_map)
        else:
            result = ingest_directory(args.corpus, origin=Origin(args.origin))
        store.attach_programs(result)
    _emit(
        {
            "campaign": store.id,
            "phase": store.phase.value,
            "accepted": len(result.programs),
            "rejected": [r.to_dict() for r in result.rejected],
            "planned_mutants": store.planned_mutants,
        }
    )
    return EXIT_OK


def cmd_mutate(args) -> int:
    store = CampaignStore.load(args.campaign)
    if args.quota is not None and uniform_quota(args.quota) != store.config.quota:
        raise CliError(
            EXIT_DATA, "quota-mismatch",
            f"campaign recorded a different quota; refusing to deviate",
        )
    if args.seed is not None and args.seed != store.config.seed:
        raise CliError(
            EXIT_DATA, "seed-mismatch",
            f"campaign recorded seed {store.config.seed}; refusing to deviate",
        )
    runner = None
    if args.smoke:
        runner = RunnerConfig.from_dict(store.config.smoke or {})
    new_total = 0
    shortfalls: dict[str, dict] = {}
    suspected: list[str] = []
    with store.writer_lock():
        for program in store.programs():
            plan = generate_plan(program, store.config.quota, store.config.seed)
            new_total += store.write_plan(program, plan)
            shortfalls[program.id] = plan.shortfall_manifest()
            if runner is not None:
                for mutant in plan.mutants:
                    outcome = smoke_check(program, mutant, runner)
                    if outcome is SmokeOutcome.NO_DIFFERENCE_OBSERVED:
                        store.set_suspected_equivalent(mutant.id, True)
                        suspected.append(mutant.id)
        store.advance(Phase.MUTATED)
    _emit(
        {
            "campaign": store.id,
            "phase": store.phase.value,
            "new_mutants": new_total,
            "total_mutants": len(store.mutant_ids()),
            "shortfalls": {k: v for k, v in shortfalls.items() if v},
            "suspected_equivalent": suspected,
        }
    )
    return EXIT_OK


def cmd_summarize(args) -> int:
    store = CampaignStore.load(args.campaign)
    store.require_phase(Phase.MUTATED)
    settings = _load_settings(args.settings)
    provider_config = _provider_config(store, settings, replay=bool(args.replay))
    provider = replay_provider(args.replay) if args.replay else None
    subjects = [(p.id, p.source_text) for p in store.programs()]
    subjects += [(m.id, m.mutated_source) for m in store.mutants()]
    with store.writer_lock():
        manifest = batch_summarize(
            subjects,
            provider_config,
            store.summary_store(),
            provider=provider,
            parallelism=args.parallelism,
        )
        store.set_summaries(
            {
                r.subject_ref: {"cache_key": r.cache_key, "failed": r.failed}
                for r in manifest.records
            }
        )
        failures = [f.to_dict() for f in manifest.failures]
        if not failures:
            store.advance(Phase.SUMMARIZED)
    _emit(
        {
            "campaign": store.id,
            "phase": store.phase.value,
            "summarized": len(manifest.records),
            "failures": failures,
        }
    )
    return EXIT_OK if not failures else EXIT_DATA


def cmd_review(args) -> int:
    store = CampaignStore.load(args.campaign)
    with store.writer_lock():
        cast = terminal.run_review(
            store, args.rater, blind=args.blind, script_path=args.script
        )
    _emit(
        {
            "campaign": store.id,
            "phase": store.phase.value,
            "rater": args.rater,
            "verdicts_cast": cast,
            "judged": len(store.verdicts_for(args.rater)),
            "total": len(store.mutant_ids()),
        }
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from mutsum.server import create_app

    app = create_app([args.campaign], ui_dist=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def cmd_reconcile(args) -> int:
    store = CampaignStore.load(args.campaign)
    store.require_phase(Phase.UNDER_REVIEW)
    with store.writer_lock():
        auto = review.auto_reconcile(store, resolver_id=args.resolver)
        resolved = []
        for pair in args.resolve or []:
            mutant_id, _, label = pair.partition("=")
            if not label:
                raise CliError(EXIT_USAGE, "bad-resolve", f"--resolve wants MUTANT=LABEL, got {pair!r}")
            record = review.reconcile(
                store, mutant_id, Label(label), args.resolver,
                note=args.note, force=args.force,
            )
            resolved.append(record.mutant_id)
        remaining = [
            m for m in store.mutant_ids() if m not in store.reconciled_labels()
        ]
        if not remaining:
            store.advance(Phase.RECONCILED)
    _emit(
        {
            "campaign": store.id,
            "phase": store.phase.value,
            "auto_reconciled": auto,
            "resolved": resolved,
            "remaining": remaining,
            "disagreements": review.disagreements(store),
        }
    )
    return EXIT_OK if not remaining else EXIT_DATA


def cmd_report(args) -> int:
    store = CampaignStore.load(args.campaign)
    with store.writer_lock():
        written = analytics.emit_report(store)
        store.advance(Phase.REPORTED)
    _emit(
        {
            "campaign": store.id,
            "phase": store.phase.value,
            "written": {k: str(v) for k, v in sorted(written.items())},
        }
    )
    return EXIT_OK


def _statistics_self_tests() -> list[tuple[str, bool, str]]:
    from mutsum import stats

    checks: list[tuple[str, bool, str]] = []

    result = stats.chi_square([[62, 19], [27, 54], [23, 58], [14, 67]])
    checks.append(
        (
            "chi-square complexity table",
            abs(result.statistic - 69.04) < 0.05 and result.degrees_of_freedom == 3
            and result.p_value < 0.001 and abs(result.effect_size - 0.462) < 0.005,
            f"statistic={result.statistic:.4f} V={result.effect_size:.4f}",
        )
    )
    kappa = stats.cohens_kappa([[121, 5], [6, 192]])
    checks.append(
        ("cohen's kappa reconstruction", abs(kappa - 0.928) < 0.005, f"kappa={kappa:.4f}")
    )
    pct = stats.percent_agreement([[121, 5], [6, 192]])
    checks.append(
        ("percent agreement reconstruction", abs(pct - 0.966) < 0.001, f"agreement={pct:.4f}")
    )
    for df, x in ((1, 3.841458820694124), (2, 5.991464547107979), (3, 7.814727903251179)):
        p = stats.chi2_sf(x, df)
        checks.append(
            (f"chi-square sf critical value df={df}", abs(p - 0.05) < 5e-4, f"p={p:.6f}")
        )
    mw = stats.mann_whitney_u([1, 2, 3], [4, 5, 6])
    checks.append(
        (
            "mann-whitney exact separation",
            mw.statistic == 0.0 and abs(mw.p_value - 0.1) < 1e-12,
            f"U={mw.statistic} p={mw.p_value:.6f}",
        )
    )
    return checks


def cmd_verify(args) -> int:
    store = CampaignStore.load(args.campaign)
    report = store.integrity_check()
    ok = True
    for finding in report.findings:
        ok = False
        print(f"FAIL integrity {finding.kind} {finding.ref}: {finding.detail}")
    if report.clean:
        print("ok integrity: no findings")
    for name, passed, detail in _statistics_self_tests():
        print(f"{'ok' if passed else 'FAIL'} stats {name}: {detail}")
        ok = ok and passed
    _emit({"campaign": store.id, "clean": ok})
    return EXIT_OK if ok else EXIT_INTEGRITY


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mutsum",
        description="Mutation-based evaluation harness for LLM code summaries",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="create a campaign and attach subject programs")
    p.add_argument("--campaign", required=True, help="campaign directory")
    p.add_argument("--corpus", help="directory of subject .py files")
    p.add_argument("--jsonl", help="JSONL corpus file")
    p.add_argument("--map", action="append", metavar="RECORDKEY=SLOT",
                   help="JSONL field mapping onto id/source/title (repeatable)")
    p.add_argument("--origin", default="synthetic",
                   choices=[o.value for o in Origin])
    p.add_argument("--quota", type=int, required=True, help="mutants per (type, location) cell")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--model", default="demo-model", help="model id recorded in the campaign")
    p.add_argument("--settings", help="settings JSON (provider, smoke runner)")
    p.add_argument("--campaign-id")
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("mutate", help="generate the mutation plan for every program")
    p.add_argument("--campaign", required=True)
    p.add_argument("--quota", type=int, help="must match the recorded quota")
    p.add_argument("--seed", type=int, help="must match the recorded seed")
    p.add_argument("--smoke", action="store_true", help="run the behavioral smoke check")
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("summarize", help="obtain summaries for originals and mutants")
    p.add_argument("--campaign", required=True)
    p.add_argument("--replay", help="fixture path; resolves offline and never calls out")
    p.add_argument("--settings")
    p.add_argument("--parallelism", type=int, default=1)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("review", help="judge summary pairs in the terminal")
    p.add_argument("--campaign", required=True)
    p.add_argument("--rater", required=True)
    p.add_argument("--blind", action="store_true", help="hide the code diff")
    p.add_argument("--script", help="JSON file of scripted verdicts")
    p.set_defaults(func=cmd_review)

    p = sub.add_parser("serve", help="serve the review API (and web UI when built)")
    p.add_argument("--campaign", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.add_argument("--ui", help="static UI bundle to mount")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("reconcile", help="finalize labels (auto + explicit resolutions)")
    p.add_argument("--campaign", required=True)
    p.add_argument("--resolver", default="resolver")
    p.add_argument("--resolve", action="append", metavar="MUTANT=LABEL")
    p.add_argument("--note", default="")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_reconcile)

    p = sub.add_parser("report", help="emit the campaign report bundle")
    p.add_argument("--campaign", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("verify", help="integrity check plus statistics self-tests")
    p.add_argument("--campaign", required=True)
    p.set_defaults(func=cmd_verify)

    return parser


_ERROR_MAP = [
    (PhaseError, EXIT_PHASE, "phase-violation"),
    (IntegrityGapError, EXIT_INTEGRITY, "integrity-gap"),
    (LockHeldError, EXIT_LOCK, "lock-held"),
    (TransportError, EXIT_TRANSPORT, "transport"),
    (ReplayMissError, EXIT_DATA, "replay-miss"),
    (CampaignExistsError, EXIT_DATA, "campaign-exists"),
    (IngestError, EXIT_DATA, "ingest"),
    (SourceParseError, EXIT_DATA, "unparseable-source"),
    (FileNotFoundError, EXIT_DATA, "not-found"),
    (KeyError, EXIT_DATA, "unknown-ref"),
    (ValueError, EXIT_DATA, "bad-value"),
]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "ingest" and not args.corpus and not args.jsonl:
        parser.error("ingest needs --corpus or --jsonl")
    try:
        return args.func(args)
    except CliError as exc:
        print(json.dumps({"error": exc.name, "detail": str(exc)}), file=sys.stderr)
        return exc.code
    except Exception as exc:  # map known failure families onto exit codes
        for exc_type, code, name in _ERROR_MAP:
            if isinstance(exc, exc_type):
                print(json.dumps({"error": name, "detail": str(exc)}), file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
