"""HTTP review API, consumed by the terminal reviewer and the web UI.

One server process owns its campaigns' writer locks; verdict and
reconcile writes are serialized per campaign, reads are lock-free.
The optional static mount serves the built browser UI.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from mutsum import review
from mutsum.review import (
    FailureMode,
    Label,
    ReviewIntegrityError,
    Verdict,
    VerdictInvariantError,
)
from mutsum.stats import DegenerateMarginalsError
from mutsum.store import CampaignStore, PhaseError


class VerdictIn(BaseModel):
    mutant_id: str
    rater_id: str
    label: str
    failure_mode: str | None = None
    recognized_as_bug: bool = False
    note: str = ""


class ReconcileIn(BaseModel):
    mutant_id: str
    final_label: str
    resolver_id: str
    note: str = ""
    force: bool = False


def create_app(campaign_roots: list[str | Path], ui_dist: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="mutsum review API")
    registry: dict[str, tuple[CampaignStore, threading.Lock]] = {}
    for root in campaign_roots:
        store = CampaignStore.load(Path(root))
        registry[store.id] = (store, threading.Lock())

    def entry(campaign_id: str) -> tuple[CampaignStore, threading.Lock]:
        if campaign_id not in registry:
            raise HTTPException(status_code=404, detail=f"unknown campaign {campaign_id}")
        return registry[campaign_id]

    @app.get("/campaigns")
    def list_campaigns() -> list[dict]:
        out = []
        for store, _ in registry.values():
            out.append(
                {
                    "id": store.id,
                    "phase": store.phase.value,
                    "total_mutants": len(store.mutant_ids()),
                    "raters": store.raters(),
                }
            )
        return sorted(out, key=lambda c: c["id"])

    @app.get("/campaigns/{campaign_id}/next")
    def next_item(campaign_id: str, rater: str, blind: bool = False) -> dict:
        store, _ = entry(campaign_id)
        try:
            item = review.next_pending(store, rater, blind=blind)
        except PhaseError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ReviewIntegrityError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if item is None:
            return {"done": True, "progress": review.progress(store)}
        return {"done": False, **item.to_dict()}

    @app.post("/campaigns/{campaign_id}/verdicts")
    def post_verdict(campaign_id: str, body: VerdictIn) -> dict:
        store, lock = entry(campaign_id)
        try:
            verdict = Verdict(
                mutant_id=body.mutant_id,
                rater_id=body.rater_id,
                label=Label(body.label),
                failure_mode=FailureMode(body.failure_mode) if body.failure_mode else None,
                recognized_as_bug=body.recognized_as_bug,
                note=body.note,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        try:
            with lock:
                return review.submit_verdict(store, verdict)
        except VerdictInvariantError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except (ReviewIntegrityError, PhaseError) as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.get("/campaigns/{campaign_id}/agreement")
    def get_agreement(campaign_id: str, a: str, b: str) -> dict:
        store, _ = entry(campaign_id)
        try:
            return review.agreement(store, a, b).to_dict()
        except DegenerateMarginalsError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/campaigns/{campaign_id}/reconcile")
    def post_reconcile(campaign_id: str, body: ReconcileIn) -> dict:
        store, lock = entry(campaign_id)
        try:
            with lock:
                record = review.reconcile(
                    store,
                    body.mutant_id,
                    body.final_label,
                    body.resolver_id,
                    note=body.note,
                    force=body.force,
                )
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except ReviewIntegrityError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return record.to_dict()

    @app.get("/campaigns/{campaign_id}/progress")
    def get_progress(campaign_id: str) -> dict:
        store, _ = entry(campaign_id)
        return review.progress(store)

    if ui_dist is not None and Path(ui_dist).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dist), html=True), name="ui")
    return app
