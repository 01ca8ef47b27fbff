from __future__ import annotations


import pytest
from fastapi.testclient import TestClient

from mutsum.server import create_app

from test_cli import run_demo_pipeline


@pytest.fixture()
def client(tmp_path):
    campaign = tmp_path / "camp"
    run_demo_pipeline(campaign, through="summarize")
    app = create_app([campaign])
    return TestClient(app)


@pytest.fixture()
def reviewed_client(tmp_path):
    campaign = tmp_path / "camp"
    run_demo_pipeline(campaign, through="review-bob")
    app = create_app([campaign])
    return TestClient(app)


def test_list_campaigns(client):
    body = client.get("/campaigns").json()
    assert len(body) == 1
    assert body[0]["id"] == "demo"
    assert body[0]["total_mutants"] == 27


def test_unknown_campaign_404(client):
    assert client.get("/campaigns/nope/progress").status_code == 404


def test_next_returns_full_item(client):
    body = client.get("/campaigns/demo/next", params={"rater": "alice"}).json()
    assert body["done"] is False
    assert body["mutant_id"]
    assert body["original_code"]
    assert body["code_diff"].startswith("---")
    assert isinstance(body["summary_diff"], list)


def test_next_blind_hides_code_diff(client):
    body = client.get(
        "/campaigns/demo/next", params={"rater": "alice", "blind": "true"}
    ).json()
    assert body["blind"] is True
    assert body["code_diff"] is None


def test_submit_verdict_roundtrip_and_next_advances(client):
    first = client.get("/campaigns/demo/next", params={"rater": "alice"}).json()
    response = client.post(
        "/campaigns/demo/verdicts",
        json={
            "mutant_id": first["mutant_id"],
            "rater_id": "alice",
            "label": "negative",
            "failure_mode": "describes_original",
            "note": "echoes the pre-edit logic",
        },
    )
    assert response.status_code == 200
    echo = response.json()
    assert echo["label"] == "negative"
    assert echo["failure_mode"] == "describes_original"
    second = client.get("/campaigns/demo/next", params={"rater": "alice"}).json()
    assert second["mutant_id"] != first["mutant_id"]


def test_submit_invalid_tag_combination_422(client):
    first = client.get("/campaigns/demo/next", params={"rater": "alice"}).json()
    response = client.post(
        "/campaigns/demo/verdicts",
        json={
            "mutant_id": first["mutant_id"],
            "rater_id": "alice",
            "label": "positive",
            "failure_mode": "too_abstract",
        },
    )
    assert response.status_code == 422


def test_submit_unknown_mutant_409(client):
    response = client.post(
        "/campaigns/demo/verdicts",
        json={"mutant_id": "sample_sort/val_b_99", "rater_id": "alice", "label": "positive"},
    )
    assert response.status_code == 409


def test_all_legal_tag_combinations_accepted(client):
    combos = [
        {"label": "positive"},
        {"label": "positive", "recognized_as_bug": True},
        {"label": "negative"},
        {"label": "negative", "failure_mode": "too_abstract"},
        {"label": "negative", "failure_mode": "describes_original"},
    ]
    for combo in combos:
        item = client.get("/campaigns/demo/next", params={"rater": "tagger"}).json()
        response = client.post(
            "/campaigns/demo/verdicts",
            json={"mutant_id": item["mutant_id"], "rater_id": "tagger", **combo},
        )
        assert response.status_code == 200, combo
        echo = response.json()
        for key, value in combo.items():
            assert echo[key] == value


def test_agreement_endpoint(reviewed_client):
    body = reviewed_client.get(
        "/campaigns/demo/agreement", params={"a": "alice", "b": "bob"}
    ).json()
    assert body["n_items"] == 27
    assert 0 < body["kappa"] < 1
    assert body["percent_agreement"] == pytest.approx(25 / 27)
    confusion = body["confusion"]
    assert sum(sum(row) for row in confusion) == 27


def test_agreement_requires_shared_items(client):
    response = client.get("/campaigns/demo/agreement", params={"a": "alice", "b": "bob"})
    assert response.status_code == 400


def test_reconcile_endpoint(reviewed_client):
    progress = reviewed_client.get("/campaigns/demo/progress").json()
    disputed = progress["disagreements"]
    assert len(disputed) == 2
    response = reviewed_client.post(
        "/campaigns/demo/reconcile",
        json={
            "mutant_id": disputed[0],
            "final_label": "positive",
            "resolver_id": "carol",
            "note": "discussed",
        },
    )
    assert response.status_code == 200
    assert response.json()["final_label"] == "positive"
    # reconciling an agreed mutant without force is a conflict
    agreed = next(
        m for m in ("sample_sort/val_b_1", "sample_sort/val_m_1") if m not in disputed
    )
    response = reviewed_client.post(
        "/campaigns/demo/reconcile",
        json={"mutant_id": agreed, "final_label": "negative", "resolver_id": "x"},
    )
    assert response.status_code == 409


def test_progress_endpoint(reviewed_client):
    body = reviewed_client.get("/campaigns/demo/progress").json()
    assert body["total_mutants"] == 27
    assert body["raters"] == {"alice": 27, "bob": 27}
    assert body["order_scheme"].startswith("sha256")


def test_done_marker_when_rater_finished(reviewed_client):
    body = reviewed_client.get("/campaigns/demo/next", params={"rater": "alice"}).json()
    assert body["done"] is True
    assert body["progress"]["raters"]["alice"] == 27
