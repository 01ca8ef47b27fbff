from __future__ import annotations

import json

import pytest

from mutsum.summaries import (
    HttpChatProvider,
    ProviderConfig,
    SummaryStore,
    TransportError,
    summarize,
)


class FakeResponse:
    def __init__(self, status_code=200, payload=None):
        self.status_code = status_code
        self._payload = payload or {}

    def json(self):
        return self._payload


class FakeSession:
    """Captures request payloads and plays back a scripted response list."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.requests: list[dict] = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.requests.append({"url": url, "json": json, "headers": headers})
        step = self.responses.pop(0)
        if isinstance(step, Exception):
            raise step
        return step


def config(**kw):
    defaults = dict(
        model_id="test-model",
        endpoint="https://api.example.invalid/v1/chat/completions",
        credential_env="TEST_API_KEY",
        max_retries=3,
    )
    defaults.update(kw)
    return ProviderConfig(**defaults)


def ok_response(text="A summary."):
    return FakeResponse(
        200,
        {
            "choices": [{"message": {"content": text}}],
            "usage": {"total_tokens": 20},
        },
    )


def test_request_payload_contains_exactly_one_user_message(tmp_path, monkeypatch):
    monkeypatch.setenv("TEST_API_KEY", "secret")
    session = FakeSession([ok_response()])
    provider = HttpChatProvider(config(), session=session)
    record = summarize("x = 1\n", config(), SummaryStore(tmp_path), provider=provider)
    assert record.summary_text == "A summary."
    assert len(session.requests) == 1
    payload = session.requests[0]["json"]
    assert payload["model"] == "test-model"
    assert payload["temperature"] == 0.0
    assert len(payload["messages"]) == 1
    assert payload["messages"][0]["role"] == "user"
    assert payload["messages"][0]["content"].startswith(
        "Explain the following code snippet in plain English."
    )
    assert session.requests[0]["headers"]["Authorization"] == "Bearer secret"


def test_retry_then_success(tmp_path, monkeypatch):
    monkeypatch.setenv("TEST_API_KEY", "secret")
    monkeypatch.setattr(HttpChatProvider, "_sleep", lambda self, attempt: None)
    session = FakeSession([FakeResponse(429), FakeResponse(503), ok_response("Eventually.")])
    provider = HttpChatProvider(config(), session=session)
    record = summarize("y = 2\n", config(), SummaryStore(tmp_path), provider=provider)
    assert record.summary_text == "Eventually."
    assert record.attempts == 3


def test_transport_error_carries_attempt_log(tmp_path, monkeypatch):
    monkeypatch.setenv("TEST_API_KEY", "secret")
    monkeypatch.setattr(HttpChatProvider, "_sleep", lambda self, attempt: None)
    session = FakeSession([FakeResponse(500), FakeResponse(500), FakeResponse(500)])
    provider = HttpChatProvider(config(), session=session)
    with pytest.raises(TransportError) as excinfo:
        summarize("z = 3\n", config(), SummaryStore(tmp_path), provider=provider)
    assert len(excinfo.value.attempts) == 3
    assert "HTTP 500" in excinfo.value.attempts[0]


def test_missing_credential_is_transport_error(tmp_path, monkeypatch):
    monkeypatch.delenv("TEST_API_KEY", raising=False)
    session = FakeSession([ok_response()])
    provider = HttpChatProvider(config(), session=session)
    with pytest.raises(TransportError, match="TEST_API_KEY"):
        summarize("w = 4\n", config(), SummaryStore(tmp_path), provider=provider)
    assert session.requests == []


def test_client_error_does_not_retry(tmp_path, monkeypatch):
    monkeypatch.setenv("TEST_API_KEY", "secret")
    monkeypatch.setattr(HttpChatProvider, "_sleep", lambda self, attempt: None)
    session = FakeSession([FakeResponse(401)])
    provider = HttpChatProvider(config(), session=session)
    with pytest.raises(TransportError):
        summarize("v = 5\n", config(), SummaryStore(tmp_path), provider=provider)
    assert len(session.requests) == 1
