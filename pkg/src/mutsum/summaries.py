"""Summary acquisition under a fixed protocol, with caching and replay.

Protocol, pinned:

* the prompt is the fixed instruction line, a blank line, then the code
  verbatim (no markdown fences, no system message);
* exactly one user message per request, a fresh session per subject;
* temperature 0, not overridable without an explicit experiment flag;
* the first response for a given (model, prompt, code) triple is
  canonical: it is cached under a content-addressed key and every later
  call replays it.

The on-disk cache is one JSON record per cache key, which makes any
cache directory a replayable fixture.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import requests

from mutsum import fsutil
from mutsum.fsutil import read_json

FIXED_PROMPT = "Explain the following code snippet in plain English."


class TransportError(RuntimeError):
    """All transport attempts failed; carries the per-attempt log."""

    def __init__(self, message: str, attempts: list[str]):
        super().__init__(message)
        self.attempts = attempts


class ReplayMissError(KeyError):
    """A replay provider has no fixture for the requested cache key."""


class ContextOverflowError(ValueError):
    """Code larger than the provider context; truncation is never an option."""


def build_prompt(code_text: str) -> str:
    return f"{FIXED_PROMPT}\n\n{code_text}"


def cache_key(model_id: str, prompt_text: str, code_text: str) -> str:
    """Content address of one summarization request (sha256, 256 bits)."""
    hasher = hashlib.sha256()
    for part in (model_id, prompt_text, code_text):
        data = part.encode("utf-8")
        hasher.update(str(len(data)).encode("ascii"))
        hasher.update(b":")
        hasher.update(data)
    return hasher.hexdigest()


def record_digest(key: str, summary_text: str) -> str:
    """Tamper-evidence digest binding a record's key to its summary text."""
    return hashlib.sha256(f"{key}\n{summary_text}".encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ProviderConfig:
    """Transport settings for a chat-completion provider."""

    model_id: str
    endpoint: str = ""
    credential_env: str = "MUTSUM_API_KEY"
    provider_name: str = "openai-compatible"
    temperature: float = 0.0
    timeout_s: float = 60.0
    max_retries: int = 3
    max_code_chars: int = 400_000
    allow_temperature_override: bool = False

    def __post_init__(self):
        if self.temperature != 0.0 and not self.allow_temperature_override:
            raise ValueError(
                "temperature is fixed at 0; set allow_temperature_override "
                "to run an explicit temperature experiment"
            )

    def to_public_dict(self) -> dict:
        # The credential env var name stays out of shareable snapshots.
        return {
            "model_id": self.model_id,
            "endpoint": self.endpoint,
            "provider_name": self.provider_name,
            "temperature": self.temperature,
            "timeout_s": self.timeout_s,
            "max_retries": self.max_retries,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProviderConfig":
        return cls(
            model_id=data["model_id"],
            endpoint=data.get("endpoint", ""),
            credential_env=data.get("credential_env", "MUTSUM_API_KEY"),
            provider_name=data.get("provider_name", "openai-compatible"),
            temperature=data.get("temperature", 0.0),
            timeout_s=data.get("timeout_s", 60.0),
            max_retries=data.get("max_retries", 3),
            allow_temperature_override=data.get("allow_temperature_override", False),
        )


@dataclass(frozen=True)
class SummaryRecord:
    """One model response for one code version under the fixed protocol."""

    id: str
    subject_ref: str
    model_id: str
    prompt_text: str
    summary_text: str
    cache_key: str
    created_at: str
    token_usage: dict | None = None
    attempts: int = 1
    latency_s: float = 0.0
    failed: bool = False
    failure_reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "subject_ref": self.subject_ref,
            "model_id": self.model_id,
            "prompt_text": self.prompt_text,
            "summary_text": self.summary_text,
            "cache_key": self.cache_key,
            "record_digest": record_digest(self.cache_key, self.summary_text),
            "created_at": self.created_at,
            "token_usage": self.token_usage,
            "attempts": self.attempts,
            "latency_s": self.latency_s,
            "failed": self.failed,
            "failure_reason": self.failure_reason,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SummaryRecord":
        return cls(
            id=data["id"],
            subject_ref=data["subject_ref"],
            model_id=data["model_id"],
            prompt_text=data["prompt_text"],
            summary_text=data["summary_text"],
            cache_key=data["cache_key"],
            created_at=data["created_at"],
            token_usage=data.get("token_usage"),
            attempts=data.get("attempts", 1),
            latency_s=data.get("latency_s", 0.0),
            failed=data.get("failed", False),
            failure_reason=data.get("failure_reason"),
        )


class SummaryStore:
    """Content-addressed cache: one JSON file per cache key.

    Writers use write-then-rename per key (last writer wins with
    identical content); readers never need a lock.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path_for(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, key: str) -> SummaryRecord | None:
        path = self.path_for(key)
        if not path.exists():
            return None
        return SummaryRecord.from_dict(read_json(path))

    def put(self, record: SummaryRecord) -> None:
        fsutil.atomic_write_json(self.path_for(record.cache_key), record.to_dict())

    def keys(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))


# ---------------------------------------------------------------------------
# Providers
# ---------------------------------------------------------------------------

class HttpChatProvider:
    """Minimal chat-completion client (OpenAI-style JSON body).

    Each call sends exactly one user message; retries use exponential
    backoff with jitter up to the configured attempt budget.
    """

    def __init__(self, config: ProviderConfig, session: requests.Session | None = None):
        if not config.endpoint:
            raise ValueError("provider endpoint is not configured")
        self.config = config
        self.session = session or requests.Session()

    def _headers(self) -> dict:
        token = os.environ.get(self.config.credential_env, "")
        if not token:
            raise TransportError(
                f"credential env var {self.config.credential_env} is not set", attempts=[]
            )
        return {"Authorization": f"Bearer {token}", "Content-Type": "application/json"}

    def complete(self, prompt_text: str) -> tuple[str, dict | None, int, float]:
        payload = {
            "model": self.config.model_id,
            "messages": [{"role": "user", "content": prompt_text}],
            "temperature": self.config.temperature,
        }
        attempts_log: list[str] = []
        started = time.monotonic()
        headers = self._headers()
        for attempt in range(1, self.config.max_retries + 1):
            try:
                response = self.session.post(
                    self.config.endpoint,
                    json=payload,
                    headers=headers,
                    timeout=self.config.timeout_s,
                )
                if response.status_code >= 400:
                    attempts_log.append(f"attempt {attempt}: HTTP {response.status_code}")
                    if response.status_code in (408, 409, 429) or response.status_code >= 500:
                        self._sleep(attempt)
                        continue
                    break
                body = response.json()
                text = body["choices"][0]["message"]["content"]
                usage = body.get("usage")
                return text, usage, attempt, time.monotonic() - started
            except (requests.RequestException, KeyError, ValueError) as exc:
                attempts_log.append(f"attempt {attempt}: {type(exc).__name__}: {exc}")
                self._sleep(attempt)
        raise TransportError(
            f"{self.config.provider_name} request failed after {len(attempts_log)} attempts",
            attempts=attempts_log,
        )

    def _sleep(self, attempt: int) -> None:
        delay = min(30.0, (2 ** (attempt - 1)) + random.uniform(0.0, 0.5))
        time.sleep(delay)


class ReplayProvider:
    """Resolves summaries from fixtures only; a miss is always an error.

    Accepts either a cache directory (one ``{key}.json`` record per
    file) or a single JSON file mapping cache key to summary text.
    """

    def __init__(self, fixture_path: str | Path):
        self.path = Path(fixture_path)
        self._table: dict[str, str] = {}
        if self.path.is_dir():
            for file in sorted(self.path.glob("*.json")):
                try:
                    data = read_json(file)
                except (OSError, json.JSONDecodeError) as exc:
                    raise ValueError(f"malformed fixture record {file.name}: {exc}") from exc
                if "cache_key" not in data or "summary_text" not in data:
                    raise ValueError(f"fixture record {file.name} lacks cache_key/summary_text")
                self._table[data["cache_key"]] = data["summary_text"]
        elif self.path.is_file():
            try:
                data = read_json(self.path)
            except json.JSONDecodeError as exc:
                raise ValueError(
                    f"malformed fixture {self.path.name} at line {exc.lineno}: {exc.msg}"
                ) from exc
            if not isinstance(data, dict):
                raise ValueError(f"fixture {self.path.name} must map cache keys to text")
            self._table = {str(k): str(v) for k, v in data.items()}
        else:
            raise FileNotFoundError(f"replay fixture not found: {self.path}")

    def lookup(self, key: str) -> str:
        if key not in self._table:
            raise ReplayMissError(f"no fixture for cache key {key}")
        return self._table[key]

    def __len__(self) -> int:
        return len(self._table)


def replay_provider(fixture_path: str | Path) -> ReplayProvider:
    return ReplayProvider(fixture_path)


# ---------------------------------------------------------------------------
# Summarization
# ---------------------------------------------------------------------------

def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def summarize(
    code_text: str,
    config: ProviderConfig,
    store: SummaryStore,
    subject_ref: str = "",
    provider: HttpChatProvider | ReplayProvider | None = None,
) -> SummaryRecord:
    """Return the canonical summary record for one code version.

    Cache hit: the stored record comes back unchanged.  Cache miss:
    exactly one logical request with no prior conversation context;
    the result is persisted before returning.  An empty or refused
    response persists as a failed record for manual attention.
    """
    if len(code_text) > config.max_code_chars:
        raise ContextOverflowError(
            f"code for {subject_ref or '<subject>'} exceeds the configured "
            f"context budget ({len(code_text)} > {config.max_code_chars} chars)"
        )
    prompt_text = build_prompt(code_text)
    key = cache_key(config.model_id, prompt_text, code_text)
    cached = store.get(key)
    if cached is not None:
        return cached

    if provider is None:
        provider = HttpChatProvider(config)
    if isinstance(provider, ReplayProvider):
        text = provider.lookup(key)
        usage, attempts, latency = None, 1, 0.0
    else:
        text, usage, attempts, latency = provider.complete(prompt_text)

    failed = not text or not text.strip()
    record = SummaryRecord(
        id=key,
        subject_ref=subject_ref,
        model_id=config.model_id,
        prompt_text=prompt_text,
        summary_text=text or "",
        cache_key=key,
        created_at=_now(),
        token_usage=usage,
        attempts=attempts,
        latency_s=latency,
        failed=failed,
        failure_reason="provider returned empty text" if failed else None,
    )
    store.put(record)
    return record


@dataclass
class BatchFailure:
    subject_ref: str
    error: str

    def to_dict(self) -> dict:
        return {"subject_ref": self.subject_ref, "error": self.error}


@dataclass
class BatchManifest:
    records: list[SummaryRecord] = field(default_factory=list)
    failures: list[BatchFailure] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "records": {r.subject_ref: r.cache_key for r in self.records},
            "failures": [f.to_dict() for f in self.failures],
        }


def batch_summarize(
    subjects: list[tuple[str, str]],
    config: ProviderConfig,
    store: SummaryStore,
    provider: HttpChatProvider | ReplayProvider | None = None,
    parallelism: int = 1,
) -> BatchManifest:
    """Summarize (subject_ref, code_text) pairs with per-subject isolation.

    One subject's failure never aborts the batch; at most ``parallelism``
    requests are in flight; the resulting record set is independent of
    the parallelism bound.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    manifest = BatchManifest()

    def work(subject: tuple[str, str]):
        ref, code = subject
        return ref, summarize(code, config, store, subject_ref=ref, provider=provider)

    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = [(ref, pool.submit(work, (ref, code))) for ref, code in subjects]
        for ref, future in futures:
            try:
                _, record = future.result()
            except Exception as exc:  # per-subject isolation
                manifest.failures.append(BatchFailure(subject_ref=ref, error=str(exc)))
                continue
            if record.failed:
                manifest.failures.append(
                    BatchFailure(subject_ref=ref, error=record.failure_reason or "failed")
                )
            manifest.records.append(record)
    return manifest
