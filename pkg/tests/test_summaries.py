from __future__ import annotations

import json
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mutsum import summaries
from mutsum.summaries import (
    FIXED_PROMPT,
    ProviderConfig,
    ReplayMissError,
    ReplayProvider,
    SummaryStore,
    batch_summarize,
    build_prompt,
    cache_key,
    summarize,
)


class ScriptedProvider:
    """Stands in for the HTTP provider; counts calls, returns canned text."""

    def __init__(self, reply="This code does things.", fail_refs=()):
        self.calls = 0
        self.reply = reply
        self.lock = threading.Lock()

    def complete(self, prompt_text):
        with self.lock:
            self.calls += 1
        return self.reply, {"total_tokens": 12}, 1, 0.01


def config(model="test-model"):
    return ProviderConfig(model_id=model, endpoint="https://example.invalid/v1/chat")


def test_prompt_begins_with_fixed_instruction():
    prompt = build_prompt("print('hi')\n")
    assert prompt.startswith("Explain the following code snippet in plain English.")
    assert prompt == FIXED_PROMPT + "\n\nprint('hi')\n"


def test_temperature_is_pinned_to_zero():
    with pytest.raises(ValueError):
        ProviderConfig(model_id="m", temperature=0.7)
    cfg = ProviderConfig(model_id="m", temperature=0.7, allow_temperature_override=True)
    assert cfg.temperature == 0.7


def test_cache_hit_returns_stored_record_unchanged(tmp_path):
    store = SummaryStore(tmp_path)
    provider = ScriptedProvider()
    first = summarize("x = 1\n", config(), store, subject_ref="p1", provider=provider)
    second = summarize("x = 1\n", config(), store, subject_ref="p1", provider=provider)
    assert provider.calls == 1
    assert second.summary_text == first.summary_text
    assert second.created_at == first.created_at


def test_cache_key_distinct_inputs_distinct_keys():
    base = cache_key("m", build_prompt("a"), "a")
    assert cache_key("m2", build_prompt("a"), "a") != base
    assert cache_key("m", build_prompt("b"), "b") != base
    assert len(base) == 64


@given(st.text(max_size=60), st.text(max_size=60))
@settings(max_examples=200, deadline=None)
def test_cache_key_injective_over_code_text(code_a, code_b):
    if code_a == code_b:
        return
    key_a = cache_key("m", build_prompt(code_a), code_a)
    key_b = cache_key("m", build_prompt(code_b), code_b)
    assert key_a != key_b


def test_empty_response_persists_failed_record(tmp_path):
    store = SummaryStore(tmp_path)
    provider = ScriptedProvider(reply="")
    record = summarize("x = 1\n", config(), store, subject_ref="p1", provider=provider)
    assert record.failed is True
    assert store.get(record.cache_key).failed is True


def test_context_overflow_is_hard_error(tmp_path):
    store = SummaryStore(tmp_path)
    cfg = ProviderConfig(model_id="m", endpoint="x", max_code_chars=10)
    with pytest.raises(summaries.ContextOverflowError):
        summarize("x = 1\n" * 10, cfg, store, provider=ScriptedProvider())


def test_replay_provider_round_trip(tmp_path):
    store = SummaryStore(tmp_path / "cache")
    provider = ScriptedProvider(reply="Original text.")
    record = summarize("y = 2\n", config(), store, subject_ref="p", provider=provider)

    # the cache directory itself is the fixture
    replay = ReplayProvider(tmp_path / "cache")
    fresh_store = SummaryStore(tmp_path / "fresh")
    replayed = summarize("y = 2\n", config(), fresh_store, subject_ref="p", provider=replay)
    assert replayed.summary_text == "Original text."
    assert replayed.cache_key == record.cache_key


def test_replay_provider_mapping_file(tmp_path):
    key = cache_key("test-model", build_prompt("z = 3\n"), "z = 3\n")
    fixture = tmp_path / "fixture.json"
    fixture.write_text(json.dumps({key: "Mapped text."}))
    replay = ReplayProvider(fixture)
    store = SummaryStore(tmp_path / "cache")
    record = summarize("z = 3\n", config(), store, provider=replay)
    assert record.summary_text == "Mapped text."


def test_replay_miss_is_explicit_error(tmp_path):
    fixture = tmp_path / "fixture.json"
    fixture.write_text("{}")
    replay = ReplayProvider(fixture)
    store = SummaryStore(tmp_path / "cache")
    with pytest.raises(ReplayMissError):
        summarize("unseen\n", config(), store, provider=replay)


def test_replay_malformed_fixture(tmp_path):
    fixture = tmp_path / "fixture.json"
    fixture.write_text("{not json")
    with pytest.raises(ValueError, match="line"):
        ReplayProvider(fixture)


def test_batch_all_subjects_or_marked_failed(tmp_path):
    key_known = cache_key("test-model", build_prompt("a = 1\n"), "a = 1\n")
    fixture = tmp_path / "fixture.json"
    fixture.write_text(json.dumps({key_known: "Known."}))
    replay = ReplayProvider(fixture)
    store = SummaryStore(tmp_path / "cache")
    manifest = batch_summarize(
        [("s1", "a = 1\n"), ("s2", "b = 2\n"), ("s3", "c = 3\n")],
        config(),
        store,
        provider=replay,
    )
    assert [r.subject_ref for r in manifest.records] == ["s1"]
    assert sorted(f.subject_ref for f in manifest.failures) == ["s2", "s3"]


def test_batch_empty():
    manifest = batch_summarize([], config(), SummaryStore("/tmp/mutsum-empty-batch"), provider=ScriptedProvider())
    assert manifest.records == []
    assert manifest.failures == []


def test_batch_output_independent_of_parallelism(tmp_path):
    subjects = [(f"s{i}", f"x = {i}\n") for i in range(20)]
    results = []
    for bound in (1, 4):
        store = SummaryStore(tmp_path / f"cache-{bound}")
        manifest = batch_summarize(
            subjects, config(), store, provider=ScriptedProvider(), parallelism=bound
        )
        results.append({(r.subject_ref, r.cache_key, r.summary_text) for r in manifest.records})
    assert results[0] == results[1]


def test_batch_lbpp_scale_via_cache(tmp_path):
    # 200 subjects resolved in one batch: 150 mutants plus 50 originals
    subjects = [(f"orig{i}", f"v = {i}\n") for i in range(50)]
    subjects += [(f"mut{i}", f"w = {i}\n") for i in range(150)]
    store = SummaryStore(tmp_path / "cache")
    manifest = batch_summarize(subjects, config(), store, provider=ScriptedProvider(), parallelism=8)
    assert len(manifest.records) == 200
    assert manifest.failures == []


def test_record_digest_changes_with_summary_text(tmp_path):
    store = SummaryStore(tmp_path)
    record = summarize("q = 1\n", config(), store, provider=ScriptedProvider(reply="AA"))
    stored = store.path_for(record.cache_key)
    data = json.loads(stored.read_text())
    assert data["record_digest"] == summaries.record_digest(record.cache_key, "AA")
    assert data["record_digest"] != summaries.record_digest(record.cache_key, "BB")
