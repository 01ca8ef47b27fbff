/** Browser shell: wires the session, keyboard, and dashboard to the DOM. */

import { ReviewApi } from "./api.js";
import { buildDashboard } from "./dashboard.js";
import { changedSegments, escapeHtml, renderCodeDiff, renderSummarySide } from "./diff.js";
import { handleKey } from "./keyboard.js";
import {
  draftProblems,
  loadNext,
  newSession,
  setLabel,
  submit,
  toggleBug,
  toggleFailureMode,
  type SessionState,
} from "./session.js";
import type { FailureMode, Label } from "./types.js";

const api = new ReviewApi("");

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function renderItem(state: SessionState): void {
  const item = state.current;
  if (state.done || item === null) {
    el("item-panel").hidden = true;
    el("done-panel").hidden = !state.done;
    if (state.progress) {
      const judged = state.progress.raters[state.raterId] ?? 0;
      el("done-counts").textContent =
        `${judged}/${state.progress.total_mutants} items judged by ${state.raterId}`;
    }
    return;
  }
  el("item-panel").hidden = false;
  el("done-panel").hidden = true;
  el("item-title").textContent = `${item.mutant_id}${state.blind ? " (blind)" : ""}`;
  const codePanel = el("code-diff");
  if (item.code_diff === null) {
    codePanel.hidden = true;
    el("blind-note").hidden = false;
  } else {
    codePanel.hidden = false;
    el("blind-note").hidden = true;
    codePanel.innerHTML = renderCodeDiff(item.code_diff);
  }
  el("summary-original").innerHTML = renderSummarySide(item.summary_diff, "a");
  el("summary-mutated").innerHTML = renderSummarySide(item.summary_diff, "b");
  el("summary-changes").textContent = changedSegments(item.summary_diff).length
    ? ""
    : "summaries are word-for-word identical";
}

function renderDraft(state: SessionState): void {
  const { draft } = state;
  el("btn-positive").classList.toggle("active", draft.label === "positive");
  el("btn-negative").classList.toggle("active", draft.label === "negative");
  el("btn-too-abstract").classList.toggle("active", draft.failureMode === "too_abstract");
  el("btn-describes-original").classList.toggle(
    "active",
    draft.failureMode === "describes_original",
  );
  el("btn-bug").classList.toggle("active", draft.recognizedAsBug);
  (el("btn-too-abstract") as HTMLButtonElement).disabled = draft.label !== "negative";
  (el("btn-describes-original") as HTMLButtonElement).disabled = draft.label !== "negative";
  (el("btn-bug") as HTMLButtonElement).disabled = draft.label !== "positive";
  (el("btn-submit") as HTMLButtonElement).disabled = draftProblems(draft).length > 0;
  el("draft-error").textContent = state.error ?? "";
}

function renderEcho(state: SessionState): void {
  const echo = state.lastEcho;
  if (!echo) {
    el("last-verdict").textContent = "";
    return;
  }
  const tags = [
    echo.failure_mode ? `failure mode: ${echo.failure_mode}` : null,
    echo.recognized_as_bug ? "recognized as bug" : null,
  ].filter(Boolean);
  el("last-verdict").textContent =
    `stored: ${echo.mutant_id} -> ${echo.label}` + (tags.length ? ` (${tags.join(", ")})` : "");
}

async function renderDashboard(campaignId: string): Promise<void> {
  const model = await buildDashboard(api, campaignId);
  const rows = Object.entries(model.progress.raters)
    .sort(([a], [b]) => (a < b ? -1 : 1))
    .map(
      ([rater, judged]) =>
        `<tr><td>${escapeHtml(rater)}</td><td>${judged}/${model.progress.total_mutants}</td></tr>`,
    );
  el("dash-raters").innerHTML = rows.join("") || "<tr><td colspan=2>no raters yet</td></tr>";
  el("dash-kappa").textContent = model.kappaDisplay;
  el("dash-percent").textContent = model.percentDisplay;
  el("dash-note").textContent = model.agreementNote ?? "";
  el("dash-reconciled").textContent =
    `${model.progress.reconciled}/${model.progress.total_mutants}`;
  const queue = el("reconcile-queue");
  queue.hidden = !model.showReconcileQueue;
  if (model.showReconcileQueue) {
    queue.innerHTML =
      "<h3>reconcile queue</h3>" +
      (model.progress.disagreements.length
        ? model.progress.disagreements
            .map((m) => `<div class="queue-item">${escapeHtml(m)}</div>`)
            .join("")
        : "<div class=\"queue-item\">no disagreements</div>");
  }
}

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const campaigns = await api.listCampaigns();
  const first = campaigns[0];
  if (!first) {
    el("item-title").textContent = "no campaigns served";
    return;
  }
  const campaignId = params.get("campaign") ?? first.id;
  const raterId = params.get("rater") ?? "rater";
  let state = newSession(campaignId, raterId, params.get("blind") === "1");
  el("session-label").textContent = `${campaignId} / ${raterId}`;

  const apply = (next: SessionState): void => {
    state = next;
    renderItem(state);
    renderDraft(state);
    renderEcho(state);
  };

  const act = async (fn: () => Promise<SessionState>): Promise<void> => {
    try {
      apply(await fn());
      await renderDashboard(campaignId);
    } catch (error) {
      state.error = String(error);
      renderDraft(state);
    }
  };

  el("btn-positive").onclick = () => apply({ ...state, draft: setLabel(state.draft, "positive"), error: null });
  el("btn-negative").onclick = () => apply({ ...state, draft: setLabel(state.draft, "negative"), error: null });
  el("btn-too-abstract").onclick = () =>
    apply({ ...state, draft: toggleFailureMode(state.draft, "too_abstract" as FailureMode) });
  el("btn-describes-original").onclick = () =>
    apply({ ...state, draft: toggleFailureMode(state.draft, "describes_original" as FailureMode) });
  el("btn-bug").onclick = () => apply({ ...state, draft: toggleBug(state.draft) });
  el("btn-submit").onclick = () => void act(() => submit(api, state));
  el("btn-blind").onclick = () =>
    void act(async () => loadNext(api, { ...state, blind: !state.blind }));

  (el("note-input") as HTMLTextAreaElement).oninput = (event) => {
    state.draft.note = (event.target as HTMLTextAreaElement).value;
  };

  document.addEventListener("keydown", (event) => {
    if ((event.target as HTMLElement).tagName === "TEXTAREA") return;
    const action = handleKey(event.key, state.draft);
    if (action.kind === "draft") {
      apply({ ...state, draft: action.draft, error: null });
    } else if (action.kind === "submit") {
      void act(() => submit(api, state));
    } else if (action.kind === "toggle-blind") {
      void act(async () => loadNext(api, { ...state, blind: !state.blind }));
    }
  });

  await act(() => loadNext(api, state));
}

void start();
