/** Review session state machine.
 *
 * Invariants enforced here (and re-checked server-side):
 * - failure mode tags attach to negative verdicts only;
 * - the bug-recognized tag attaches to positive verdicts only;
 * - the session never fabricates verdict fields: what the UI shows as
 *   "last stored" is always the server's echo, not the local draft.
 */

import type { ReviewApi, VerdictBody } from "./api.js";
import type {
  FailureMode,
  Label,
  Progress,
  ReviewItem,
  StoredVerdict,
  VerdictDraft,
} from "./types.js";

export interface SessionState {
  campaignId: string;
  raterId: string;
  blind: boolean;
  current: ReviewItem | null;
  done: boolean;
  progress: Progress | null;
  draft: VerdictDraft;
  lastEcho: StoredVerdict | null;
  error: string | null;
}

export function emptyDraft(): VerdictDraft {
  return { label: null, failureMode: null, recognizedAsBug: false, note: "" };
}

export function newSession(campaignId: string, raterId: string, blind = false): SessionState {
  return {
    campaignId,
    raterId,
    blind,
    current: null,
    done: false,
    progress: null,
    draft: emptyDraft(),
    lastEcho: null,
    error: null,
  };
}

/** Selecting a label clears tags the new label makes illegal. */
export function setLabel(draft: VerdictDraft, label: Label): VerdictDraft {
  return {
    ...draft,
    label,
    failureMode: label === "negative" ? draft.failureMode : null,
    recognizedAsBug: label === "positive" ? draft.recognizedAsBug : false,
  };
}

/** Toggling a failure mode is blocked unless the draft is negative. */
export function toggleFailureMode(draft: VerdictDraft, mode: FailureMode): VerdictDraft {
  if (draft.label !== "negative") {
    return draft;
  }
  return { ...draft, failureMode: draft.failureMode === mode ? null : mode };
}

/** Toggling bug recognition is blocked unless the draft is positive. */
export function toggleBug(draft: VerdictDraft): VerdictDraft {
  if (draft.label !== "positive") {
    return draft;
  }
  return { ...draft, recognizedAsBug: !draft.recognizedAsBug };
}

/** Client-side invariant check; the server re-validates regardless. */
export function draftProblems(draft: VerdictDraft): string[] {
  const problems: string[] = [];
  if (draft.label === null) {
    problems.push("choose positive or negative first");
  }
  if (draft.failureMode !== null && draft.label !== "negative") {
    problems.push("failure modes describe negative verdicts only");
  }
  if (draft.recognizedAsBug && draft.label !== "positive") {
    problems.push("bug recognition marks positive verdicts only");
  }
  return problems;
}

export function verdictBody(state: SessionState): VerdictBody | null {
  if (state.current === null || state.draft.label === null) {
    return null;
  }
  if (draftProblems(state.draft).length > 0) {
    return null;
  }
  return {
    mutant_id: state.current.mutant_id,
    rater_id: state.raterId,
    label: state.draft.label,
    failure_mode: state.draft.failureMode,
    recognized_as_bug: state.draft.recognizedAsBug,
    note: state.draft.note,
  };
}

export async function loadNext(api: ReviewApi, state: SessionState): Promise<SessionState> {
  const response = await api.nextItem(state.campaignId, state.raterId, state.blind);
  if (response.done) {
    return {
      ...state,
      current: null,
      done: true,
      progress: response.progress,
      draft: emptyDraft(),
      error: null,
    };
  }
  const { done: _done, ...item } = response;
  return { ...state, current: item, done: false, draft: emptyDraft(), error: null };
}

/** Synchronous submit: POST, display the server echo, then auto-load next. */
export async function submit(api: ReviewApi, state: SessionState): Promise<SessionState> {
  const problems = draftProblems(state.draft);
  if (problems.length > 0) {
    return { ...state, error: problems.join("; ") };
  }
  const body = verdictBody(state);
  if (body === null) {
    return { ...state, error: "no item loaded" };
  }
  const echo = await api.submitVerdict(state.campaignId, body);
  const advanced = await loadNext(api, { ...state, lastEcho: echo, error: null });
  return { ...advanced, lastEcho: echo };
}
