/** Keyboard shortcuts: p/n verdict, 1/2 failure modes, b bug toggle,
 * enter submit, v blind toggle. Pure mapping, applied by the app shell. */

import { setLabel, toggleBug, toggleFailureMode } from "./session.js";
import type { VerdictDraft } from "./types.js";

export type KeyAction =
  | { kind: "draft"; draft: VerdictDraft }
  | { kind: "submit" }
  | { kind: "toggle-blind" }
  | { kind: "none" };

export function handleKey(key: string, draft: VerdictDraft): KeyAction {
  switch (key.toLowerCase()) {
    case "p":
      return { kind: "draft", draft: setLabel(draft, "positive") };
    case "n":
      return { kind: "draft", draft: setLabel(draft, "negative") };
    case "1":
      return { kind: "draft", draft: toggleFailureMode(draft, "too_abstract") };
    case "2":
      return { kind: "draft", draft: toggleFailureMode(draft, "describes_original") };
    case "b":
      return { kind: "draft", draft: toggleBug(draft) };
    case "v":
      return { kind: "toggle-blind" };
    case "enter":
      return { kind: "submit" };
    default:
      return { kind: "none" };
  }
}
