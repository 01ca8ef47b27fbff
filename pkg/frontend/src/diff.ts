/** Rendering helpers: word-level marks for summaries, line classes for code.
 *
 * The server computes both diffs; this module only turns them into
 * markup, so the two sides can never disagree about what changed.
 */

import type { DiffSegment } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** One side of the summary pair with changed words wrapped in <mark>. */
export function renderSummarySide(segments: DiffSegment[], side: "a" | "b"): string {
  const parts: string[] = [];
  for (const segment of segments) {
    const text = escapeHtml(segment[side]);
    if (!text) continue;
    if (segment.op === "equal") {
      parts.push(text);
    } else {
      const cls = side === "a" ? "removed" : "added";
      parts.push(`<mark class="${cls}">${text}</mark>`);
    }
  }
  return parts.join("");
}

export function changedSegments(segments: DiffSegment[]): DiffSegment[] {
  return segments.filter((segment) => segment.op !== "equal");
}

/** Unified code diff text to line-classed markup. */
export function renderCodeDiff(unified: string): string {
  const rows = unified.split("\n").map((line) => {
    let cls = "ctx";
    if (line.startsWith("+++") || line.startsWith("---")) cls = "file";
    else if (line.startsWith("@@")) cls = "hunk";
    else if (line.startsWith("+")) cls = "add";
    else if (line.startsWith("-")) cls = "del";
    return `<div class="diff-line ${cls}">${escapeHtml(line) || "&nbsp;"}</div>`;
  });
  return rows.join("");
}
