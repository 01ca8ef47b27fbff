/** Wire types mirroring the review API exactly. */

export type Label = "positive" | "negative";
export type FailureMode = "too_abstract" | "describes_original";

export interface DiffSegment {
  op: "equal" | "insert" | "delete" | "replace";
  a: string;
  b: string;
}

export interface ReviewItem {
  mutant_id: string;
  original_code: string;
  mutated_code: string;
  code_diff: string | null;
  original_summary: string;
  mutated_summary: string;
  summary_diff: DiffSegment[];
  blind: boolean;
}

export interface Progress {
  campaign: string;
  phase: string;
  total_mutants: number;
  raters: Record<string, number>;
  reconciled: number;
  disagreements: string[];
  order_scheme: string;
}

export interface NextDone {
  done: true;
  progress: Progress;
}

export type NextResponse = NextDone | ({ done: false } & ReviewItem);

export interface StoredVerdict {
  mutant_id: string;
  rater_id: string;
  label: Label;
  failure_mode: FailureMode | null;
  recognized_as_bug: boolean;
  note: string;
  decided_at: string;
  resubmitted?: boolean;
}

export interface Agreement {
  n_items: number;
  percent_agreement: number;
  kappa: number;
  confusion: number[][];
}

export interface CampaignInfo {
  id: string;
  phase: string;
  total_mutants: number;
  raters: string[];
}

export interface VerdictDraft {
  label: Label | null;
  failureMode: FailureMode | null;
  recognizedAsBug: boolean;
  note: string;
}
