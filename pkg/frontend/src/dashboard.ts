/** Dashboard model: progress plus live agreement.
 *
 * The UI performs no statistical computation: the kappa and percent
 * agreement shown are exactly the values the agreement endpoint
 * returned; with fewer than two raters the panel shows "n/a".
 */

import { ApiError, type ReviewApi } from "./api.js";
import type { Agreement, Progress } from "./types.js";

export interface DashboardModel {
  progress: Progress;
  raterPair: [string, string] | null;
  agreement: Agreement | null;
  kappaDisplay: string;
  percentDisplay: string;
  agreementNote: string | null;
  complete: boolean;
  showReconcileQueue: boolean;
}

export async function buildDashboard(api: ReviewApi, campaignId: string): Promise<DashboardModel> {
  const progress = await api.progress(campaignId);
  const raters = Object.keys(progress.raters).sort();
  const complete =
    progress.total_mutants > 0 &&
    raters.length > 0 &&
    raters.every((r) => progress.raters[r] === progress.total_mutants);

  let agreement: Agreement | null = null;
  let note: string | null = null;
  let pair: [string, string] | null = null;
  if (raters.length >= 2) {
    pair = [raters[0]!, raters[1]!];
    try {
      agreement = await api.agreement(campaignId, pair[0], pair[1]);
    } catch (error) {
      if (error instanceof ApiError) {
        note = error.detail;
      } else {
        throw error;
      }
    }
  } else {
    note = "agreement needs two raters";
  }

  return {
    progress,
    raterPair: pair,
    agreement,
    kappaDisplay: agreement === null ? "n/a" : String(agreement.kappa),
    percentDisplay: agreement === null ? "n/a" : String(agreement.percent_agreement),
    agreementNote: note,
    complete,
    showReconcileQueue: complete,
  };
}
