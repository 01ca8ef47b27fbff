/** Thin typed client over the review HTTP API; no other backend calls. */

import type {
  Agreement,
  CampaignInfo,
  FailureMode,
  Label,
  NextResponse,
  Progress,
  StoredVerdict,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`API ${status}: ${detail}`);
  }
}

export interface VerdictBody {
  mutant_id: string;
  rater_id: string;
  label: Label;
  failure_mode: FailureMode | null;
  recognized_as_bug: boolean;
  note: string;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ReviewApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const text = await response.text();
    if (!response.ok) {
      let detail = text;
      try {
        detail = (JSON.parse(text) as { detail?: string }).detail ?? text;
      } catch {
        // non-JSON error body: keep raw text
      }
      throw new ApiError(response.status, detail);
    }
    return JSON.parse(text) as T;
  }

  listCampaigns(): Promise<CampaignInfo[]> {
    return this.request<CampaignInfo[]>("/campaigns");
  }

  nextItem(campaign: string, rater: string, blind: boolean): Promise<NextResponse> {
    const params = new URLSearchParams({ rater, blind: String(blind) });
    return this.request<NextResponse>(`/campaigns/${campaign}/next?${params}`);
  }

  submitVerdict(campaign: string, body: VerdictBody): Promise<StoredVerdict> {
    return this.request<StoredVerdict>(`/campaigns/${campaign}/verdicts`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  progress(campaign: string): Promise<Progress> {
    return this.request<Progress>(`/campaigns/${campaign}/progress`);
  }

  agreement(campaign: string, a: string, b: string): Promise<Agreement> {
    const params = new URLSearchParams({ a, b });
    return this.request<Agreement>(`/campaigns/${campaign}/agreement?${params}`);
  }
}
