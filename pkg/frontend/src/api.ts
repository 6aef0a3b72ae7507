// Typed client for the review service JSON API under /api/v1.
// The UI never computes scores or counts itself; every number rendered
// anywhere comes from one of these responses.

export interface CategorySummary {
  name: string;
  run_id: string | null;
  candidates: number;
  accepted: number;
  pending: number;
  warning: string | null;
}

export interface PromotionEntry {
  iteration: number;
  words: string[];
}

export interface CategoryDetail extends CategorySummary {
  promotions: PromotionEntry[];
  config: Record<string, unknown> | null;
  seed_words: string[];
}

export interface DecisionState {
  verdict: "accept" | "reject" | "defer";
  rating: number | null;
}

export interface CandidateCard {
  word: string;
  display: string;
  window_count: number;
  corpus_freq: number;
  examples: string[];
  decision: DecisionState | null;
  rank?: number;
  score?: string;
}

export interface SessionInfo {
  session_id: string;
  category: string;
  size: number;
  random_order: boolean;
}

export interface CandidatePage {
  words: CandidateCard[];
  cursor: number;
  done: boolean;
}

export interface CurveData {
  category: string;
  step: number;
  reviewed: number;
  accepted: number;
  unrated: number;
  curves: Record<string, [number, number][]>;
}

export interface RunStatus {
  run_id: string;
  category: string;
  status: "running" | "done" | "error";
  error: string | null;
  out_dir: string | null;
}

export interface DecisionRequest {
  word: string;
  verdict: "accept" | "reject" | "defer";
  rating: number | null;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let message = res.statusText;
  try {
    const body = (await res.json()) as { error?: string };
    if (body.error) message = body.error;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(res.status, message);
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const res = await fetch(this.base + path);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await fetch(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  async listCategories(): Promise<CategorySummary[]> {
    const body = await this.get<{ categories: CategorySummary[] }>("/api/v1/categories");
    return body.categories;
  }

  categoryDetail(name: string): Promise<CategoryDetail> {
    return this.get(`/api/v1/categories/${encodeURIComponent(name)}`);
  }

  createSession(opts: {
    category: string;
    random_order?: boolean;
    limit?: number;
    rng_seed?: number;
  }): Promise<SessionInfo> {
    return this.post("/api/v1/sessions", opts);
  }

  nextCandidates(sessionId: string, n: number): Promise<CandidatePage> {
    return this.get(`/api/v1/sessions/${encodeURIComponent(sessionId)}/next?n=${n}`);
  }

  submitDecision(sessionId: string, decision: DecisionRequest): Promise<void> {
    return this.post(`/api/v1/sessions/${encodeURIComponent(sessionId)}/decisions`, decision);
  }

  rerun(category: string, useAcceptedAsSeeds: boolean): Promise<{ run_id: string }> {
    return this.post("/api/v1/rerun", {
      category,
      use_accepted_as_seeds: useAcceptedAsSeeds,
    });
  }

  runStatus(runId: string): Promise<RunStatus> {
    return this.get(`/api/v1/runs/${encodeURIComponent(runId)}`);
  }

  curves(category: string, step = 20): Promise<CurveData> {
    return this.get(`/api/v1/curves?category=${encodeURIComponent(category)}&step=${step}`);
  }

  async exportTsv(category: string): Promise<string> {
    const res = await fetch(
      `${this.base}/api/v1/categories/${encodeURIComponent(category)}/export`,
    );
    if (!res.ok) throw await parseError(res);
    return res.text();
  }
}
