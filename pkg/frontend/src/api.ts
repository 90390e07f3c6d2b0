/**
 * Typed client for the /v1 session API.
 *
 * Every response that can carry p-values is validated against the
 * masking contract before it is handed to the caller: the service must
 * never reveal a value at or below the current cutoff, and this client
 * refuses to pass one on if it ever did.
 */

export interface MaskedHistogram {
  bin_edges: number[];
  counts: number[];
}

export interface SessionView {
  status: "active" | "stopped";
  n: number;
  current_tau: number;
  hidden_count: number;
  masked_histogram: MaskedHistogram;
  heuristic_suggestion: "continue" | "stop" | null;
  values_above_tau?: number[];
}

export interface CombinedResult {
  method: string;
  tau: number;
  n_used: number;
  p_combined: number;
  statistic: number;
  mc_draws: number;
}

export interface FinalizeResponse {
  conditional: CombinedResult;
  unconditional: CombinedResult;
}

export interface StopResponse {
  status: "stopped";
  chosen_tau: number;
}

export interface SessionCreateBody {
  pvalues?: number[];
  dataset?: { id: string; estimate: number; std_err: number; group?: string }[];
  side?: "plus" | "minus";
  cutoffs?: number[];
  window?: number;
  level?: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class MaskViolationError extends Error {}

/** Throw if a view payload leaks any value at or below its cutoff. */
export function assertMasked(view: SessionView): SessionView {
  const tau = view.current_tau;
  for (const v of view.values_above_tau ?? []) {
    if (v <= tau) {
      throw new MaskViolationError(
        `service leaked value ${v} <= current tau ${tau}`,
      );
    }
  }
  const edges = view.masked_histogram?.bin_edges ?? [];
  if (edges.length > 0 && edges[0]! < tau - 1e-12) {
    throw new MaskViolationError(
      `histogram starts below current tau (${edges[0]} < ${tau})`,
    );
  }
  return view;
}

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown>; text(): Promise<string> }>;

export class SessionApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (...args) =>
      fetch(...(args as Parameters<typeof fetch>)),
  ) {}

  private async request<T>(
    path: string,
    method: "GET" | "POST",
    body?: unknown,
  ): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (resp.status >= 400) {
      let detail = "";
      try {
        const parsed = (await resp.json()) as { detail?: string };
        detail = parsed.detail ?? "";
      } catch {
        detail = await resp.text().catch(() => "");
      }
      throw new ApiError(resp.status, detail || `HTTP ${resp.status}`);
    }
    return (await resp.json()) as T;
  }

  async createSession(body: SessionCreateBody): Promise<string> {
    const out = await this.request<{ session_id: string }>(
      "/v1/sessions",
      "POST",
      body,
    );
    return out.session_id;
  }

  async getView(
    sessionId: string,
    reveal?: "multiset",
  ): Promise<SessionView> {
    const query = reveal ? `?reveal=${reveal}` : "";
    return assertMasked(
      await this.request<SessionView>(
        `/v1/sessions/${sessionId}${query}`,
        "GET",
      ),
    );
  }

  async advance(sessionId: string): Promise<SessionView> {
    return assertMasked(
      await this.request<SessionView>(
        `/v1/sessions/${sessionId}/advance`,
        "POST",
      ),
    );
  }

  async stop(sessionId: string): Promise<StopResponse> {
    return this.request<StopResponse>(`/v1/sessions/${sessionId}/stop`, "POST");
  }

  async finalize(
    sessionId: string,
    method: string,
    options: Record<string, unknown> = {},
  ): Promise<FinalizeResponse> {
    return this.request<FinalizeResponse>(
      `/v1/sessions/${sessionId}/finalize`,
      "POST",
      { method, options },
    );
  }
}
