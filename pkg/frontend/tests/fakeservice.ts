/**
 * In-memory stand-in for the /v1 session service, exposed through the
 * same fetch-shaped interface the real client uses.  It mirrors the
 * server's masking rules (20-bin histogram over [tau, 1], multiset only
 * on request, hidden values never serialized) and its ladder/heuristic
 * so transcript replay against it is meaningful.
 */

import { FetchLike } from "../src/api.js";

const CUTOFFS: number[] = [];
for (let t = 0.9; t > 0.0999; t -= 0.05) {
  CUTOFFS.push(Math.round(t * 100) / 100);
}
const WINDOW = 0.45;
const TEST_LEVEL = 0.05;
const BENCHMARK_INFLATION = 1.1;
const SMALL_SELECTION_FRACTION = 0.15;
const HISTOGRAM_BINS = 20;

function logFactorial(k: number): number {
  let out = 0;
  for (let i = 2; i <= k; i++) {
    out += Math.log(i);
  }
  return out;
}

/** P(Bin(n, p) >= k), direct summation — fine at test sizes. */
function binomSfGeq(k: number, n: number, p: number): number {
  if (k <= 0) return 1;
  if (p >= 1) return 1;
  if (p <= 0) return 0;
  let total = 0;
  const logN = logFactorial(n);
  for (let i = k; i <= n; i++) {
    total += Math.exp(
      logN - logFactorial(i) - logFactorial(n - i) +
        i * Math.log(p) + (n - i) * Math.log(1 - p),
    );
  }
  return Math.min(1, total);
}

function heuristicContinue(
  n: number,
  hiddenCount: number,
  windowCount: number,
  tau: number,
): boolean {
  if (hiddenCount <= SMALL_SELECTION_FRACTION * n) return true;
  const fHat = hiddenCount / n;
  const w = Math.min(WINDOW, 1 - tau);
  const rate = Math.min(1, BENCHMARK_INFLATION * (fHat / tau) * w);
  return binomSfGeq(windowCount, n, rate) <= TEST_LEVEL;
}

interface FakeSession {
  values: number[];
  step: number;
  status: "active" | "stopped";
  chosenTau: number | null;
}

function currentTau(s: FakeSession): number {
  return s.status === "stopped" ? s.chosenTau! : CUTOFFS[s.step]!;
}

function histogram(visible: number[], tau: number) {
  const edges: number[] = [];
  for (let i = 0; i <= HISTOGRAM_BINS; i++) {
    edges.push(tau + ((1 - tau) * i) / HISTOGRAM_BINS);
  }
  const counts = new Array<number>(HISTOGRAM_BINS).fill(0);
  for (const v of visible) {
    let idx = Math.floor(((v - tau) / (1 - tau)) * HISTOGRAM_BINS);
    if (idx === HISTOGRAM_BINS) idx -= 1; // right edge inclusive
    if (idx >= 0 && idx < HISTOGRAM_BINS) counts[idx]! += 1;
  }
  return { bin_edges: edges, counts };
}

export class FakeService {
  private sessions = new Map<string, FakeSession>();
  private nextId = 1;
  /** When set, views include this extra value — used to simulate a
   * buggy server that leaks a hidden p-value. */
  leakValue: number | null = null;

  viewPayload(s: FakeSession, reveal: boolean): Record<string, unknown> {
    const tau = currentTau(s);
    const visible = s.values.filter((v) => v > tau).sort((a, b) => a - b);
    let suggestion: "continue" | "stop" | null = null;
    if (s.status === "active") {
      const w = Math.min(WINDOW, 1 - tau);
      const windowCount = visible.filter((v) => v <= tau + w).length;
      suggestion = heuristicContinue(
        s.values.length,
        s.values.length - visible.length,
        windowCount,
        tau,
      )
        ? "continue"
        : "stop";
    }
    const shown = this.leakValue === null ? visible : [...visible, this.leakValue];
    const payload: Record<string, unknown> = {
      status: s.status,
      n: s.values.length,
      current_tau: tau,
      hidden_count: s.values.length - visible.length,
      masked_histogram: histogram(shown, tau),
      heuristic_suggestion: suggestion,
    };
    // A buggy server that leaks a hidden value would serialize it
    // somewhere; emit the multiset so the client-side check can see it.
    if (reveal || this.leakValue !== null) {
      payload["values_above_tau"] = shown;
    }
    return payload;
  }

  fetch: FetchLike = async (input, init) => {
    const method = init?.method ?? "GET";
    const url = new URL(input, "http://fake");
    const parts = url.pathname.split("/").filter((p) => p.length > 0);
    const respond = (status: number, body: unknown) => ({
      status,
      json: async () => body,
      text: async () => JSON.stringify(body),
    });
    if (parts[0] !== "v1" || parts[1] !== "sessions") {
      return respond(404, { detail: "not found" });
    }
    if (parts.length === 2 && method === "POST") {
      const body = JSON.parse(init?.body ?? "{}") as { pvalues?: number[] };
      const values = body.pvalues ?? [];
      if (
        values.length === 0 ||
        values.some((v) => !Number.isFinite(v) || v < 0 || v > 1)
      ) {
        return respond(400, { detail: "pvalues: must be nonempty in [0, 1]" });
      }
      const id = `s${this.nextId++}`;
      this.sessions.set(id, {
        values: [...values],
        step: 0,
        status: "active",
        chosenTau: null,
      });
      return respond(201, { session_id: id });
    }
    const session = this.sessions.get(parts[2] ?? "");
    if (session === undefined) {
      return respond(404, { detail: "unknown session id" });
    }
    const action = parts[3];
    if (action === undefined && method === "GET") {
      const reveal = url.searchParams.get("reveal") === "multiset";
      return respond(200, this.viewPayload(session, reveal));
    }
    if (action === "advance" && method === "POST") {
      if (session.status !== "active") {
        return respond(409, { detail: "session is stopped" });
      }
      if (session.step + 1 >= CUTOFFS.length) {
        session.status = "stopped";
        session.chosenTau = CUTOFFS[CUTOFFS.length - 1]!;
      } else {
        session.step += 1;
      }
      return respond(200, this.viewPayload(session, false));
    }
    if (action === "stop" && method === "POST") {
      if (session.status !== "active") {
        return respond(409, { detail: "session already stopped" });
      }
      session.chosenTau = currentTau(session);
      session.status = "stopped";
      return respond(200, { status: "stopped", chosen_tau: session.chosenTau });
    }
    if (action === "finalize" && method === "POST") {
      if (session.status !== "stopped") {
        return respond(409, { detail: "stop the session before finalizing" });
      }
      const body = JSON.parse(init?.body ?? "{}") as { method?: string };
      const tau = session.chosenTau!;
      const selected = session.values.filter((v) => v <= tau);
      // Conditional Bonferroni stands in for every method; the real
      // math lives server-side and is tested there.
      const pMin = Math.min(...session.values, 1);
      const makeResult = (t: number, nUsed: number, p: number) => ({
        method: body.method ?? "bonferroni",
        tau: t,
        n_used: nUsed,
        p_combined: Math.min(1, p),
        statistic: pMin,
        mc_draws: 0,
      });
      return respond(200, {
        conditional: makeResult(
          tau,
          selected.length,
          (pMin / tau) * selected.length,
        ),
        unconditional: makeResult(1, session.values.length,
                                  pMin * session.values.length),
      });
    }
    return respond(404, { detail: "not found" });
  };
}

export const FAKE_CUTOFFS = CUTOFFS;
